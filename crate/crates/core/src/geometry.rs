//! Torus points, the affine orbit map `n -> theta * n + alpha (mod 1)`, the
//! annulus `S(r)` inside the box `[0, 1/2]^d`, and the Monte Carlo machinery
//! used to measure it.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Error, Result};
use crate::rng::{self, Domain};

/// Upper end (exclusive) of the allowed annulus thickness.
pub const MAX_DELTA: f64 = 0.1;

/// A point of the d-dimensional torus, stored as coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("torus point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..1.0).contains(*c)) {
            return Err(invalid(format!("torus coordinate {c} is outside [0, 1)")));
        }
        Ok(Self { coords })
    }

    /// Reduces arbitrary finite reals into `[0, 1)`.
    pub fn wrapping(coords: &[f64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| wrap_unit(c)).collect())
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            coords: vec![0.0; d.max(1)],
        }
    }

    /// Uniform point of `T^d`.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Self {
        Self {
            coords: (0..d).map(|_| rng.random::<f64>()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean norm of the coordinate vector read in `[0, 1)^d`.
    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if self.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

pub(crate) fn wrap_unit(x: f64) -> f64 {
    let w = x.rem_euclid(1.0);
    // rem_euclid rounds tiny negatives up to exactly 1.0
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// One coordinate of the orbit map `n -> theta n + alpha (mod 1)`.
///
/// `theta` is split into a head with 21 significant bits and a tail below
/// `2^-21`. For `n < 2^32` the head product is exact, so its fractional part
/// is exact too, and the tail product is small enough that the result stays
/// within a few ulps of the true value.
#[derive(Debug, Clone, Copy)]
pub(crate) struct OrbitCoord {
    head: f64,
    tail: f64,
    alpha: f64,
}

const HEAD_SCALE: f64 = (1u64 << 21) as f64;

impl OrbitCoord {
    pub(crate) fn new(theta: f64, alpha: f64) -> Self {
        let head = (theta * HEAD_SCALE).floor() / HEAD_SCALE;
        Self {
            head,
            tail: theta - head,
            alpha,
        }
    }

    #[inline]
    pub(crate) fn at(&self, n: u64) -> f64 {
        let nf = n as f64;
        ((self.head * nf).fract() + self.tail * nf + self.alpha).fract()
    }
}

pub(crate) fn orbit(theta: &TorusPoint, alpha: &TorusPoint) -> Vec<OrbitCoord> {
    theta
        .coords
        .iter()
        .zip(&alpha.coords)
        .map(|(&t, &a)| OrbitCoord::new(t, a))
        .collect()
}

/// `theta * n + alpha`, reduced mod 1 coordinatewise.
pub fn psi_map(n: u64, theta: &TorusPoint, alpha: &TorusPoint) -> Result<TorusPoint> {
    alpha.check_dim(theta.dim())?;
    if n == 0 {
        return Err(invalid("orbit index n must be at least 1"));
    }
    let coords = orbit(theta, alpha).iter().map(|o| o.at(n)).collect();
    Ok(TorusPoint { coords })
}

/// The region `{x in [0, 1/2]^d : r - delta <= |x| <= r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    d: usize,
    r: f64,
    delta: f64,
}

impl AnnulusSpec {
    /// Annulus with thickness in the construction range `0 < delta < 1/10`.
    pub fn new(d: usize, r: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < MAX_DELTA) {
            return Err(invalid(format!("delta = {delta} must lie in (0, 0.1)")));
        }
        Self::unrestricted(d, r, delta)
    }

    /// Any annulus that fits the box, with no cap on the thickness. Used for
    /// geometric probes such as the full quarter disc (`r = delta = 1/2`).
    pub fn unrestricted(d: usize, r: f64, delta: f64) -> Result<Self> {
        if d == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid(format!("delta = {delta} must be positive")));
        }
        let r_max = 0.5 * (d as f64).sqrt();
        if !(r.is_finite() && delta <= r && r <= r_max) {
            return Err(invalid(format!(
                "radius {r} must satisfy delta = {delta} <= r <= sqrt(d)/2 = {r_max}"
            )));
        }
        Ok(Self { d, r, delta })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn inner_radius(&self) -> f64 {
        self.r - self.delta
    }

    /// Membership for a raw coordinate slice; the caller guarantees the length.
    #[inline]
    pub fn contains_coords(&self, coords: &[f64]) -> bool {
        let mut sq = 0.0;
        for &c in coords {
            if !(0.0..=0.5).contains(&c) {
                return false;
            }
            sq += c * c;
        }
        self.norm_sq_in_range(sq)
    }

    #[inline]
    pub(crate) fn norm_sq_in_range(&self, sq: f64) -> bool {
        let lo = self.inner_radius();
        lo * lo <= sq && sq <= self.r * self.r
    }
}

pub fn annulus_contains(p: &TorusPoint, spec: &AnnulusSpec) -> Result<bool> {
    p.check_dim(spec.d)?;
    Ok(spec.contains_coords(&p.coords))
}

/// Monte Carlo estimate of a volume, as a fraction of the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Estimates `vol(S(r))` as a fraction of `T^d`.
///
/// A uniform point of `[0, 1)^d` falls in the box `[0, 1/2]^d` with
/// probability exactly `2^-d`, and conditioned on that it is uniform on the
/// box. The estimator samples the box directly and rescales by `2^-d`, which
/// has the same expectation and far fewer wasted draws in high dimension.
pub fn estimate_annulus_volume(spec: &AnnulusSpec, samples: u64, seed: u64) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(invalid("at least one sample is required"));
    }
    let d = spec.d;
    let hits: u64 = rng::chunked(samples, seed, Domain::Volume, |rng, count| {
        let mut point = vec![0.0; d];
        let mut hits = 0u64;
        for _ in 0..count {
            let mut sq = 0.0;
            for c in point.iter_mut() {
                *c = 0.5 * rng.random::<f64>();
                sq += *c * *c;
            }
            if spec.norm_sq_in_range(sq) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();

    let box_volume = 0.5f64.powi(d as i32);
    let p = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        mean: p * box_volume,
        std_error: (p * (1.0 - p) / samples as f64).sqrt() * box_volume,
        samples,
    })
}

/// Samples needed for the most populated norm bin to collect about 100 hits.
pub fn recommended_radius_samples(d: usize, delta: f64) -> u64 {
    (100.0 * 2f64.powi(d as i32) / delta).ceil() as u64
}

/// Histogram of `|x|` for `x` uniform on `[0, 1/2]^d`, in bins of width
/// `delta` covering `(0, floor(sqrt(d)/2 / delta) * delta]`.
pub fn norm_histogram(d: usize, delta: f64, samples: u64, seed: u64) -> Result<Vec<u64>> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if !(delta > 0.0 && delta < MAX_DELTA) {
        return Err(invalid(format!("delta = {delta} must lie in (0, 0.1)")));
    }
    if samples == 0 {
        return Err(invalid("at least one sample is required"));
    }
    let r_max = 0.5 * (d as f64).sqrt();
    let bins = ((r_max / delta) + 1e-9).floor() as usize;

    let partial = rng::chunked(samples, seed, Domain::Radius, |rng, count| {
        let mut hist = vec![0u64; bins];
        for _ in 0..count {
            let sq: f64 = (0..d)
                .map(|_| {
                    let c = 0.5 * rng.random::<f64>();
                    c * c
                })
                .sum();
            // bin j holds norms in (j*delta, (j+1)*delta]
            let j = (sq.sqrt() / delta).ceil() as usize;
            if j >= 1 && j <= bins {
                hist[j - 1] += 1;
            }
        }
        hist
    });
    let mut hist = vec![0u64; bins];
    for h in partial {
        for (acc, x) in hist.iter_mut().zip(h) {
            *acc += x;
        }
    }
    Ok(hist)
}

/// Picks the outer radius whose shell of thickness `delta` holds the most
/// mass, by histogramming norms of uniform points of the box. Ties go to the
/// smaller radius.
pub fn select_radius(d: usize, delta: f64, samples: u64, seed: u64) -> Result<AnnulusSpec> {
    let recommended = recommended_radius_samples(d, delta);
    if samples < recommended {
        log::warn!(
            "select_radius: {samples} samples is below the recommended {recommended} for d = {d}, delta = {delta}"
        );
    }
    let hist = norm_histogram(d, delta, samples, seed)?;
    let (best, _) = hist
        .iter()
        .enumerate()
        .fold((0usize, 0u64), |(bj, bc), (j, &c)| if c > bc { (j, c) } else { (bj, bc) });
    let r_max = 0.5 * (d as f64).sqrt();
    let r = ((best + 1) as f64 * delta).min(r_max);
    AnnulusSpec::new(d, r, delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean_norm: f64,
    /// Fraction of samples with `| |x| - sqrt(d/12) | <= 1`.
    pub fraction_within: f64,
}

pub fn norm_concentration_stats(d: usize, samples: u64, seed: u64) -> Result<NormStats> {
    if d == 0 || samples == 0 {
        return Err(invalid("dimension and sample count must be positive"));
    }
    let centre = (d as f64 / 12.0).sqrt();
    let partial = rng::chunked(samples, seed, Domain::Norms, |rng, count| {
        let mut sum = 0.0;
        let mut within = 0u64;
        for _ in 0..count {
            let sq: f64 = (0..d)
                .map(|_| {
                    let c = 0.5 * rng.random::<f64>();
                    c * c
                })
                .sum();
            let nrm = sq.sqrt();
            sum += nrm;
            if (nrm - centre).abs() <= 1.0 {
                within += 1;
            }
        }
        (sum, within)
    });
    let (sum, within) = partial
        .into_iter()
        .fold((0.0, 0u64), |(s, w), (ps, pw)| (s + ps, w + pw));
    Ok(NormStats {
        mean_norm: sum / samples as f64,
        fraction_within: within as f64 / samples as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn passes(&self, significance: f64) -> bool {
        self.p_value >= significance
    }
}

/// Pearson chi-squared test of `counts` against equal cell probabilities.
pub fn chi_square_uniformity(counts: &[u64]) -> Result<ChiSquareTest> {
    if counts.len() < 2 {
        return Err(invalid("need at least two cells"));
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(invalid("no observations"));
    }
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let diff = c as f64 - expected;
            diff * diff / expected
        })
        .sum();
    let dof = counts.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| invalid(e.to_string()))?;
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    })
}

/// Index of the half-open orthant cell (`[0, 1/2)` or `[1/2, 1)` per axis).
pub fn orthant_cell(coords: &[f64]) -> usize {
    coords
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &c)| acc | (usize::from(c >= 0.5) << i))
}

/// Chi-squared test that `psi(n)` is uniform on `T^d` as `(theta, alpha)`
/// range uniformly, over the `2^d` orthant cells.
pub fn equidistribution_single(n: u64, d: usize, samples: u64, seed: u64) -> Result<ChiSquareTest> {
    equidistribution(&[n], d, samples, seed)
}

/// Joint version for `(psi(n), psi(n'))` over `2^(2d)` cell pairs.
pub fn equidistribution_pair(n: u64, n2: u64, d: usize, samples: u64, seed: u64) -> Result<ChiSquareTest> {
    if n == n2 {
        return Err(invalid("pair test needs distinct indices"));
    }
    equidistribution(&[n, n2], d, samples, seed)
}

fn equidistribution(indices: &[u64], d: usize, samples: u64, seed: u64) -> Result<ChiSquareTest> {
    if d == 0 || d * indices.len() > 16 {
        return Err(invalid(format!("dimension {d} unsupported for a cell test")));
    }
    if indices.contains(&0) {
        return Err(invalid("orbit index n must be at least 1"));
    }
    let cells = 1usize << (d * indices.len());
    let partial = rng::chunked(samples, seed, Domain::Equidistribution, |rng, count| {
        let mut hist = vec![0u64; cells];
        for _ in 0..count {
            let theta = TorusPoint::random(d, rng);
            let alpha = TorusPoint::random(d, rng);
            let mut cell = 0;
            for (k, &n) in indices.iter().enumerate() {
                let p = psi_map(n, &theta, &alpha).expect("dimensions agree");
                cell |= orthant_cell(p.coords()) << (k * d);
            }
            hist[cell] += 1;
        }
        hist
    });
    let mut hist = vec![0u64; cells];
    for h in partial {
        for (acc, x) in hist.iter_mut().zip(h) {
            *acc += x;
        }
    }
    chi_square_uniformity(&hist)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> TorusPoint {
        TorusPoint::new(c.to_vec()).unwrap()
    }

    fn close(a: &TorusPoint, b: &[f64]) -> bool {
        a.coords().iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn psi_map_examples() {
        let p = psi_map(5, &TorusPoint::zeros(3), &pt(&[0.3; 3])).unwrap();
        assert!(close(&p, &[0.3; 3]));
        let p = psi_map(2, &pt(&[0.7]), &pt(&[0.9])).unwrap();
        assert!(close(&p, &[0.3]));
        let p = psi_map(3, &pt(&[0.25, 0.5]), &pt(&[0.1, 0.1])).unwrap();
        assert!(close(&p, &[0.85, 0.6]));
    }

    #[test]
    fn psi_map_rejects_mismatch() {
        let err = psi_map(1, &pt(&[0.1]), &pt(&[0.1, 0.2])).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 1, found: 2 });
        assert!(psi_map(0, &pt(&[0.1]), &pt(&[0.1])).is_err());
    }

    #[test]
    fn torus_point_validation() {
        assert!(TorusPoint::new(vec![]).is_err());
        assert!(TorusPoint::new(vec![1.0]).is_err());
        assert!(TorusPoint::new(vec![-0.1]).is_err());
        assert_eq!(TorusPoint::wrapping(&[-0.25, 1.5]).unwrap().coords(), &[0.75, 0.5]);
        assert_eq!(wrap_unit(-1e-20), 0.0);
    }

    #[test]
    fn annulus_examples() {
        // delta = 0.1 sits on the excluded edge of the construction range
        assert!(AnnulusSpec::new(1, 0.3, 0.1).is_err());
        let spec = AnnulusSpec::unrestricted(1, 0.3, 0.1).unwrap();
        assert!(annulus_contains(&pt(&[0.25]), &spec).unwrap());
        let spec2 = AnnulusSpec::new(2, 0.7, 0.05).unwrap();
        assert!(!annulus_contains(&pt(&[0.6, 0.1]), &spec2).unwrap());
        let spec3 = AnnulusSpec::new(2, 0.5, 0.02).unwrap();
        assert!(annulus_contains(&pt(&[0.3, 0.4]), &spec3).unwrap());
        assert!(annulus_contains(&pt(&[0.3]), &spec3).is_err());
    }

    #[test]
    fn annulus_spec_validation() {
        assert!(AnnulusSpec::new(2, 0.5, 0.1).is_err());
        assert!(AnnulusSpec::new(2, 0.5, 0.0).is_err());
        assert!(AnnulusSpec::new(2, 0.01, 0.05).is_err());
        assert!(AnnulusSpec::new(4, 1.01, 0.05).is_err());
        assert!(AnnulusSpec::new(0, 0.5, 0.05).is_err());
        assert!(AnnulusSpec::unrestricted(2, 0.5, 0.5).is_ok());
    }

    #[test]
    fn one_dimensional_volume_is_delta() {
        let spec = AnnulusSpec::new(1, 0.3, 0.05).unwrap();
        let est = estimate_annulus_volume(&spec, 1 << 20, 3).unwrap();
        assert!((est.mean - 0.05).abs() < 4.0 * est.std_error, "{est:?}");
    }

    /// Simpson's rule for the quarter disc area `int_0^{1/2} sqrt(1/4 - x^2) dx`.
    fn quarter_disc_by_quadrature() -> f64 {
        let steps = 200_000;
        let h = 0.5 / steps as f64;
        let f = |x: f64| (0.25 - x * x).max(0.0).sqrt();
        let mut acc = f(0.0) + f(0.5);
        for i in 1..steps {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn quarter_disc_volume() {
        let exact = std::f64::consts::PI / 16.0;
        assert!((quarter_disc_by_quadrature() - exact).abs() < 1e-6);
        let spec = AnnulusSpec::unrestricted(2, 0.5, 0.5).unwrap();
        let est = estimate_annulus_volume(&spec, 1 << 20, 11).unwrap();
        assert!((est.mean - exact).abs() < 4.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn volume_is_deterministic_and_error_scales() {
        let spec = AnnulusSpec::new(3, 0.6, 0.05).unwrap();
        let a = estimate_annulus_volume(&spec, 100_000, 5).unwrap();
        let b = estimate_annulus_volume(&spec, 100_000, 5).unwrap();
        assert_eq!(a, b);
        let big = estimate_annulus_volume(&spec, 10_000_000, 5).unwrap();
        let ratio = a.std_error / big.std_error;
        assert!((ratio - 10.0).abs() < 1.0, "{ratio}");
        assert!(estimate_annulus_volume(&spec, 0, 5).is_err());
    }

    #[test]
    fn select_radius_one_dimension() {
        let spec = select_radius(1, 0.05, 100_000, 1).unwrap();
        assert!(spec.r() >= 0.05 && spec.r() <= 0.5);
        let est = estimate_annulus_volume(&spec, 1 << 18, 2).unwrap();
        assert!((est.mean - 0.05).abs() < 4.0 * est.std_error);
    }

    #[test]
    fn select_radius_tracks_norm_centre() {
        let spec = select_radius(12, 0.01, 1 << 21, 7).unwrap();
        assert!((spec.r() - 1.0).abs() <= 0.5, "r = {}", spec.r());
        assert_eq!(spec, select_radius(12, 0.01, 1 << 21, 7).unwrap());
    }

    #[test]
    fn select_radius_errors() {
        assert!(select_radius(3, 0.2, 1000, 1).is_err());
        assert!(select_radius(3, 0.05, 0, 1).is_err());
    }

    #[test]
    fn norm_stats_one_dimension() {
        let s = norm_concentration_stats(1, 200_000, 4).unwrap();
        assert!((s.mean_norm - 0.25).abs() < 0.002);
        assert_eq!(s.fraction_within, 1.0);
    }

    #[test]
    fn norm_stats_concentrate() {
        let s = norm_concentration_stats(48, 100_000, 4).unwrap();
        assert!(s.fraction_within >= 0.95);
        assert!((s.mean_norm - 2.0).abs() < 0.05);
    }

    #[test]
    fn chi_square_basics() {
        let t = chi_square_uniformity(&[100, 100, 100, 100]).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let t = chi_square_uniformity(&[400, 0, 0, 0]).unwrap();
        assert!(t.p_value < 1e-10);
        assert!(chi_square_uniformity(&[5]).is_err());
    }

    #[test]
    fn orthant_cells() {
        assert_eq!(orthant_cell(&[0.1, 0.1]), 0);
        assert_eq!(orthant_cell(&[0.5, 0.1]), 1);
        assert_eq!(orthant_cell(&[0.1, 0.9, 0.7]), 6);
    }
}
