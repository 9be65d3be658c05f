//! The randomized torus-annulus construction.
//!
//! For random `theta, alpha` on `T^d` the set `A = {n <= N : theta n + alpha in S(r)}`
//! is large (its expected size is `N vol(S)`) and contains few progressions,
//! because three points of a thin annulus in arithmetic progression must be
//! close together. Deleting one element per surviving progression leaves a
//! progression-free set. Many `(theta, alpha)` are tried and the largest
//! surviving set is kept.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::apcore::{self, CandidateSet};
use crate::error::{invalid, Error, Result};
use crate::geometry::{self, AnnulusSpec, TorusPoint, VolumeEstimate};
use crate::rng::{self, Domain};

/// Largest thickness handed to the annulus; keeps `delta < 1/10`.
pub const DELTA_CAP: f64 = 0.0999;
pub const DEFAULT_TRIALS: u64 = 64;
/// Cap on the norm-histogram sample count used when picking the radius.
pub const RADIUS_SAMPLE_CAP: u64 = 1 << 22;
/// Samples for the independent `vol(S)` estimate reported next to a construction.
pub const VOLUME_SAMPLES: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub n_limit: u64,
    pub d: usize,
    pub delta: f64,
    pub spec: AnnulusSpec,
    pub trials: u64,
    pub master_seed: u64,
    pub c_delta: f64,
}

impl ConstructionParams {
    /// Parameters around an explicitly chosen annulus.
    pub fn with_spec(n_limit: u64, spec: AnnulusSpec, trials: u64, master_seed: u64) -> Result<Self> {
        if n_limit == 0 {
            return Err(invalid("N must be at least 1"));
        }
        if trials == 0 {
            return Err(invalid("at least one trial is required"));
        }
        Ok(Self {
            n_limit,
            d: spec.d(),
            delta: spec.delta(),
            spec,
            trials,
            master_seed,
            c_delta: 1.0,
        })
    }
}

/// `ceil(sqrt(2 log2 N))`, taking `log2 N` directly.
pub fn dimension_for_log2(log2_n: f64) -> usize {
    (2.0 * log2_n).sqrt().ceil().max(1.0) as usize
}

pub fn auto_dimension(n: u64) -> usize {
    dimension_for_log2((n as f64).log2())
}

/// `c_delta * sqrt(d) * N^(-2/d)`, before clamping.
pub fn raw_delta(n: u64, d: usize, c_delta: f64) -> f64 {
    c_delta * (d as f64).sqrt() * (n as f64).powf(-2.0 / d as f64)
}

pub fn derive_params(n: u64, c_delta: f64, trials: u64, seed: u64) -> Result<ConstructionParams> {
    derive_params_with(n, c_delta, trials, seed, None)
}

/// Like [`derive_params`], optionally forcing the dimension.
pub fn derive_params_with(
    n: u64,
    c_delta: f64,
    trials: u64,
    seed: u64,
    d_override: Option<usize>,
) -> Result<ConstructionParams> {
    if n < 8 {
        return Err(invalid(format!("N = {n} is too small; need N >= 8")));
    }
    if !(c_delta.is_finite() && c_delta > 0.0) {
        return Err(invalid(format!("c_delta = {c_delta} must be positive and finite")));
    }
    if trials == 0 {
        return Err(invalid("at least one trial is required"));
    }
    let d = match d_override {
        Some(0) => return Err(invalid("dimension override must be at least 1")),
        Some(d) if d > 64 => return Err(invalid(format!("dimension override {d} exceeds 64"))),
        Some(d) => d,
        None => auto_dimension(n),
    };
    let unclamped = raw_delta(n, d, c_delta);
    if !(unclamped.is_finite() && unclamped > 0.0) {
        return Err(invalid(format!("delta formula gave {unclamped} for N = {n}, d = {d}")));
    }
    let delta = unclamped.min(DELTA_CAP);
    if delta < 1e-12 {
        return Err(invalid(format!("delta = {delta} is too thin to sample")));
    }
    let samples = geometry::recommended_radius_samples(d, delta).min(RADIUS_SAMPLE_CAP);
    let spec = geometry::select_radius(d, delta, samples, seed)?;
    Ok(ConstructionParams {
        n_limit: n,
        d,
        delta,
        spec,
        trials,
        master_seed: seed,
        c_delta,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial_index: u64,
    pub theta: TorusPoint,
    pub alpha: TorusPoint,
    /// `|A|`
    pub raw_size: u64,
    /// `T(A)`
    pub ap_count: u64,
    pub final_size: u64,
    /// `|A| - T(A)`, a lower bound on `final_size`.
    pub score: i64,
    /// `(2/3)|A| - T(A)`
    pub weighted_score: f64,
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub outcome: TrialOutcome,
    pub set: CandidateSet,
}

fn trial_point(params: &ConstructionParams, trial_index: u64) -> (TorusPoint, TorusPoint) {
    let mut rng = rng::substream(params.master_seed, Domain::Trial, trial_index);
    let theta = TorusPoint::random(params.d, &mut rng);
    let alpha = TorusPoint::random(params.d, &mut rng);
    (theta, alpha)
}

/// `{n in [1, N] : theta n + alpha in S}`.
pub fn preimage(n_limit: u64, theta: &TorusPoint, alpha: &TorusPoint, spec: &AnnulusSpec) -> Result<CandidateSet> {
    for p in [theta, alpha] {
        if p.dim() != spec.d() {
            return Err(Error::DimensionMismatch {
                expected: spec.d(),
                found: p.dim(),
            });
        }
    }
    let orbit = geometry::orbit(theta, alpha);
    let mut elements = Vec::new();
    'outer: for n in 1..=n_limit {
        let mut sq = 0.0;
        for o in &orbit {
            let x = o.at(n);
            if x > 0.5 {
                continue 'outer;
            }
            sq += x * x;
        }
        if spec.norm_sq_in_range(sq) {
            elements.push(n);
        }
    }
    Ok(CandidateSet::new(n_limit, elements)?)
}

fn raw_trial(params: &ConstructionParams, trial_index: u64) -> (TorusPoint, TorusPoint, CandidateSet, u64) {
    let (theta, alpha) = trial_point(params, trial_index);
    let raw = preimage(params.n_limit, &theta, &alpha, &params.spec).expect("trial point matches spec dimension");
    let ap_count = apcore::count_3aps(&raw);
    (theta, alpha, raw, ap_count)
}

pub fn run_trial(params: &ConstructionParams, trial_index: u64) -> Trial {
    let (theta, alpha, raw, ap_count) = raw_trial(params, trial_index);
    let set = apcore::greedy_delete_to_ap_free(&raw);
    let raw_size = raw.len() as u64;
    Trial {
        outcome: TrialOutcome {
            trial_index,
            theta,
            alpha,
            raw_size,
            ap_count,
            final_size: set.len() as u64,
            score: raw_size as i64 - ap_count as i64,
            weighted_score: 2.0 / 3.0 * raw_size as f64 - ap_count as f64,
        },
        set,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeFloor {
    /// `N vol(S) / 6`
    pub floor: f64,
    /// `sqrt(d) 2^-d N^(1 - 2/d)`, constant taken as 1.
    pub shape_term: f64,
}

pub fn size_floor(n: u64, d: usize, vol_s: f64) -> SizeFloor {
    let nf = n as f64;
    let df = d as f64;
    SizeFloor {
        floor: nf * vol_s / 6.0,
        shape_term: df.sqrt() * 2f64.powf(-df) * nf.powf(1.0 - 2.0 / df),
    }
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub params: ConstructionParams,
    /// Certified progression-free.
    pub set: CandidateSet,
    pub best: TrialOutcome,
    pub outcomes: Vec<TrialOutcome>,
    pub volume: VolumeEstimate,
    pub floor: SizeFloor,
}

/// Runs every trial and keeps the largest surviving set (earliest trial
/// among ties). The result is certified before it is returned.
pub fn construct(params: &ConstructionParams) -> Result<Construction> {
    let trials: Vec<Trial> = (0..params.trials)
        .into_par_iter()
        .map(|i| run_trial(params, i))
        .collect();
    let best = trials
        .iter()
        .max_by(|x, y| {
            x.outcome
                .final_size
                .cmp(&y.outcome.final_size)
                .then(y.outcome.trial_index.cmp(&x.outcome.trial_index))
        })
        .expect("at least one trial");
    let mut set = best.set.clone();
    if !apcore::verify_ap_free(&mut set) {
        let witness = apcore::first_3ap(&set).map(|t| t.to_string()).unwrap_or_default();
        return Err(Error::CertificationFailed(format!(
            "trial {} left progression {witness}",
            best.outcome.trial_index
        )));
    }
    let volume = geometry::estimate_annulus_volume(&params.spec, VOLUME_SAMPLES, params.master_seed)?;
    let floor = size_floor(params.n_limit, params.d, volume.mean);
    Ok(Construction {
        params: params.clone(),
        set,
        best: best.outcome.clone(),
        outcomes: trials.into_iter().map(|t| t.outcome).collect(),
        volume,
        floor,
    })
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl MeanEstimate {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationAudit {
    pub trials: u64,
    pub mean_raw_size: MeanEstimate,
    pub mean_ap_count: MeanEstimate,
    /// Mean of `(2/3)|A| - T(A)`.
    pub mean_weighted_score: MeanEstimate,
    pub vol_s_estimate: VolumeEstimate,
    /// `mean((2/3)|A| - T(A)) / ((1/3) N vol(S))`
    pub score_ratio: f64,
    pub ratio_std_error: f64,
}

impl ExpectationAudit {
    /// Standard error of `mean_raw_size - N vol(S)`, combining both estimates.
    pub fn combined_raw_std_error(&self, n: u64) -> f64 {
        let vol_term = n as f64 * self.vol_s_estimate.std_error;
        (self.mean_raw_size.std_error.powi(2) + vol_term * vol_term).sqrt()
    }

    pub fn raw_size_deviation(&self, n: u64) -> f64 {
        self.mean_raw_size.mean - n as f64 * self.vol_s_estimate.mean
    }
}

/// Monte Carlo means of `|A|` and `T(A)` over `trials` random `(theta, alpha)`,
/// compared against an independent estimate of `vol(S)`.
pub fn expectation_audit(params: &ConstructionParams, trials: u64) -> Result<ExpectationAudit> {
    if trials < 2 {
        return Err(invalid("the audit needs at least two trials"));
    }
    if trials < 100 {
        log::warn!("expectation_audit: {trials} trials is fewer than the recommended 100");
    }
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (_, _, raw, t) = raw_trial(params, i);
            (raw.len() as f64, t as f64)
        })
        .collect();
    let raw: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let aps: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let weighted: Vec<f64> = samples.iter().map(|(r, t)| 2.0 / 3.0 * r - t).collect();
    let vol = geometry::estimate_annulus_volume(&params.spec, VOLUME_SAMPLES, params.master_seed)?;
    let weighted = MeanEstimate::of(&weighted);
    let rhs = params.n_limit as f64 * vol.mean / 3.0;
    Ok(ExpectationAudit {
        trials,
        mean_raw_size: MeanEstimate::of(&raw),
        mean_ap_count: MeanEstimate::of(&aps),
        mean_weighted_score: weighted,
        vol_s_estimate: vol,
        score_ratio: weighted.mean / rhs,
        ratio_std_error: weighted.std_error / rhs,
    })
}

/// Random points of the annulus, for probing.
pub fn sample_annulus_point<R: Rng + ?Sized>(spec: &AnnulusSpec, rng: &mut R) -> Vec<f64> {
    let mut p = vec![0.0; spec.d()];
    loop {
        for c in p.iter_mut() {
            *c = 0.5 * rng.random::<f64>();
        }
        if spec.contains_coords(&p) {
            return p;
        }
    }
}
