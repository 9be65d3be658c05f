//! Exact integer-side machinery for 3-term arithmetic progressions.
//!
//! A 3AP is a triple `a < b < c` with `a + c = 2b`. Everything here uses
//! integer arithmetic only; floating point never decides whether a set is
//! progression-free.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SetError};
use crate::geometry::{AnnulusSpec, TorusPoint};

/// A sorted, duplicate-free subset of `{1, ..., n_limit}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    n_limit: u64,
    elements: Vec<u64>,
    certified_ap_free: bool,
}

impl CandidateSet {
    pub fn new(n_limit: u64, elements: Vec<u64>) -> std::result::Result<Self, SetError> {
        let mut previous = 0;
        for &value in &elements {
            if value == 0 || value > n_limit {
                return Err(SetError::OutOfRange { value, n_limit });
            }
            if value == previous {
                return Err(SetError::Duplicate { value });
            }
            if value < previous {
                return Err(SetError::Unsorted { previous, value });
            }
            previous = value;
        }
        Ok(Self {
            n_limit,
            elements,
            certified_ap_free: false,
        })
    }

    pub fn full(n_limit: u64) -> Self {
        Self {
            n_limit,
            elements: (1..=n_limit).collect(),
            certified_ap_free: false,
        }
    }

    pub fn empty(n_limit: u64) -> Self {
        Self {
            n_limit,
            elements: Vec::new(),
            certified_ap_free: false,
        }
    }

    pub fn n_limit(&self) -> u64 {
        self.n_limit
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<u64> {
        self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, value: u64) -> bool {
        self.elements.binary_search(&value).is_ok()
    }

    pub fn is_certified(&self) -> bool {
        self.certified_ap_free
    }

    /// Characteristic vector, bit `v` set iff `v` is an element.
    pub fn indicator(&self) -> BitSet {
        let mut bits = BitSet::new(self.n_limit as usize + 1);
        for &v in &self.elements {
            bits.insert(v as usize);
        }
        bits
    }
}

/// A fixed-size bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// The 64 bits starting at position `pos` (bits past the end read as 0).
    #[inline]
    fn window(&self, pos: usize) -> u64 {
        let (w, s) = (pos / 64, pos % 64);
        let lo = self.words.get(w).copied().unwrap_or(0);
        if s == 0 {
            lo
        } else {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            (lo >> s) | (hi << (64 - s))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ApTriple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl ApTriple {
    pub fn new(a: u64, b: u64, c: u64) -> Option<Self> {
        (a < b && b < c && a + c == 2 * b).then_some(Self { a, b, c })
    }
}

impl fmt::Display for ApTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Number of 3APs in `s`, choosing whichever exact path is cheaper.
pub fn count_3aps(s: &CandidateSet) -> u64 {
    let k = s.len() as f64;
    let bits = s.indicator();
    let nonzero = bits.words.iter().filter(|&&w| w != 0).count() as f64;
    if nonzero * (s.n_limit as f64) < k * k {
        count_3aps_bitset_with(&bits)
    } else {
        count_3aps_naive(s)
    }
}

/// Bit-parallel count: for each common difference `g`, AND the characteristic
/// vector with its shifts by `g` and `2g` and count the surviving bits.
///
/// Only words of the base vector that hold at least one element are visited,
/// so the cost is `O(nonzero_words * N)` word operations.
pub fn count_3aps_bitset(s: &CandidateSet) -> u64 {
    count_3aps_bitset_with(&s.indicator())
}

fn count_3aps_bitset_with(bits: &BitSet) -> u64 {
    let n = bits.len().saturating_sub(1);
    let occupied: Vec<usize> = bits
        .words
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0)
        .map(|(i, _)| i)
        .collect();
    occupied
        .par_iter()
        .map(|&wi| {
            let base = bits.words[wi];
            let start = wi * 64;
            let max_gap = n.saturating_sub(start) / 2;
            let mut total = 0u64;
            for g in 1..=max_gap {
                let hits = base & bits.window(start + g) & bits.window(start + 2 * g);
                total += u64::from(hits.count_ones());
            }
            total
        })
        .sum()
}

/// Reference count over pairs of endpoints, using binary search for the
/// midpoint. Independent of the bitset machinery.
pub fn count_3aps_naive(s: &CandidateSet) -> u64 {
    let e = &s.elements;
    let mut total = 0;
    for (i, &a) in e.iter().enumerate() {
        for &c in &e[i + 1..] {
            if (a + c) % 2 == 0 && e.binary_search(&((a + c) / 2)).is_ok() {
                total += 1;
            }
        }
    }
    total
}

/// Number of 3APs in the full interval `{1, ..., n}`: `sum_{g >= 1} max(0, n - 2g)`.
pub fn full_interval_3ap_count(n: u64) -> u64 {
    let m = n.saturating_sub(1) / 2;
    m * n - m * (m + 1)
}

/// Up to `cap` progressions of `s`, in lexicographic order of `(a, b, c)`.
pub fn enumerate_3aps(s: &CandidateSet, cap: usize) -> Vec<ApTriple> {
    let e = &s.elements;
    let mut out = Vec::new();
    if cap == 0 {
        return out;
    }
    for (i, &a) in e.iter().enumerate() {
        for &b in &e[i + 1..] {
            let c = 2 * b - a;
            if c > s.n_limit {
                break;
            }
            if e.binary_search(&c).is_ok() {
                out.push(ApTriple { a, b, c });
                if out.len() == cap {
                    return out;
                }
            }
        }
    }
    out
}

pub fn first_3ap(s: &CandidateSet) -> Option<ApTriple> {
    enumerate_3aps(s, 1).pop()
}

/// Exact check; records the outcome in `s`.
pub fn verify_ap_free(s: &mut CandidateSet) -> bool {
    let free = count_3aps(s) == 0;
    s.certified_ap_free = free;
    free
}

/// Deletes elements until no progression survives. Each step removes the
/// element lying on the most surviving progressions, smallest element first
/// among ties. The result is certified.
pub fn greedy_delete_to_ap_free(s: &CandidateSet) -> CandidateSet {
    let e = &s.elements;
    let k = e.len();
    let mut alive = vec![true; k];
    let mut degree = vec![0u64; k];
    let index_of = |v: u64| e.binary_search(&v).ok();

    for i in 0..k {
        for j in i + 1..k {
            let (a, c) = (e[i], e[j]);
            if (a + c) % 2 == 0 {
                if let Some(m) = index_of((a + c) / 2) {
                    degree[i] += 1;
                    degree[j] += 1;
                    degree[m] += 1;
                }
            }
        }
    }

    loop {
        let mut victim = None;
        let mut best = 0;
        for (i, &deg) in degree.iter().enumerate() {
            if deg > best {
                best = deg;
                victim = Some(i);
            }
        }
        let Some(x) = victim else { break };
        let xv = e[x];
        let live = |v: u64| index_of(v).filter(|&i| alive[i]);
        for y in (0..k).filter(|&y| y != x && alive[y]) {
            let yv = e[y];
            // x smallest, y middle
            if yv > xv {
                if let Some(z) = live(2 * yv - xv) {
                    degree[y] -= 1;
                    degree[z] -= 1;
                }
            } else {
                // x largest, y middle
                if 2 * yv > xv {
                    if let Some(z) = live(2 * yv - xv) {
                        degree[y] -= 1;
                        degree[z] -= 1;
                    }
                }
                // x middle, y smallest
                if let Some(z) = live(2 * xv - yv) {
                    degree[y] -= 1;
                    degree[z] -= 1;
                }
            }
        }
        alive[x] = false;
        degree[x] = 0;
    }

    let elements = e.iter().zip(&alive).filter(|(_, &a)| a).map(|(&v, _)| v).collect();
    let mut out = CandidateSet {
        n_limit: s.n_limit,
        elements,
        certified_ap_free: false,
    };
    verify_ap_free(&mut out);
    out
}

/// Checks `|y| <= sqrt(2 * delta * r)` for a progression `x - y, x, x + y`
/// lying in the annulus.
///
/// `y` is a torus displacement; each coordinate is lifted to its
/// representative in `(-1/2, 1/2]` before forming `x - y` and `x + y` as real
/// vectors. If any of the three points misses the annulus (with no wraparound)
/// the precondition error is returned instead of a verdict.
pub fn check_difference_norm_bound(x: &TorusPoint, y: &TorusPoint, spec: &AnnulusSpec) -> Result<bool> {
    for p in [x, y] {
        if p.dim() != spec.d() {
            return Err(Error::DimensionMismatch {
                expected: spec.d(),
                found: p.dim(),
            });
        }
    }
    let lifted: Vec<f64> = y
        .coords()
        .iter()
        .map(|&c| if c > 0.5 { c - 1.0 } else { c })
        .collect();
    difference_norm_bound_real(x.coords(), &lifted, spec)
}

/// Real-vector form of [`check_difference_norm_bound`].
pub fn difference_norm_bound_real(x: &[f64], y: &[f64], spec: &AnnulusSpec) -> Result<bool> {
    let minus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let plus: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    for (name, p) in [("x - y", &minus[..]), ("x", x), ("x + y", &plus[..])] {
        if !spec.contains_coords(p) {
            return Err(Error::Precondition(format!("{name} is not in the annulus")));
        }
    }
    let y_norm = crate::geometry::norm(y);
    Ok(y_norm <= (2.0 * spec.delta() * spec.r()).sqrt())
}
