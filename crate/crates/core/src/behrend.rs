//! Behrend's digit-sphere construction, used as the comparison baseline.
//!
//! Integers whose base-`2m` digits all lie in `{0, ..., m-1}` add without
//! carries, so a progression among them is a progression of digit vectors.
//! Vectors on one sphere `sum d_i^2 = shell` contain no such progression by
//! strict convexity. The shell holding the most integers `<= N` is kept.

use serde::{Deserialize, Serialize};

use crate::apcore::{self, CandidateSet};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BehrendParams {
    pub n_limit: u64,
    /// Base `q = 2m`.
    pub base: u64,
    /// Digit count `k`.
    pub digits: u32,
    /// Alphabet size `m`; digits range over `0..m`.
    pub alphabet: u64,
    /// Sum of squared digits of every member.
    pub shell: u64,
}

#[derive(Debug, Clone)]
pub struct BehrendOutput {
    pub params: BehrendParams,
    /// Certified progression-free.
    pub set: CandidateSet,
}

/// `m = ceil(N^(1/k) / 2)`.
pub fn alphabet_for(n: u64, k: u32) -> u64 {
    ((n as f64).powf(1.0 / k as f64) / 2.0).ceil().max(1.0) as u64
}

/// Shell occupancy for `k` digits: entry `s` counts integers `v + 1 <= N`
/// whose digit vector (alphabet `m`, base `2m`) has squared norm `s`.
pub fn shell_histogram(n: u64, k: u32) -> (u64, Vec<u64>) {
    let m = alphabet_for(n, k);
    let mut hist = vec![0u64; k as usize * ((m - 1) * (m - 1)) as usize + 1];
    for_each_member(n, k, m, |_, s| hist[s as usize] += 1);
    (m, hist)
}

/// Visits `(v + 1, shell)` for every digit vector in `{0..m}^k` with `v + 1 <= N`.
fn for_each_member(n: u64, k: u32, m: u64, mut visit: impl FnMut(u64, u64)) {
    let q = 2 * m;
    let mut digits = vec![0u64; k as usize];
    loop {
        let mut value: u128 = 0;
        let mut shell = 0;
        for &dg in digits.iter().rev() {
            value = value * q as u128 + dg as u128;
            shell += dg * dg;
        }
        if value < n as u128 {
            visit(value as u64 + 1, shell);
        }
        // odometer over the alphabet
        let mut i = 0;
        loop {
            if i == digits.len() {
                return;
            }
            digits[i] += 1;
            if digits[i] < m {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// The best shell (most members, smallest shell among ties, shell >= 1) for
/// a fixed digit count, or `None` when no nonzero shell is populated.
pub fn behrend_with_digits(n: u64, k: u32) -> Option<BehrendOutput> {
    if k == 0 {
        return None;
    }
    let (m, hist) = shell_histogram(n, k);
    if m < 2 {
        return None;
    }
    let (shell, &count) = hist
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, &0), |best, cur| if cur.1 > best.1 { cur } else { best });
    if count == 0 {
        return None;
    }
    let shell = shell as u64;
    let mut elements = Vec::with_capacity(count as usize);
    for_each_member(n, k, m, |v, s| {
        if s == shell {
            elements.push(v);
        }
    });
    elements.sort_unstable();
    let set = CandidateSet::new(n, elements).expect("members lie in [1, N]");
    Some(BehrendOutput {
        params: BehrendParams {
            n_limit: n,
            base: 2 * m,
            digits: k,
            alphabet: m,
            shell,
        },
        set,
    })
}

/// Tries `k = round(sqrt(log2 N))` and its neighbours and keeps the largest
/// set (smallest `k` among ties). The result is certified.
pub fn behrend_construct(n: u64) -> Result<BehrendOutput> {
    if n < 4 {
        return Err(invalid(format!("N = {n} is too small; need N >= 4")));
    }
    let k0 = (n as f64).log2().sqrt().round().max(1.0) as u32;
    let mut best: Option<BehrendOutput> = None;
    for k in k0.saturating_sub(1).max(1)..=k0 + 1 {
        if let Some(out) = behrend_with_digits(n, k) {
            if best.as_ref().is_none_or(|b| out.set.len() > b.set.len()) {
                best = Some(out);
            }
        }
    }
    let mut best = best.ok_or_else(|| invalid(format!("no Behrend shell is populated for N = {n}")))?;
    if !apcore::verify_ap_free(&mut best.set) {
        return Err(Error::CertificationFailed(format!(
            "Behrend shell {} contains a progression",
            best.params.shell
        )));
    }
    Ok(best)
}
