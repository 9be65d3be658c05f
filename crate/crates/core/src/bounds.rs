//! Evaluable forms of the Behrend and Elkin lower bounds on `r3(N)`.
//!
//! Both bounds hide an absolute constant and leave the base of the logarithm
//! in the `log^(1/4) N` factor open. Here the constant is 1 and that
//! logarithm is natural; `2^(2 sqrt(2) sqrt(log2 N))` keeps its base 2.
//! Only ratios against these values are meaningful.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

fn check(n: u64) -> Result<f64> {
    if n < 8 {
        return Err(invalid(format!("bounds are evaluated for N >= 8, got {n}")));
    }
    Ok(n as f64)
}

/// `N / 2^(2 sqrt(2) sqrt(log2 N))`, the factor shared by both bounds.
fn core_term(n: f64) -> f64 {
    n / 2f64.powf(2.0 * 2f64.sqrt() * n.log2().sqrt())
}

/// `N / (2^(2 sqrt(2) sqrt(log2 N)) (ln N)^(1/4))`
pub fn behrend_bound(n: u64) -> Result<f64> {
    let n = check(n)?;
    Ok(core_term(n) / n.ln().powf(0.25))
}

/// `N (ln N)^(1/4) / 2^(2 sqrt(2) sqrt(log2 N))`
pub fn elkin_bound(n: u64) -> Result<f64> {
    let n = check(n)?;
    Ok(core_term(n) * n.ln().powf(0.25))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_limit: u64,
    pub behrend_value: f64,
    pub elkin_value: f64,
    pub construction_size: u64,
    pub ratio_to_behrend: f64,
    pub ratio_to_elkin: f64,
}

pub fn bound_report(n: u64, construction_size: u64) -> Result<BoundReport> {
    let behrend_value = behrend_bound(n)?;
    let elkin_value = elkin_bound(n)?;
    Ok(BoundReport {
        n_limit: n,
        behrend_value,
        elkin_value,
        construction_size,
        ratio_to_behrend: construction_size as f64 / behrend_value,
        ratio_to_elkin: construction_size as f64 / elkin_value,
    })
}
