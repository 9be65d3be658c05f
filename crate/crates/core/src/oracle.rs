//! Exact `r3(N)`, the largest progression-free subset of `{1, ..., N}`, by
//! branch and bound. Only practical for small `N` (roughly 50 and below).

use serde::{Deserialize, Serialize};

use crate::apcore::{self, CandidateSet};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
/// Largest `N` accepted by [`naive_r3`].
pub const NAIVE_LIMIT: u64 = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub n_limit: u64,
    pub r3: usize,
    /// Lexicographically smallest optimal set.
    pub witness: CandidateSet,
    pub nodes_explored: u64,
}

struct Search<'a> {
    n: usize,
    /// `bound[len]` is an upper bound on r3(len) for every `len <= n`.
    bound: &'a [usize],
    forbidden: Vec<u32>,
    chosen: Vec<usize>,
    best: usize,
    witness: Option<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Decides elements `e..=n` in increasing order, include branch first.
    fn dfs(&mut self, e: usize) -> std::result::Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if e > self.n {
            if self.chosen.len() > self.best {
                self.best = self.chosen.len();
                self.witness = Some(self.chosen.clone());
            }
            return Ok(());
        }
        // the undecided tail {e..=n} is an interval of length n - e + 1
        if self.chosen.len() + self.bound[self.n - e + 1] <= self.best {
            return Ok(());
        }
        if self.forbidden[e] == 0 {
            let limit = self.n;
            for &a in &self.chosen {
                let c = 2 * e - a;
                if c <= limit {
                    self.forbidden[c] += 1;
                }
            }
            self.chosen.push(e);
            let res = self.dfs(e + 1);
            self.chosen.pop();
            for &a in &self.chosen {
                let c = 2 * e - a;
                if c <= limit {
                    self.forbidden[c] -= 1;
                }
            }
            res?;
        }
        self.dfs(e + 1)
    }
}

/// Exact `r3(N)` with a lexicographically smallest witness.
///
/// Values for every shorter interval are computed first and serve as the
/// pruning bound for undecided tails. The incumbent starts from greedy
/// deletion on `{1..N}`. `node_budget` caps the total search across all
/// lengths; exhausting it is an error, never a partial answer.
pub fn exact_r3(n: u64, node_budget: u64) -> Result<OracleResult> {
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let n = n as usize;
    let mut bound = vec![0usize; n + 1];
    let mut nodes = 0u64;
    let mut witness = Vec::new();
    for len in 1..=n {
        bound[len] = bound[len - 1] + 1;
        let greedy = apcore::greedy_delete_to_ap_free(&CandidateSet::full(len as u64)).len();
        let mut search = Search {
            n: len,
            bound: &bound,
            forbidden: vec![0; 2 * len + 2],
            chosen: Vec::with_capacity(len),
            best: greedy - 1,
            witness: None,
            nodes: 0,
            budget: node_budget - nodes,
        };
        let outcome = search.dfs(1);
        let Search {
            best,
            witness: found,
            nodes: used,
            ..
        } = search;
        nodes += used.min(node_budget - nodes);
        if outcome.is_err() {
            return Err(Error::BudgetExhausted {
                budget: node_budget,
                best: best.max(greedy),
            });
        }
        bound[len] = best;
        witness = found.expect("a set at least as large as the greedy one exists");
    }
    let elements = witness.into_iter().map(|v| v as u64).collect();
    let mut witness = CandidateSet::new(n as u64, elements)?;
    if !apcore::verify_ap_free(&mut witness) {
        return Err(Error::CertificationFailed("oracle witness has a progression".into()));
    }
    Ok(OracleResult {
        n_limit: n as u64,
        r3: bound[n],
        witness,
        nodes_explored: nodes,
    })
}

fn mask_is_ap_free(mask: u32, n: u64) -> bool {
    (1..=(n.saturating_sub(1) / 2) as u32).all(|g| mask & (mask >> g) & (mask >> (2 * g)) == 0)
}

/// Brute force over all `2^N` subsets. Test-grade cross-check for [`exact_r3`].
pub fn naive_r3(n: u64) -> Result<usize> {
    if n > NAIVE_LIMIT {
        return Err(invalid(format!("naive enumeration is limited to N <= {NAIVE_LIMIT}")));
    }
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size > best && mask_is_ap_free(mask, n) {
            best = size;
        }
    }
    Ok(best)
}
