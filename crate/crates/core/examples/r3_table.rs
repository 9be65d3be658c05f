//! Prints exact r3(N) for N = 1..=40 with the lexicographically smallest witness.

use progfree::oracle::{exact_r3, DEFAULT_NODE_BUDGET};

fn main() {
    for n in 1..=40u64 {
        let result = exact_r3(n, DEFAULT_NODE_BUDGET).expect("small N fits the budget");
        println!("{n:>3} {:>3} {:?}", result.r3, result.witness.elements());
    }
}
