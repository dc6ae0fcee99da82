//! Shared workloads for the solver benchmarks.

use quasidense::{parse, Formula, KLSpec};

/// `(name, formula, KL)` triples, cheapest first.
pub const WORKLOADS: [(&str, &str, &str); 5] = [
    ("diamond", "<>p", "1:2"),
    ("density_unsat", "<>p & [][]~p", "1:2"),
    ("branching", "<>(p & <>q) & <>(~p & <>q)", "1:2"),
    ("nested", "<>(p & <>q) & []<>~q", "1:2,2:4"),
    ("deep", "<><>(p & <>~p) & [](p | q)", "2:3"),
];

pub fn workload(formula: &str, kl: &str) -> (Formula, KLSpec) {
    (
        parse(formula).expect("workload formula parses"),
        kl.parse().expect("workload KL parses"),
    )
}
