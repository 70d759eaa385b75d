// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! `OPT(u)`: maximum-weight matching with the type-block caps dropped,
//! solved as a min-cost flow `s → agent → item → t` with costs `-u(i, j)`.

use alloc::vec::Vec;

use super::{Method, Optimality, SolveResult, SolveStats};
use crate::error::Result;
use crate::flow::{FlowNetwork, Halting};
use crate::model::{Assignment, Instance};

pub fn solve_unconstrained(inst: &Instance) -> Result<SolveResult> {
    let (n, m) = (inst.n(), inst.m());
    let mut g = FlowNetwork::new();
    let s = g.add_node(0);
    let agents: Vec<usize> = (0..n).map(|_| g.add_node(1)).collect();
    let items: Vec<usize> = (0..m).map(|_| g.add_node(2)).collect();
    let t = g.add_node(3);
    g.set_terminals(s, t);
    for &a in &agents {
        g.add_arc(s, a, 1, 0.0);
    }
    let mut pair_arcs = Vec::new();
    for i in 0..n {
        for (j, &u) in inst.row(i).iter().enumerate() {
            // zero-utility pairs can never make a path negative
            if u > 0.0 {
                pair_arcs.push((g.add_arc(agents[i], items[j], 1, -u), i, j));
            }
        }
    }
    for &c in &items {
        g.add_arc(c, t, 1, 0.0);
    }
    let summary = g.successive_shortest_paths(Halting::NonNegativePath);
    let pairs = pair_arcs
        .into_iter()
        .filter(|&(a, _, _)| g.arc(a).flow == 1)
        .map(|(_, i, j)| (i, j))
        .collect();
    let stats = SolveStats {
        augmentations: summary.augmentations,
        ..SolveStats::default()
    };
    SolveResult::new(
        inst,
        Method::Unconstrained,
        Assignment::from_pairs(pairs),
        Optimality::Exact,
        stats,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn diagonal_utilities() {
        let n = 5;
        let mut u = vec![0.0; n * n];
        for i in 0..n {
            u[i * n + i] = 1.0;
        }
        let inst = Instance::new(vec![n], vec![n], u, vec![0]).unwrap();
        assert_eq!(solve_unconstrained(&inst).unwrap().objective, n as f64);
    }

    #[test]
    fn single_agent_takes_row_max() {
        let inst = Instance::new(vec![1], vec![3], vec![2.0, 6.0, 3.0], vec![0]).unwrap();
        let r = solve_unconstrained(&inst).unwrap();
        assert_eq!(r.objective, 6.0);
        assert_eq!(r.assignment.pairs(), &[(0, 1)]);
    }
}
