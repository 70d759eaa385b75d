// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Greedy over pairs in nonincreasing utility.
//!
//! Feasible assignments are the common independent sets of three partition
//! matroids (one item per agent, one agent per item, `λ_pq` pairs per
//! type-block class), so the greedy solution is within a factor 3 of optimal.

use alloc::vec;
use alloc::vec::Vec;

use super::{Method, Optimality, SolveResult, SolveStats};
use crate::error::Result;
use crate::model::{Assignment, Instance};

pub const GREEDY_RATIO: f64 = 1.0 / 3.0;

pub fn solve_greedy(inst: &Instance) -> Result<SolveResult> {
    let (n, m, l) = (inst.n(), inst.m(), inst.l());
    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            order.push((i, j));
        }
    }
    // stable sort keeps (i, j) lexicographic order among equal utilities
    order.sort_by(|&(a, b), &(c, d)| inst.utility(c, d).total_cmp(&inst.utility(a, b)));

    let mut agent_done = vec![false; n];
    let mut item_done = vec![false; m];
    let mut counts = vec![0usize; inst.k() * l];
    let mut pairs = Vec::new();
    for (i, j) in order {
        if agent_done[i] || item_done[j] {
            continue;
        }
        let cell = inst.agent_type(i) * l + inst.item_block(j);
        if counts[cell] >= inst.capacities()[cell] {
            continue;
        }
        agent_done[i] = true;
        item_done[j] = true;
        counts[cell] += 1;
        pairs.push((i, j));
        if pairs.len() == n.min(m) {
            break;
        }
    }
    SolveResult::new(
        inst,
        Method::Greedy,
        Assignment::from_pairs(pairs),
        Optimality::Heuristic {
            ratio: Some(GREEDY_RATIO),
        },
        SolveStats::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optimal_on_diagonal_utilities() {
        let n = 4;
        let mut u = vec![0.0; n * n];
        for i in 0..n {
            u[i * n + i] = (i + 1) as f64;
        }
        let inst = Instance::new(vec![n], vec![n], u, vec![n]).unwrap();
        let r = solve_greedy(&inst).unwrap();
        assert_eq!(r.objective, 10.0);
        assert_eq!(r.optimality, Optimality::Heuristic { ratio: Some(1.0 / 3.0) });
    }

    #[test]
    fn ties_fall_back_to_index_order() {
        let inst = Instance::new(vec![2], vec![2], vec![1.0; 4], vec![2]).unwrap();
        let r = solve_greedy(&inst).unwrap();
        assert_eq!(r.assignment.pairs(), &[(0, 0), (1, 1)]);
    }
}
