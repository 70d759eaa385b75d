// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Exhaustive enumeration of every feasible assignment. Oracle only.

use alloc::vec;
use alloc::vec::Vec;

use super::{Method, Optimality, SolveResult, SolveStats};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

pub fn solve_brute_force(inst: &Instance) -> Result<SolveResult> {
    solve_brute_force_with_budget(inst, DEFAULT_NODE_BUDGET)
}

struct Search<'a> {
    inst: &'a Instance,
    budget: u64,
    nodes: u64,
    item_taken: Vec<bool>,
    counts: Vec<usize>,
    current: Vec<(usize, usize)>,
    best_value: f64,
    best: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn visit(&mut self, agent: usize, value: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded { budget: self.budget });
        }
        let inst = self.inst;
        if agent == inst.n() {
            if value > self.best_value
                || (value == self.best_value && self.current < self.best)
            {
                self.best_value = value;
                self.best.clone_from(&self.current);
            }
            return Ok(());
        }
        let p = inst.agent_type(agent);
        let l = inst.l();
        for j in 0..inst.m() {
            let q = inst.item_block(j);
            if self.item_taken[j] || self.counts[p * l + q] >= inst.capacity(p, q) {
                continue;
            }
            self.item_taken[j] = true;
            self.counts[p * l + q] += 1;
            self.current.push((agent, j));
            self.visit(agent + 1, value + inst.utility(agent, j))?;
            self.current.pop();
            self.counts[p * l + q] -= 1;
            self.item_taken[j] = false;
        }
        self.visit(agent + 1, value)
    }
}

/// Maximum-welfare feasible assignment by enumerating all of them. Among
/// optimal assignments the lexicographically smallest pair list wins.
/// Fails once more than `budget` search nodes have been visited.
pub fn solve_brute_force_with_budget(inst: &Instance, budget: u64) -> Result<SolveResult> {
    let mut search = Search {
        inst,
        budget,
        nodes: 0,
        item_taken: vec![false; inst.m()],
        counts: vec![0; inst.k() * inst.l()],
        current: Vec::new(),
        best_value: f64::NEG_INFINITY,
        best: Vec::new(),
    };
    search.visit(0, 0.0)?;
    let stats = SolveStats {
        nodes: search.nodes,
        ..SolveStats::default()
    };
    SolveResult::new(
        inst,
        Method::Brute,
        Assignment::from_pairs(search.best),
        Optimality::Oracle,
        stats,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        let inst = Instance::new(vec![1], vec![1], vec![7.0], vec![1]).unwrap();
        let r = solve_brute_force(&inst).unwrap();
        assert_eq!(r.objective, 7.0);
        assert_eq!(r.assignment.pairs(), &[(0, 0)]);
    }

    #[test]
    fn zero_capacity_forbids_the_only_pair() {
        let inst = Instance::new(vec![1], vec![1], vec![7.0], vec![0]).unwrap();
        let r = solve_brute_force(&inst).unwrap();
        assert_eq!(r.objective, 0.0);
        assert!(r.assignment.is_empty());
    }

    #[test]
    fn one_agent_per_type_under_unit_caps() {
        let inst = Instance::new(vec![2, 2], vec![2], vec![1.0; 8], vec![1, 1]).unwrap();
        let r = solve_brute_force(&inst).unwrap();
        assert_eq!(r.objective, 2.0);
        // lexicographically smallest optimum
        assert_eq!(r.assignment.pairs(), &[(0, 0), (2, 1)]);
        r.verify(&inst).unwrap();
    }

    #[test]
    fn budget_is_enforced() {
        let inst = Instance::new(vec![5], vec![5], vec![1.0; 25], vec![5]).unwrap();
        assert_eq!(
            solve_brute_force_with_budget(&inst, 100).unwrap_err(),
            Error::BudgetExceeded { budget: 100 }
        );
    }
}
