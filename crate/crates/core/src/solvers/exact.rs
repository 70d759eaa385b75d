// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Depth-first branch-and-bound.
//!
//! Agents are branched in order of descending best utility. A node fixes
//! the items of a prefix of that order; its children assign the next agent
//! to each free item whose type-block cell still has room, then leave the
//! agent unassigned.
//!
//! The bound at a node is the accumulated welfare plus a maximum-weight
//! matching of the remaining agents to the free items, where pairs in full
//! cells are excluded and each cell `(p, q)` carries a nonnegative penalty
//! `μ_pq` refunded as `μ_pq · residual_pq`. With `μ = 0` this is the plain
//! unconstrained matching bound; a few subgradient steps per node tighten
//! it when the type-block caps bind. The matching dual also gives every
//! child an upper bound for free, so most children are discarded before
//! any matching is solved for them.

use alloc::vec;
use alloc::vec::Vec;

use super::{solve_greedy, Method, Optimality, SolveResult, SolveStats};
use crate::assignment::{max_weight_matching, MatchingSolution};
use crate::error::Result;
use crate::model::{Assignment, Instance};

/// Settings for [`solve_exact_with`].
#[derive(Clone, Copy)]
pub struct ExactConfig<'a> {
    /// Stop after this many nodes and return the incumbent.
    pub node_limit: Option<u64>,
    /// Subgradient steps at the root.
    pub root_iterations: usize,
    /// Subgradient steps at other nodes (warm-started from the parent).
    pub node_iterations: usize,
    /// Polled once per node; returning `true` stops the search.
    pub stop: Option<&'a dyn Fn() -> bool>,
    /// Prune nodes whose bound is within this fraction of the incumbent.
    /// Zero proves optimality; a positive value proves the result is at
    /// least `1 / (1 + rel_gap)` of the optimum.
    pub rel_gap: f64,
}

impl Default for ExactConfig<'_> {
    fn default() -> Self {
        Self {
            node_limit: None,
            root_iterations: 60,
            node_iterations: 10,
            stop: None,
            rel_gap: 0.0,
        }
    }
}

impl core::fmt::Debug for ExactConfig<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ExactConfig")
            .field("node_limit", &self.node_limit)
            .field("root_iterations", &self.root_iterations)
            .field("node_iterations", &self.node_iterations)
            .field("stop", &self.stop.is_some())
            .field("rel_gap", &self.rel_gap)
            .finish()
    }
}

pub fn solve_exact(inst: &Instance) -> Result<SolveResult> {
    solve_exact_with(inst, &ExactConfig::default())
}

/// Branch-and-bound with explicit settings. When a limit stops the search
/// the incumbent is returned flagged heuristic, with `ratio` set to the
/// incumbent over the root bound.
pub fn solve_exact_with(inst: &Instance, cfg: &ExactConfig<'_>) -> Result<SolveResult> {
    let seed = solve_greedy(inst)?;
    let mut search = Search::new(inst, cfg, seed.objective, seed.assignment.pairs().to_vec());
    let mu = vec![0.0; inst.k() * inst.l()];
    search.node(0, &mu);

    let exhausted = search.stopped;
    let root_bound = search.root_bound;
    let best = search.best;
    let mut stats = search.stats;
    stats.budget_exhausted = exhausted;
    stats.upper_bound = root_bound;
    let optimality = if exhausted {
        let ratio = match root_bound {
            Some(b) if b > 0.0 => Some((best / b).min(1.0)),
            _ => None,
        };
        Optimality::Heuristic { ratio }
    } else if cfg.rel_gap > 0.0 {
        Optimality::Heuristic { ratio: Some(1.0 / (1.0 + cfg.rel_gap)) }
    } else {
        Optimality::Exact
    };
    SolveResult::new(
        inst,
        Method::Exact,
        Assignment::from_pairs(search.best_pairs),
        optimality,
        stats,
    )
}

struct Search<'a, 'c> {
    inst: &'a Instance,
    cfg: &'a ExactConfig<'c>,
    order: Vec<usize>,
    item_used: Vec<bool>,
    counts: Vec<usize>,
    path: Vec<(usize, usize)>,
    acc: f64,
    best: f64,
    best_pairs: Vec<(usize, usize)>,
    eps: f64,
    stats: SolveStats,
    stopped: bool,
    root_bound: Option<f64>,
}

/// Bound data kept from the tightest Lagrangian iteration at a node.
struct NodeBound {
    value: f64,
    mu: Vec<f64>,
    matching: MatchingSolution,
    weights: Vec<f64>,
}

impl<'a, 'c> Search<'a, 'c> {
    fn new(inst: &'a Instance, cfg: &'a ExactConfig<'c>, best: f64, best_pairs: Vec<(usize, usize)>) -> Self {
        let n = inst.n();
        let row_max: Vec<f64> = (0..n)
            .map(|i| inst.row(i).iter().copied().fold(0.0, f64::max))
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| row_max[b].total_cmp(&row_max[a]));
        let umax = row_max.iter().copied().fold(0.0, f64::max);
        Self {
            inst,
            cfg,
            order,
            item_used: vec![false; inst.m()],
            counts: vec![0; inst.k() * inst.l()],
            path: Vec::with_capacity(n),
            acc: 0.0,
            best,
            best_pairs,
            eps: 1e-12 * (1.0 + umax * n.min(inst.m()) as f64),
            stats: SolveStats::default(),
            stopped: false,
            root_bound: None,
        }
    }

    /// Bounds at or below this value cannot improve the incumbent enough.
    fn cutoff(&self) -> f64 {
        self.best + self.eps + self.cfg.rel_gap * self.best.max(0.0)
    }

    fn cell(&self, agent: usize, item: usize) -> usize {
        self.inst.agent_type(agent) * self.inst.l() + self.inst.item_block(item)
    }

    fn open(&self, agent: usize, item: usize) -> bool {
        let c = self.cell(agent, item);
        !self.item_used[item] && self.counts[c] < self.inst.capacities()[c]
    }

    fn offer(&mut self, extra: f64, pairs: &[(usize, usize)]) {
        let value = self.acc + extra;
        if value > self.best {
            self.best = value;
            self.best_pairs.clear();
            self.best_pairs.extend_from_slice(&self.path);
            self.best_pairs.extend_from_slice(pairs);
        }
    }

    fn node(&mut self, depth: usize, parent_mu: &[f64]) {
        if self.stopped {
            return;
        }
        self.stats.nodes += 1;
        let over_budget = self.cfg.node_limit.is_some_and(|lim| self.stats.nodes > lim);
        if over_budget || self.cfg.stop.is_some_and(|f| f()) {
            self.stopped = true;
            return;
        }
        if depth == self.order.len() {
            self.offer(0.0, &[]);
            return;
        }

        let rows = &self.order[depth..];
        let cols: Vec<usize> = (0..self.inst.m()).filter(|&j| !self.item_used[j]).collect();
        let iterations = if depth == 0 {
            self.cfg.root_iterations
        } else {
            self.cfg.node_iterations
        };
        let rows = rows.to_vec();
        let bound = self.bound(&rows, &cols, parent_mu, iterations.max(1));
        if depth == 0 {
            self.root_bound = Some(bound.value);
        }
        if bound.value <= self.cutoff() {
            self.stats.pruned += 1;
            return;
        }

        // children of the first remaining agent, bounded through the dual
        let agent = rows[0];
        let a0 = bound.matching.row_dual[0];
        let matched = bound.matching.row_match[0];
        let mut children: Vec<(f64, usize)> = Vec::new();
        for (c, &item) in cols.iter().enumerate() {
            if !self.open(agent, item) {
                continue;
            }
            let w = bound.weights[c];
            let rc = a0 + bound.matching.col_dual[c] - w;
            let key = if matched == Some(c) { f64::NEG_INFINITY } else { rc };
            children.push((key, c));
        }
        children.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

        for (key, c) in children {
            let item = cols[c];
            let rc = if key == f64::NEG_INFINITY {
                a0 + bound.matching.col_dual[c] - bound.weights[c]
            } else {
                key
            };
            if bound.value - rc <= self.cutoff() {
                self.stats.pruned += 1;
                continue;
            }
            let u = self.inst.utility(agent, item);
            let cell = self.cell(agent, item);
            self.item_used[item] = true;
            self.counts[cell] += 1;
            self.path.push((agent, item));
            let saved = self.acc;
            self.acc += u;
            self.node(depth + 1, &bound.mu);
            self.acc = saved;
            self.path.pop();
            self.counts[cell] -= 1;
            self.item_used[item] = false;
            if self.stopped {
                return;
            }
        }
        if bound.value - a0 <= self.cutoff() {
            self.stats.pruned += 1;
        } else {
            self.node(depth + 1, &bound.mu);
        }
    }

    /// Tightest Lagrangian bound found in `iterations` subgradient steps.
    /// Every matching found is also repaired into a feasible completion and
    /// offered as an incumbent.
    ///
    /// `bound.weights` holds the first row of the penalized weight matrix.
    fn bound(&mut self, rows: &[usize], cols: &[usize], start_mu: &[f64], iterations: usize) -> NodeBound {
        let (k, l) = (self.inst.k(), self.inst.l());
        let caps = self.inst.capacities();
        let residual: Vec<usize> = (0..k * l).map(|c| caps[c] - self.counts[c]).collect();
        let (r, f) = (rows.len(), cols.len());
        let mut base = vec![f64::NEG_INFINITY; r * f];
        let mut cell_of = vec![0usize; r * f];
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                let c = self.cell(i, j);
                cell_of[a * f + b] = c;
                if residual[c] > 0 {
                    base[a * f + b] = self.inst.utility(i, j);
                }
            }
        }

        let mut mu = start_mu.to_vec();
        for (c, m) in mu.iter_mut().enumerate() {
            if residual[c] == 0 {
                *m = 0.0;
            }
        }
        let mut weights = vec![0.0; r * f];
        let mut best: Option<NodeBound> = None;
        let mut theta = 1.0;
        let mut since_improved = 0;
        for _ in 0..iterations {
            for idx in 0..r * f {
                weights[idx] = base[idx] - mu[cell_of[idx]];
            }
            let sol = max_weight_matching(r, f, &weights);
            self.stats.bound_evaluations += 1;
            let refund: f64 = mu.iter().zip(&residual).map(|(m, &res)| m * res as f64).sum();
            let value = self.acc + sol.dual_value().max(sol.value) + refund;

            let mut used = vec![0usize; k * l];
            for (a, m) in sol.row_match.iter().enumerate() {
                if let Some(b) = *m {
                    used[cell_of[a * f + b]] += 1;
                }
            }
            self.repair(rows, cols, &sol, &cell_of, &residual, &used);

            let improved = best.as_ref().is_none_or(|b| value < b.value);
            if improved {
                since_improved = 0;
                best = Some(NodeBound {
                    value,
                    mu: mu.clone(),
                    matching: sol,
                    weights: weights[..f].to_vec(),
                });
            } else {
                since_improved += 1;
                if since_improved >= 2 {
                    theta *= 0.5;
                    since_improved = 0;
                }
            }
            let current = best.as_ref().map_or(value, |b| b.value);
            if current <= self.cutoff() {
                break;
            }

            // subgradient of the bound in μ is residual - used
            let mut g = vec![0.0; k * l];
            let mut norm = 0.0;
            for c in 0..k * l {
                let gc = residual[c] as f64 - used[c] as f64;
                if mu[c] > 0.0 || gc < 0.0 {
                    g[c] = gc;
                    norm += gc * gc;
                }
            }
            if norm == 0.0 {
                break;
            }
            let step = theta * (value - self.best).max(self.eps) / norm;
            for c in 0..k * l {
                if residual[c] > 0 {
                    mu[c] = (mu[c] - step * g[c]).max(0.0);
                }
            }
        }
        best.expect("at least one bound iteration")
    }

    /// Drops the lowest-utility pairs of overfull cells, refills greedily,
    /// and offers the completion.
    fn repair(
        &mut self,
        rows: &[usize],
        cols: &[usize],
        sol: &MatchingSolution,
        cell_of: &[usize],
        residual: &[usize],
        used: &[usize],
    ) {
        let f = cols.len();
        let mut pairs: Vec<(usize, usize)> = sol
            .row_match
            .iter()
            .enumerate()
            .filter_map(|(a, m)| m.map(|b| (a, b)))
            .filter(|&(a, b)| self.inst.utility(rows[a], cols[b]) > 0.0)
            .collect();
        let overfull = used.iter().zip(residual).any(|(u, r)| u > r);
        if overfull {
            pairs.sort_by(|&(a, b), &(c, d)| {
                self.inst
                    .utility(rows[c], cols[d])
                    .total_cmp(&self.inst.utility(rows[a], cols[b]))
                    .then((a, b).cmp(&(c, d)))
            });
            let mut left = residual.to_vec();
            let mut row_taken = vec![false; rows.len()];
            let mut col_taken = vec![false; f];
            pairs.retain(|&(a, b)| {
                let c = cell_of[a * f + b];
                if left[c] == 0 {
                    return false;
                }
                left[c] -= 1;
                row_taken[a] = true;
                col_taken[b] = true;
                true
            });
            let mut extra: Vec<(f64, usize, usize)> = Vec::new();
            for a in 0..rows.len() {
                if row_taken[a] {
                    continue;
                }
                for b in 0..f {
                    let u = self.inst.utility(rows[a], cols[b]);
                    if !col_taken[b] && u > 0.0 && left[cell_of[a * f + b]] > 0 {
                        extra.push((u, a, b));
                    }
                }
            }
            extra.sort_by(|x, y| y.0.total_cmp(&x.0).then((x.1, x.2).cmp(&(y.1, y.2))));
            for (_, a, b) in extra {
                let c = cell_of[a * f + b];
                if row_taken[a] || col_taken[b] || left[c] == 0 {
                    continue;
                }
                row_taken[a] = true;
                col_taken[b] = true;
                left[c] -= 1;
                pairs.push((a, b));
            }
        }
        let mapped: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (rows[a], cols[b])).collect();
        let extra: f64 = mapped.iter().map(|&(i, j)| self.inst.utility(i, j)).sum();
        self.offer(extra, &mapped);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{solve_brute_force, solve_unconstrained};

    fn lcg(seed: &mut u64) -> u64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        *seed >> 33
    }

    #[test]
    fn vacuous_caps_give_unconstrained_optimum() {
        let u = vec![3.0, 1.0, 0.0, 2.0, 5.0, 1.0, 4.0, 4.0, 4.0];
        let inst = Instance::new(vec![1, 2], vec![2, 1], u, vec![2, 1, 2, 1]).unwrap();
        let e = solve_exact(&inst).unwrap();
        assert_eq!(e.objective, solve_unconstrained(&inst).unwrap().objective);
        assert_eq!(e.optimality, Optimality::Exact);
        e.verify(&inst).unwrap();
    }

    #[test]
    fn agrees_with_brute_force_on_small_instances() {
        let mut seed = 5u64;
        for _ in 0..150 {
            let k = 1 + (lcg(&mut seed) % 3) as usize;
            let l = 1 + (lcg(&mut seed) % 3) as usize;
            let types: Vec<usize> = (0..k).map(|_| (lcg(&mut seed) % 3) as usize).collect();
            let blocks: Vec<usize> = (0..l).map(|_| (lcg(&mut seed) % 3) as usize).collect();
            let (n, m) = (types.iter().sum::<usize>(), blocks.iter().sum::<usize>());
            let u = (0..n * m).map(|_| (lcg(&mut seed) % 10) as f64).collect();
            let caps = (0..k * l).map(|c| (lcg(&mut seed) % (blocks[c % l] as u64 + 1)) as usize).collect();
            let inst = Instance::new(types, blocks, u, caps).unwrap();
            let e = solve_exact(&inst).unwrap();
            e.verify(&inst).unwrap();
            assert_eq!(e.objective, solve_brute_force(&inst).unwrap().objective);
        }
    }

    #[test]
    fn node_limit_returns_flagged_incumbent() {
        let n = 8;
        let mut seed = 9u64;
        let u = (0..n * n).map(|_| (lcg(&mut seed) % 100) as f64).collect();
        let inst = Instance::new(vec![4, 4], vec![4, 4], u, vec![1, 1, 1, 1]).unwrap();
        let cfg = ExactConfig {
            node_limit: Some(1),
            root_iterations: 1,
            ..ExactConfig::default()
        };
        let r = solve_exact_with(&inst, &cfg).unwrap();
        r.verify(&inst).unwrap();
        if r.stats.budget_exhausted {
            assert!(matches!(r.optimality, Optimality::Heuristic { .. }));
        }
        let stop = || true;
        let cfg = ExactConfig {
            stop: Some(&stop),
            ..ExactConfig::default()
        };
        let r = solve_exact_with(&inst, &cfg).unwrap();
        assert!(r.stats.budget_exhausted);
        assert!(!r.optimality.is_optimal());
        r.verify(&inst).unwrap();
    }

    #[test]
    fn relative_gap_stays_within_its_guarantee() {
        let mut seed = 21u64;
        for _ in 0..40 {
            let u = (0..36).map(|_| (lcg(&mut seed) % 50) as f64).collect();
            let caps = (0..4).map(|_| (lcg(&mut seed) % 4) as usize).collect();
            let inst = Instance::new(vec![3, 3], vec![3, 3], u, caps).unwrap();
            let opt = solve_brute_force(&inst).unwrap().objective;
            let cfg = ExactConfig {
                rel_gap: 0.2,
                ..ExactConfig::default()
            };
            let r = solve_exact_with(&inst, &cfg).unwrap();
            r.verify(&inst).unwrap();
            assert!(!r.stats.budget_exhausted);
            assert_eq!(r.optimality, Optimality::Heuristic { ratio: Some(1.0 / 1.2) });
            assert!(r.objective <= opt && r.objective * 1.2 >= opt - 1e-9);
        }
    }
}
