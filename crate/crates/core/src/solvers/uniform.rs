// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Polynomial special cases via min-cost flow.
//!
//! Type-uniform utilities (`u(i, j) = U_pj` for every agent `i` of type `p`)
//! use the layered network
//!
//! ```text
//! s --|N_p|--> a_p --λ_pq--> b_pq --1, -U_pj--> c_j --1--> t
//! ```
//!
//! and block-uniform utilities (`u(i, j) = U_iq` for every item `j` of block
//! `q`) use its mirror image
//!
//! ```text
//! s --1--> agent_i --1, -U_iq--> b_pq --λ_pq--> d_q --|M_q|--> t
//! ```
//!
//! where `p` is the type of agent `i`. In both cases the cheapest flow over
//! all flow values is found by successive shortest paths that stop at the
//! first augmenting path of nonnegative cost, since per-unit path costs never
//! decrease along the run.

use alloc::vec;
use alloc::vec::Vec;

use super::{Method, Optimality, SolveResult, SolveStats};
use crate::error::{Error, Result};
use crate::flow::{FlowNetwork, Halting};
use crate::model::{Assignment, Instance};

/// The type-uniform network together with the arc ids needed for extraction.
#[derive(Debug, Clone)]
pub struct TypeUniformNetwork {
    pub network: FlowNetwork,
    /// `(arc, p, j)` for every arc `b_pq → c_j`.
    pub item_arcs: Vec<(usize, usize, usize)>,
}

impl TypeUniformNetwork {
    pub fn build(inst: &Instance) -> Self {
        let (k, l, m) = (inst.k(), inst.l(), inst.m());
        let mut g = FlowNetwork::new();
        let s = g.add_node(0);
        let a: Vec<usize> = (0..k).map(|_| g.add_node(1)).collect();
        let b: Vec<usize> = (0..k * l).map(|_| g.add_node(2)).collect();
        let c: Vec<usize> = (0..m).map(|_| g.add_node(3)).collect();
        let t = g.add_node(4);
        g.set_terminals(s, t);
        for p in 0..k {
            g.add_arc(s, a[p], inst.type_sizes()[p] as i64, 0.0);
        }
        for p in 0..k {
            for q in 0..l {
                g.add_arc(a[p], b[p * l + q], inst.capacity(p, q) as i64, 0.0);
            }
        }
        let mut item_arcs = Vec::new();
        for p in 0..k {
            let Some(rep) = inst.agents_of_type(p).next() else {
                continue;
            };
            for q in 0..l {
                for j in inst.items_of_block(q) {
                    let arc = g.add_arc(b[p * l + q], c[j], 1, -inst.utility(rep, j));
                    item_arcs.push((arc, p, j));
                }
            }
        }
        for &cj in &c {
            g.add_arc(cj, t, 1, 0.0);
        }
        Self {
            network: g,
            item_arcs,
        }
    }

    /// For every item carrying flow from `b_pq`, hands it to the
    /// lowest-index type-`p` agent not yet served.
    pub fn extract(&self, inst: &Instance) -> Assignment {
        let mut next_agent: Vec<usize> = (0..inst.k()).map(|p| inst.agents_of_type(p).start).collect();
        let mut served: Vec<(usize, usize)> = Vec::new();
        // item_arcs are grouped by type; serve items in index order
        let mut by_item: Vec<(usize, usize)> = self
            .item_arcs
            .iter()
            .filter(|(arc, _, _)| self.network.arc(*arc).flow == 1)
            .map(|&(_, p, j)| (j, p))
            .collect();
        by_item.sort_unstable();
        for (j, p) in by_item {
            let i = next_agent[p];
            debug_assert!(i < inst.agents_of_type(p).end);
            next_agent[p] += 1;
            served.push((i, j));
        }
        Assignment::from_pairs(served)
    }
}

fn require_type_uniform(inst: &Instance) -> Result<()> {
    match inst.type_uniform_violation() {
        None => Ok(()),
        Some((type_index, agent, other, item)) => Err(Error::NotTypeUniform {
            type_index,
            agent,
            other,
            item,
        }),
    }
}

pub fn solve_type_uniform(inst: &Instance) -> Result<SolveResult> {
    require_type_uniform(inst)?;
    let mut net = TypeUniformNetwork::build(inst);
    let summary = net.network.successive_shortest_paths(Halting::NonNegativePath);
    let stats = SolveStats {
        augmentations: summary.augmentations,
        ..SolveStats::default()
    };
    SolveResult::new(inst, Method::McfType, net.extract(inst), Optimality::Exact, stats)
}

/// Oracle mode: solves a separate min-cost flow (by cycle cancelling) for
/// every flow value `F ∈ {0, …, n}` and keeps the cheapest, smallest `F`
/// first. Returns the result and the minimizing `F`.
pub fn solve_type_uniform_explicit(inst: &Instance) -> Result<(SolveResult, i64)> {
    require_type_uniform(inst)?;
    let scale = inst.utilities().iter().fold(1.0f64, |a, &u| a.max(u));
    let tol = 1e-12 * scale;
    let mut best: Option<(f64, i64, TypeUniformNetwork)> = None;
    for value in 0..=inst.n() as i64 {
        let mut net = TypeUniformNetwork::build(inst);
        let Some(cost) = net.network.cancel_cycles(value, tol) else {
            break;
        };
        if best.as_ref().is_none_or(|(c, _, _)| cost < *c) {
            best = Some((cost, value, net));
        }
    }
    let (_, value, net) = best.expect("the zero flow is always feasible");
    let result = SolveResult::new(
        inst,
        Method::McfType,
        net.extract(inst),
        Optimality::Exact,
        SolveStats::default(),
    )?;
    Ok((result, value))
}

pub fn solve_block_uniform(inst: &Instance) -> Result<SolveResult> {
    if let Some((agent, block, item, other)) = inst.block_uniform_violation() {
        return Err(Error::NotBlockUniform {
            agent,
            block,
            item,
            other,
        });
    }
    let (n, k, l) = (inst.n(), inst.k(), inst.l());
    let mut g = FlowNetwork::new();
    let s = g.add_node(0);
    let agent_nodes: Vec<usize> = (0..n).map(|_| g.add_node(1)).collect();
    let b: Vec<usize> = (0..k * l).map(|_| g.add_node(2)).collect();
    let d: Vec<usize> = (0..l).map(|_| g.add_node(3)).collect();
    let t = g.add_node(4);
    g.set_terminals(s, t);
    for &a in &agent_nodes {
        g.add_arc(s, a, 1, 0.0);
    }
    let mut choice_arcs = Vec::new();
    for i in 0..n {
        let p = inst.agent_type(i);
        for q in 0..l {
            let Some(rep) = inst.items_of_block(q).next() else {
                continue;
            };
            let arc = g.add_arc(agent_nodes[i], b[p * l + q], 1, -inst.utility(i, rep));
            choice_arcs.push((arc, i, q));
        }
    }
    for p in 0..k {
        for q in 0..l {
            g.add_arc(b[p * l + q], d[q], inst.capacity(p, q) as i64, 0.0);
        }
    }
    for q in 0..l {
        g.add_arc(d[q], t, inst.block_sizes()[q] as i64, 0.0);
    }
    let summary = g.successive_shortest_paths(Halting::NonNegativePath);

    let mut next_item: Vec<usize> = (0..l).map(|q| inst.items_of_block(q).start).collect();
    let mut pairs = Vec::new();
    // choice_arcs are in agent order
    for (arc, i, q) in choice_arcs {
        if g.arc(arc).flow == 1 {
            pairs.push((i, next_item[q]));
            next_item[q] += 1;
        }
    }
    let stats = SolveStats {
        augmentations: summary.augmentations,
        ..SolveStats::default()
    };
    SolveResult::new(inst, Method::McfBlock, Assignment::from_pairs(pairs), Optimality::Exact, stats)
}

/// Per-type utility table `U_pj` of a type-uniform instance (row-major `k × m`).
pub fn type_utility_table(inst: &Instance) -> Vec<f64> {
    let mut table = vec![0.0; inst.k() * inst.m()];
    for p in 0..inst.k() {
        if let Some(rep) = inst.agents_of_type(p).next() {
            table[p * inst.m()..(p + 1) * inst.m()].copy_from_slice(inst.row(rep));
        }
    }
    table
}
