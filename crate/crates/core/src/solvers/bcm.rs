// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Bounded color matching and the two reductions linking it to
//! assignment with type-block constraints.
//!
//! A bounded color matching instance is a bipartite graph whose edges carry
//! a color and a profit; a feasible solution is a matching with at most
//! `w_t` edges of color `t`.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcmEdge {
    /// Left endpoint, in `0..left`.
    pub a: usize,
    /// Right endpoint, in `0..right`.
    pub b: usize,
    pub color: usize,
    pub profit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcmInstance {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<BcmEdge>,
    /// Budget `w_t` per color.
    pub budgets: Vec<usize>,
    /// Decision threshold `P`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl BcmInstance {
    pub fn new(
        left: usize,
        right: usize,
        edges: Vec<BcmEdge>,
        budgets: Vec<usize>,
        threshold: Option<f64>,
    ) -> Result<Self> {
        let inst = Self {
            left,
            right,
            edges,
            budgets,
            threshold,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Builds an instance from an undirected colored graph on `vertices`
    /// nodes, finding the bipartition by BFS. Each component is split with
    /// its lowest-index vertex on the left. Fails on odd cycles.
    pub fn from_graph(
        vertices: usize,
        edges: &[(usize, usize, usize, f64)],
        budgets: Vec<usize>,
        threshold: Option<f64>,
    ) -> Result<Self> {
        let mut adj = vec![Vec::new(); vertices];
        for &(u, v, _, _) in edges {
            if u >= vertices || v >= vertices {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) references a missing vertex")));
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}: graph is not bipartite")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut side = vec![None; vertices];
        for start in 0..vertices {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                let sx = side[x].unwrap_or(false);
                for &y in &adj[x] {
                    match side[y] {
                        None => {
                            side[y] = Some(!sx);
                            queue.push_back(y);
                        }
                        Some(sy) if sy == sx => {
                            return Err(Error::InvalidInput(format!(
                                "odd cycle through vertices {x} and {y}: graph is not bipartite"
                            )));
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        let mut index = vec![0usize; vertices];
        let (mut left, mut right) = (0, 0);
        for v in 0..vertices {
            if side[v] == Some(false) {
                index[v] = left;
                left += 1;
            } else {
                index[v] = right;
                right += 1;
            }
        }
        let edges = edges
            .iter()
            .map(|&(u, v, color, profit)| {
                let (a, b) = if side[u] == Some(false) { (u, v) } else { (v, u) };
                BcmEdge {
                    a: index[a],
                    b: index[b],
                    color,
                    profit,
                }
            })
            .collect();
        Self::new(left, right, edges, budgets, threshold)
    }

    pub fn colors(&self) -> usize {
        self.budgets.len()
    }

    fn validate(&self) -> Result<()> {
        for (id, e) in self.edges.iter().enumerate() {
            if e.a >= self.left || e.b >= self.right {
                return Err(Error::InvalidInput(format!("edge {id} has an endpoint out of range")));
            }
            if e.color >= self.budgets.len() {
                return Err(Error::InvalidInput(format!("edge {id} has unknown color {}", e.color)));
            }
            if !(e.profit.is_finite() && e.profit >= 0.0) {
                return Err(Error::InvalidInput(format!("edge {id} has invalid profit {}", e.profit)));
            }
        }
        Ok(())
    }

    pub fn left_degree(&self, a: usize) -> usize {
        self.edges.iter().filter(|e| e.a == a).count()
    }

    /// Whether the edge set is a matching within every color budget.
    pub fn is_feasible(&self, chosen: &[usize]) -> bool {
        let mut left_used = vec![false; self.left];
        let mut right_used = vec![false; self.right];
        let mut per_color = vec![0usize; self.colors()];
        for &id in chosen {
            let e = &self.edges[id];
            if left_used[e.a] || right_used[e.b] {
                return false;
            }
            left_used[e.a] = true;
            right_used[e.b] = true;
            per_color[e.color] += 1;
        }
        per_color.iter().zip(&self.budgets).all(|(c, w)| c <= w)
    }

    pub fn profit(&self, chosen: &[usize]) -> f64 {
        chosen.iter().map(|&id| self.edges[id].profit).sum()
    }
}

/// Best bounded color matching by exhaustive search over edge subsets.
/// Returns the profit and the chosen edge ids. Exponential in `|E|`.
pub fn solve_bcm_brute_force(bcm: &BcmInstance) -> (f64, Vec<usize>) {
    struct Search<'a> {
        bcm: &'a BcmInstance,
        left_used: Vec<bool>,
        right_used: Vec<bool>,
        per_color: Vec<usize>,
        chosen: Vec<usize>,
        best: (f64, Vec<usize>),
    }

    impl Search<'_> {
        fn visit(&mut self, id: usize, profit: f64) {
            if id == self.bcm.edges.len() {
                if profit > self.best.0 {
                    self.best = (profit, self.chosen.clone());
                }
                return;
            }
            let e = self.bcm.edges[id];
            if !self.left_used[e.a]
                && !self.right_used[e.b]
                && self.per_color[e.color] < self.bcm.budgets[e.color]
            {
                self.left_used[e.a] = true;
                self.right_used[e.b] = true;
                self.per_color[e.color] += 1;
                self.chosen.push(id);
                self.visit(id + 1, profit + e.profit);
                self.chosen.pop();
                self.per_color[e.color] -= 1;
                self.right_used[e.b] = false;
                self.left_used[e.a] = false;
            }
            self.visit(id + 1, profit);
        }
    }

    let mut s = Search {
        bcm,
        left_used: vec![false; bcm.left],
        right_used: vec![false; bcm.right],
        per_color: vec![0; bcm.colors()],
        chosen: Vec::new(),
        best: (0.0, Vec::new()),
    };
    s.visit(0, 0.0);
    s.best
}

/// Complete bipartite graph on agents × items: edge `(i, j)` has profit
/// `u(i, j)` and color `p·l + q`, with budget `λ_pq`. Edge id is `i·m + j`.
pub fn reduce_to_bcm(inst: &Instance) -> BcmInstance {
    let (n, m, l) = (inst.n(), inst.m(), inst.l());
    let mut edges = Vec::with_capacity(n * m);
    for i in 0..n {
        for j in 0..m {
            edges.push(BcmEdge {
                a: i,
                b: j,
                color: inst.agent_type(i) * l + inst.item_block(j),
                profit: inst.utility(i, j),
            });
        }
    }
    BcmInstance {
        left: n,
        right: m,
        edges,
        budgets: inst.capacities().to_vec(),
        threshold: None,
    }
}

/// Output of [`reduce_from_bcm`].
#[derive(Debug, Clone, PartialEq)]
pub struct BcmReduction {
    pub instance: Instance,
    /// Welfare threshold `U = P + Φ·|M_2|`.
    pub threshold: f64,
    /// The large constant `Φ = 1 + Σ π_e`.
    pub phi: f64,
    /// Edge id represented by each agent.
    pub edge_of_agent: Vec<usize>,
    /// Right vertex represented by each item of the first block.
    pub right_of_item: Vec<usize>,
}

/// Encodes a bounded color matching decision instance as an assignment
/// decision instance.
///
/// Agents are the edges, typed by color. The first block has one item per
/// right vertex `b` and caps `λ_t1 = w_t`; the second has `deg(a) - 1`
/// items per left vertex `a` and caps `λ_t2 = min(|N_t|, |M_2|)`. Agent
/// `(a, b)` values item `j_b` at its profit, each of `a`'s own second-block
/// items at `Φ`, and everything else at zero. The matching has profit at
/// least `P` exactly when some feasible assignment reaches the returned
/// threshold.
pub fn reduce_from_bcm(bcm: &BcmInstance) -> Result<BcmReduction> {
    bcm.validate()?;
    let threshold_p = bcm
        .threshold
        .ok_or_else(|| Error::InvalidInput("bounded color matching instance needs a threshold P".into()))?;
    let colors = bcm.colors();

    let mut edge_of_agent: Vec<usize> = (0..bcm.edges.len()).collect();
    edge_of_agent.sort_by_key(|&id| (bcm.edges[id].color, id));
    let mut type_sizes = vec![0usize; colors];
    for e in &bcm.edges {
        type_sizes[e.color] += 1;
    }

    // second-block items j_a^1..j_a^{deg(a)-1}, grouped by left vertex
    let mut own_items: Vec<core::ops::Range<usize>> = Vec::with_capacity(bcm.left);
    let mut next = bcm.right;
    for a in 0..bcm.left {
        let extra = bcm.left_degree(a).saturating_sub(1);
        own_items.push(next..next + extra);
        next += extra;
    }
    let m2 = next - bcm.right;
    let m = bcm.right + m2;

    let phi = 1.0 + bcm.edges.iter().map(|e| e.profit).sum::<f64>();
    let n = bcm.edges.len();
    let mut utilities = vec![0.0; n * m];
    for (agent, &id) in edge_of_agent.iter().enumerate() {
        let e = &bcm.edges[id];
        let row = &mut utilities[agent * m..(agent + 1) * m];
        row[e.b] = e.profit;
        for j in own_items[e.a].clone() {
            row[j] = phi;
        }
    }
    let mut caps = Vec::with_capacity(colors * 2);
    for t in 0..colors {
        caps.push(bcm.budgets[t]);
        caps.push(type_sizes[t].min(m2));
    }
    let instance = Instance::new(type_sizes, vec![bcm.right, m2], utilities, caps)?;
    Ok(BcmReduction {
        instance,
        threshold: threshold_p + phi * m2 as f64,
        phi,
        edge_of_agent,
        right_of_item: (0..bcm.right).collect(),
    })
}
