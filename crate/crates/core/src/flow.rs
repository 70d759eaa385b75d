// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Layered min-cost flow networks.
//!
//! Nodes carry a layer index and every arc goes from a lower layer to a
//! higher one, so the initial graph is a DAG and a single relaxation pass in
//! layer order yields feasible potentials even with negative arc costs.
//! After that, successive shortest paths run Dijkstra on reduced costs.
//!
//! [`FlowNetwork::cancel_cycles`] is an unrelated route to the same optimum
//! (any feasible flow, then negative-cycle cancelling) kept as an oracle.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: i64,
    pub cost: f64,
    pub flow: i64,
}

/// Stopping rule for [`FlowNetwork::successive_shortest_paths`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Halting {
    /// Stop at the first augmenting path whose cost is nonnegative.
    NonNegativePath,
    /// Push exactly this much flow (or as much as fits).
    FlowValue(i64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSummary {
    pub value: i64,
    pub cost: f64,
    pub augmentations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties on node index
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    layers: Vec<u32>,
    arcs: Vec<Arc>,
    // residual edge ids: 2a is arc a forward, 2a + 1 its reverse
    adjacency: Vec<Vec<usize>>,
    potentials: Vec<f64>,
    source: usize,
    sink: usize,
    potentials_ready: bool,
}

impl FlowNetwork {
    pub fn new() -> Self {
        Self {
            layers: Vec::new(),
            arcs: Vec::new(),
            adjacency: Vec::new(),
            potentials: Vec::new(),
            source: 0,
            sink: 0,
            potentials_ready: false,
        }
    }

    pub fn add_node(&mut self, layer: u32) -> usize {
        self.layers.push(layer);
        self.adjacency.push(Vec::new());
        self.potentials.push(0.0);
        self.layers.len() - 1
    }

    pub fn set_terminals(&mut self, source: usize, sink: usize) {
        self.source = source;
        self.sink = sink;
    }

    /// Adds an arc; panics unless it goes to a strictly higher layer.
    pub fn add_arc(&mut self, tail: usize, head: usize, capacity: i64, cost: f64) -> usize {
        assert!(
            self.layers[tail] < self.layers[head],
            "arc {tail}->{head} does not go forward in layer order"
        );
        let id = self.arcs.len();
        self.arcs.push(Arc {
            tail,
            head,
            capacity,
            cost,
            flow: 0,
        });
        self.adjacency[tail].push(2 * id);
        self.adjacency[head].push(2 * id + 1);
        self.potentials_ready = false;
        id
    }

    pub fn node_count(&self) -> usize {
        self.layers.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: usize) -> &Arc {
        &self.arcs[id]
    }

    pub fn potentials(&self) -> &[f64] {
        &self.potentials
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn value(&self) -> i64 {
        self.adjacency[self.source]
            .iter()
            .filter(|&&e| e % 2 == 0)
            .map(|&e| self.arcs[e / 2].flow)
            .sum()
    }

    pub fn cost(&self) -> f64 {
        self.arcs.iter().map(|a| a.flow as f64 * a.cost).sum()
    }

    pub fn reset_flow(&mut self) {
        for a in &mut self.arcs {
            a.flow = 0;
        }
        self.potentials_ready = false;
    }

    #[inline]
    fn edge_ends(&self, e: usize) -> (usize, usize) {
        let a = &self.arcs[e / 2];
        if e.is_multiple_of(2) {
            (a.tail, a.head)
        } else {
            (a.head, a.tail)
        }
    }

    #[inline]
    fn residual(&self, e: usize) -> i64 {
        let a = &self.arcs[e / 2];
        if e.is_multiple_of(2) {
            a.capacity - a.flow
        } else {
            a.flow
        }
    }

    #[inline]
    fn edge_cost(&self, e: usize) -> f64 {
        let c = self.arcs[e / 2].cost;
        if e.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }

    #[inline]
    fn push(&mut self, e: usize, amount: i64) {
        let a = &mut self.arcs[e / 2];
        if e.is_multiple_of(2) {
            a.flow += amount;
        } else {
            a.flow -= amount;
        }
    }

    /// Shortest-path distances from the source over the residual graph,
    /// processing nodes in layer order. Only valid while every residual
    /// edge goes forward, i.e. before any flow is pushed.
    fn init_potentials(&mut self) {
        let mut order: Vec<usize> = (0..self.node_count()).collect();
        order.sort_by_key(|&v| (self.layers[v], v));
        let mut dist = vec![f64::INFINITY; self.node_count()];
        dist[self.source] = 0.0;
        for &v in &order {
            if !dist[v].is_finite() {
                continue;
            }
            for &e in &self.adjacency[v] {
                if e % 2 == 1 || self.residual(e) <= 0 {
                    continue;
                }
                let (_, w) = self.edge_ends(e);
                let nd = dist[v] + self.edge_cost(e);
                if nd < dist[w] {
                    dist[w] = nd;
                }
            }
        }
        let reach_max = dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0f64, f64::max);
        for (p, d) in self.potentials.iter_mut().zip(&dist) {
            *p = if d.is_finite() { *d } else { reach_max };
        }
        self.potentials_ready = true;
    }

    /// Dijkstra on reduced costs. Returns distances and parent edges.
    fn dijkstra(&self) -> (Vec<f64>, Vec<usize>) {
        let nv = self.node_count();
        let mut dist = vec![f64::INFINITY; nv];
        let mut parent = vec![usize::MAX; nv];
        let mut done = vec![false; nv];
        let mut heap = BinaryHeap::new();
        dist[self.source] = 0.0;
        heap.push(HeapItem {
            dist: 0.0,
            node: self.source,
        });
        while let Some(HeapItem { dist: d, node: v }) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &e in &self.adjacency[v] {
                if self.residual(e) <= 0 {
                    continue;
                }
                let (_, w) = self.edge_ends(e);
                if done[w] {
                    continue;
                }
                // clip rounding noise; reduced costs are nonnegative in exact arithmetic
                let rc = (self.edge_cost(e) + self.potentials[v] - self.potentials[w]).max(0.0);
                let nd = d + rc;
                if nd < dist[w] {
                    dist[w] = nd;
                    parent[w] = e;
                    heap.push(HeapItem { dist: nd, node: w });
                }
            }
        }
        (dist, parent)
    }

    /// Finds the cheapest augmenting path and pushes flow along it, unless the
    /// halting rule says stop. Returns the amount pushed and the per-unit cost.
    pub fn augment_once(&mut self, halting: Halting) -> Option<(i64, f64)> {
        if !self.potentials_ready {
            self.init_potentials();
        }
        let remaining = match halting {
            Halting::FlowValue(target) => {
                let r = target - self.value();
                if r <= 0 {
                    return None;
                }
                r
            }
            Halting::NonNegativePath => i64::MAX,
        };
        let (dist, parent) = self.dijkstra();
        let t = self.sink;
        if !dist[t].is_finite() {
            return None;
        }
        let unit_cost = dist[t] - self.potentials[self.source] + self.potentials[t];
        if halting == Halting::NonNegativePath && unit_cost >= 0.0 {
            return None;
        }

        let mut amount = remaining;
        let mut v = t;
        while v != self.source {
            let e = parent[v];
            amount = amount.min(self.residual(e));
            v = self.edge_ends(e).0;
        }
        let mut v = t;
        while v != self.source {
            let e = parent[v];
            self.push(e, amount);
            v = self.edge_ends(e).0;
        }

        let reach_max = dist
            .iter()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0f64, f64::max);
        for (p, d) in self.potentials.iter_mut().zip(&dist) {
            *p += if d.is_finite() { *d } else { reach_max };
        }
        Some((amount, unit_cost))
    }

    /// Runs successive shortest paths from the current flow.
    pub fn successive_shortest_paths(&mut self, halting: Halting) -> FlowSummary {
        let mut augmentations = 0;
        while self.augment_once(halting).is_some() {
            augmentations += 1;
        }
        FlowSummary {
            value: self.value(),
            cost: self.cost(),
            augmentations,
        }
    }

    /// Max flow by BFS augmenting paths, capped at `limit`. Ignores costs.
    fn push_any_flow(&mut self, limit: i64) -> i64 {
        let nv = self.node_count();
        let mut pushed = 0;
        while pushed < limit {
            let mut parent = vec![usize::MAX; nv];
            let mut seen = vec![false; nv];
            let mut queue = VecDeque::new();
            seen[self.source] = true;
            queue.push_back(self.source);
            while let Some(v) = queue.pop_front() {
                if v == self.sink {
                    break;
                }
                for &e in &self.adjacency[v] {
                    let (_, w) = self.edge_ends(e);
                    if !seen[w] && self.residual(e) > 0 {
                        seen[w] = true;
                        parent[w] = e;
                        queue.push_back(w);
                    }
                }
            }
            if !seen[self.sink] {
                break;
            }
            let mut amount = limit - pushed;
            let mut v = self.sink;
            while v != self.source {
                amount = amount.min(self.residual(parent[v]));
                v = self.edge_ends(parent[v]).0;
            }
            let mut v = self.sink;
            while v != self.source {
                let e = parent[v];
                self.push(e, amount);
                v = self.edge_ends(e).0;
            }
            pushed += amount;
        }
        pushed
    }

    /// Negative cycle in the residual graph (cost below `-tol`), as edge ids.
    fn find_negative_cycle(&self, tol: f64) -> Option<Vec<usize>> {
        let nv = self.node_count();
        let mut dist = vec![0.0f64; nv];
        let mut parent = vec![usize::MAX; nv];
        let mut last = usize::MAX;
        for _ in 0..nv {
            last = usize::MAX;
            for v in 0..nv {
                for &e in &self.adjacency[v] {
                    if self.residual(e) <= 0 {
                        continue;
                    }
                    let (_, w) = self.edge_ends(e);
                    let nd = dist[v] + self.edge_cost(e);
                    if nd < dist[w] - tol {
                        dist[w] = nd;
                        parent[w] = e;
                        last = w;
                    }
                }
            }
            if last == usize::MAX {
                return None;
            }
        }
        let mut v = last;
        for _ in 0..nv {
            v = self.edge_ends(parent[v]).0;
        }
        let start = v;
        let mut cycle = Vec::new();
        loop {
            let e = parent[v];
            cycle.push(e);
            v = self.edge_ends(e).0;
            if v == start {
                break;
            }
        }
        let cost: f64 = cycle.iter().map(|&e| self.edge_cost(e)).sum();
        (cost < -tol).then_some(cycle)
    }

    /// Min-cost flow of exactly `value` units by cost-oblivious augmentation
    /// followed by negative-cycle cancelling. Returns `None` when `value`
    /// exceeds the max flow. Resets any existing flow first.
    pub fn cancel_cycles(&mut self, value: i64, tol: f64) -> Option<f64> {
        self.reset_flow();
        if self.push_any_flow(value) < value {
            return None;
        }
        while let Some(cycle) = self.find_negative_cycle(tol) {
            let amount = cycle.iter().map(|&e| self.residual(e)).min().unwrap_or(0);
            for &e in &cycle {
                self.push(e, amount);
            }
        }
        Some(self.cost())
    }

    /// Checks capacity bounds, conservation and (when potentials are in use)
    /// nonnegative reduced costs on residual edges.
    pub fn check_invariants(&self, tol: f64) -> Result<(), String> {
        let mut balance = vec![0i64; self.node_count()];
        for (id, a) in self.arcs.iter().enumerate() {
            if a.flow < 0 || a.flow > a.capacity {
                return Err(format!("arc {id} carries {} of capacity {}", a.flow, a.capacity));
            }
            balance[a.tail] -= a.flow;
            balance[a.head] += a.flow;
        }
        for (v, &b) in balance.iter().enumerate() {
            if v != self.source && v != self.sink && b != 0 {
                return Err(format!("node {v} has imbalance {b}"));
            }
        }
        if self.potentials_ready {
            for v in 0..self.node_count() {
                for &e in &self.adjacency[v] {
                    if self.residual(e) <= 0 {
                        continue;
                    }
                    let (_, w) = self.edge_ends(e);
                    let rc = self.edge_cost(e) + self.potentials[v] - self.potentials[w];
                    if rc < -tol {
                        return Err(format!("residual edge {v}->{w} has reduced cost {rc}"));
                    }
                }
            }
        }
        Ok(())
    }
}

impl Default for FlowNetwork {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // s -> {x, y} -> t with a cheaper but narrower route through x
    fn diamond() -> FlowNetwork {
        let mut g = FlowNetwork::new();
        let s = g.add_node(0);
        let x = g.add_node(1);
        let y = g.add_node(1);
        let t = g.add_node(2);
        g.set_terminals(s, t);
        g.add_arc(s, x, 1, 0.0);
        g.add_arc(s, y, 2, 0.0);
        g.add_arc(x, t, 1, -5.0);
        g.add_arc(y, t, 2, -1.0);
        g
    }

    #[test]
    fn halting_rule_stops_at_nonnegative_paths() {
        let mut g = diamond();
        let s = g.successive_shortest_paths(Halting::NonNegativePath);
        assert_eq!(s.value, 3);
        assert_eq!(s.cost, -7.0);
        g.check_invariants(1e-9).unwrap();
    }

    #[test]
    fn fixed_value_matches_cycle_cancelling() {
        for f in 0..=3 {
            let mut a = diamond();
            let ssp = a.successive_shortest_paths(Halting::FlowValue(f));
            let mut b = diamond();
            let cc = b.cancel_cycles(f, 1e-12).unwrap();
            assert_eq!(ssp.value, f);
            assert_eq!(ssp.cost, cc);
        }
        assert_eq!(diamond().cancel_cycles(4, 1e-12), None);
    }

    #[test]
    #[should_panic]
    fn backward_arcs_are_rejected() {
        let mut g = FlowNetwork::new();
        let a = g.add_node(1);
        let b = g.add_node(0);
        g.add_arc(a, b, 1, 0.0);
    }
}
