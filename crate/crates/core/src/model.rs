// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Problem instances, assignments, feasibility and welfare.
//!
//! Agents are numbered `0..n` and stored contiguously per type; items are
//! numbered `0..m` and stored contiguously per block. Counting the agents of
//! type `p` placed in block `q` is therefore a pair of range lookups.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hasher;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Guard used when flooring `alpha * size`, so that `0.29 * 100` floors to 29.
const FLOOR_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    /// `λ = ⌊α·|M_q|⌋`.
    Floor,
    /// `α·|M_q|` must already be an integer.
    Exact,
}

/// Fractional quotas `α_pq` from which integer capacities are derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotaProfile {
    /// Row-major `k × l`.
    pub alphas: Vec<f64>,
    pub rounding: Rounding,
}

impl QuotaProfile {
    pub fn new(alphas: Vec<f64>, rounding: Rounding) -> Self {
        Self { alphas, rounding }
    }

    /// The same quota for every block: `alpha_per_type[p]` for all `q`.
    pub fn uniform(alpha_per_type: &[f64], blocks: usize, rounding: Rounding) -> Self {
        let alphas = alpha_per_type
            .iter()
            .flat_map(|&a| core::iter::repeat_n(a, blocks))
            .collect();
        Self { alphas, rounding }
    }

    pub fn alpha(&self, p: usize, q: usize, blocks: usize) -> f64 {
        self.alphas[p * blocks + q]
    }

    /// Integer capacities for the given block sizes.
    pub fn capacities(&self, types: usize, block_sizes: &[usize]) -> Result<Vec<usize>> {
        let l = block_sizes.len();
        if self.alphas.len() != types * l {
            return Err(Error::InvalidInput(format!(
                "quota matrix has {} entries, expected {}x{}",
                self.alphas.len(),
                types,
                l
            )));
        }
        let mut caps = Vec::with_capacity(types * l);
        for p in 0..types {
            for (q, &size) in block_sizes.iter().enumerate() {
                let alpha = self.alphas[p * l + q];
                if !(alpha.is_finite() && (0.0..=1.0).contains(&alpha)) {
                    return Err(Error::InvalidInput(format!(
                        "quota alpha[{p}][{q}] = {alpha} outside [0, 1]"
                    )));
                }
                let raw = alpha * size as f64;
                let cap = match self.rounding {
                    Rounding::Floor => libm::floor(raw + FLOOR_GUARD),
                    Rounding::Exact => {
                        let r = libm::round(raw);
                        if libm::fabs(raw - r) > FLOOR_GUARD {
                            return Err(Error::InvalidInput(format!(
                                "alpha[{p}][{q}] * |M_{q}| = {raw} is not integral"
                            )));
                        }
                        r
                    }
                };
                caps.push(cap as usize);
            }
        }
        Ok(caps)
    }
}

/// An instance of assignment with type-block constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    type_sizes: Vec<usize>,
    block_sizes: Vec<usize>,
    type_start: Vec<usize>,
    block_start: Vec<usize>,
    agent_type: Vec<usize>,
    item_block: Vec<usize>,
    utilities: Vec<f64>,
    capacities: Vec<usize>,
    clamped: bool,
    quotas: Option<QuotaProfile>,
    type_names: Vec<String>,
    block_names: Vec<String>,
    metadata: BTreeMap<String, Vec<f64>>,
}

fn prefix_starts(sizes: &[usize]) -> Vec<usize> {
    let mut starts = Vec::with_capacity(sizes.len() + 1);
    let mut acc = 0;
    starts.push(0);
    for &s in sizes {
        acc += s;
        starts.push(acc);
    }
    starts
}

fn expand_labels(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(g, &s)| core::iter::repeat_n(g, s))
        .collect()
}

impl Instance {
    /// Builds an instance from type sizes, block sizes, a row-major `n × m`
    /// utility matrix and a row-major `k × l` capacity matrix.
    ///
    /// Capacities above the block size are clamped to it; [`Instance::was_clamped`]
    /// reports whether that happened.
    pub fn new(
        type_sizes: Vec<usize>,
        block_sizes: Vec<usize>,
        utilities: Vec<f64>,
        mut capacities: Vec<usize>,
    ) -> Result<Self> {
        let n: usize = type_sizes.iter().sum();
        let m: usize = block_sizes.iter().sum();
        let (k, l) = (type_sizes.len(), block_sizes.len());
        if utilities.len() != n * m {
            return Err(Error::InvalidInput(format!(
                "utility matrix has {} entries, expected {n}x{m}",
                utilities.len()
            )));
        }
        if capacities.len() != k * l {
            return Err(Error::InvalidInput(format!(
                "capacity matrix has {} entries, expected {k}x{l}",
                capacities.len()
            )));
        }
        if let Some(pos) = utilities.iter().position(|u| !(u.is_finite() && *u >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "utility u({}, {}) = {} is not a finite nonnegative real",
                pos / m.max(1),
                pos % m.max(1),
                utilities[pos]
            )));
        }
        let mut clamped = false;
        for p in 0..k {
            for q in 0..l {
                let c = &mut capacities[p * l + q];
                if *c > block_sizes[q] {
                    *c = block_sizes[q];
                    clamped = true;
                }
            }
        }
        Ok(Self {
            type_start: prefix_starts(&type_sizes),
            block_start: prefix_starts(&block_sizes),
            agent_type: expand_labels(&type_sizes),
            item_block: expand_labels(&block_sizes),
            type_names: (0..k).map(|p| format!("type{}", p + 1)).collect(),
            block_names: (0..l).map(|q| format!("block{}", q + 1)).collect(),
            type_sizes,
            block_sizes,
            utilities,
            capacities,
            clamped,
            quotas: None,
            metadata: BTreeMap::new(),
        })
    }

    /// Builds an instance whose capacities are derived from fractional quotas.
    pub fn with_quota_profile(
        type_sizes: Vec<usize>,
        block_sizes: Vec<usize>,
        utilities: Vec<f64>,
        quotas: QuotaProfile,
    ) -> Result<Self> {
        let caps = quotas.capacities(type_sizes.len(), &block_sizes)?;
        let mut inst = Self::new(type_sizes, block_sizes, utilities, caps)?;
        inst.quotas = Some(quotas);
        Ok(inst)
    }

    pub fn with_names(mut self, type_names: Vec<String>, block_names: Vec<String>) -> Result<Self> {
        if type_names.len() != self.k() || block_names.len() != self.l() {
            return Err(Error::InvalidInput("name list length mismatch".into()));
        }
        self.type_names = type_names;
        self.block_names = block_names;
        Ok(self)
    }

    pub fn with_metadata(mut self, key: impl Into<String>, values: Vec<f64>) -> Self {
        self.metadata.insert(key.into(), values);
        self
    }

    /// Same structure and capacities, different utilities.
    pub fn with_utilities(&self, utilities: Vec<f64>) -> Result<Self> {
        let mut inst = Self::new(
            self.type_sizes.clone(),
            self.block_sizes.clone(),
            utilities,
            self.capacities.clone(),
        )?;
        inst.clamped = self.clamped;
        inst.quotas = self.quotas.clone();
        inst.type_names = self.type_names.clone();
        inst.block_names = self.block_names.clone();
        inst.metadata = self.metadata.clone();
        Ok(inst)
    }

    /// Same structure and utilities with every capacity set to its block size.
    pub fn relaxed(&self) -> Self {
        let mut inst = self.clone();
        let l = self.l();
        for p in 0..self.k() {
            for q in 0..l {
                inst.capacities[p * l + q] = self.block_sizes[q];
            }
        }
        inst.quotas = None;
        inst
    }

    pub fn n(&self) -> usize {
        self.agent_type.len()
    }

    pub fn m(&self) -> usize {
        self.item_block.len()
    }

    pub fn k(&self) -> usize {
        self.type_sizes.len()
    }

    pub fn l(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn type_sizes(&self) -> &[usize] {
        &self.type_sizes
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn type_names(&self) -> &[String] {
        &self.type_names
    }

    pub fn block_names(&self) -> &[String] {
        &self.block_names
    }

    pub fn metadata(&self) -> &BTreeMap<String, Vec<f64>> {
        &self.metadata
    }

    pub fn quotas(&self) -> Option<&QuotaProfile> {
        self.quotas.as_ref()
    }

    /// Whether any capacity was larger than its block and got clamped.
    pub fn was_clamped(&self) -> bool {
        self.clamped
    }

    #[inline]
    pub fn agent_type(&self, agent: usize) -> usize {
        self.agent_type[agent]
    }

    #[inline]
    pub fn item_block(&self, item: usize) -> usize {
        self.item_block[item]
    }

    pub fn agents_of_type(&self, p: usize) -> Range<usize> {
        self.type_start[p]..self.type_start[p + 1]
    }

    pub fn items_of_block(&self, q: usize) -> Range<usize> {
        self.block_start[q]..self.block_start[q + 1]
    }

    #[inline]
    pub fn utility(&self, agent: usize, item: usize) -> f64 {
        self.utilities[agent * self.m() + item]
    }

    #[inline]
    pub fn row(&self, agent: usize) -> &[f64] {
        let m = self.m();
        &self.utilities[agent * m..(agent + 1) * m]
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    #[inline]
    pub fn capacity(&self, p: usize, q: usize) -> usize {
        self.capacities[p * self.l() + q]
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    /// Effective quota `λ_pq / |M_q|`; zero for empty blocks.
    pub fn effective_alpha(&self, p: usize, q: usize) -> f64 {
        let size = self.block_sizes[q];
        if size == 0 {
            0.0
        } else {
            self.capacity(p, q) as f64 / size as f64
        }
    }

    /// Quota `α_pq`: from the quota profile when present, else effective.
    pub fn alpha(&self, p: usize, q: usize) -> f64 {
        match &self.quotas {
            Some(qp) => qp.alpha(p, q, self.l()),
            None => self.effective_alpha(p, q),
        }
    }

    /// Pairs `(p, q)` with `λ_pq > |N_p|`. Allowed; informational only.
    pub fn capacities_above_type_size(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for p in 0..self.k() {
            for q in 0..self.l() {
                if self.capacity(p, q) > self.type_sizes[p] {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// First `(p, i, i', j)` with `u(i, j) != u(i', j)` for two agents of one
    /// type, in type / agent / item order. `None` when type-uniform.
    pub fn type_uniform_violation(&self) -> Option<(usize, usize, usize, usize)> {
        for p in 0..self.k() {
            let agents = self.agents_of_type(p);
            let Some(first) = agents.clone().next() else {
                continue;
            };
            let reference = self.row(first);
            for i in agents.skip(1) {
                if let Some(j) = self.row(i).iter().zip(reference).position(|(a, b)| a != b) {
                    return Some((p, first, i, j));
                }
            }
        }
        None
    }

    pub fn is_type_uniform(&self) -> bool {
        self.type_uniform_violation().is_none()
    }

    /// First `(i, q, j, j')` with `u(i, j) != u(i, j')` for two items of one
    /// block. `None` when block-uniform.
    pub fn block_uniform_violation(&self) -> Option<(usize, usize, usize, usize)> {
        for i in 0..self.n() {
            let row = self.row(i);
            for q in 0..self.l() {
                let items = self.items_of_block(q);
                let Some(first) = items.clone().next() else {
                    continue;
                };
                for j in items.skip(1) {
                    if row[j] != row[first] {
                        return Some((i, q, first, j));
                    }
                }
            }
        }
        None
    }

    pub fn is_block_uniform(&self) -> bool {
        self.block_uniform_violation().is_none()
    }

    /// 64-bit FNV-1a fingerprint of the structure, capacities and utilities.
    pub fn fingerprint(&self) -> u64 {
        let mut h = fnv::FnvHasher::default();
        for &s in &self.type_sizes {
            h.write_u64(s as u64);
        }
        h.write_u8(0xff);
        for &s in &self.block_sizes {
            h.write_u64(s as u64);
        }
        h.write_u8(0xff);
        for &c in &self.capacities {
            h.write_u64(c as u64);
        }
        h.write_u8(0xff);
        for &u in &self.utilities {
            h.write_u64(u.to_bits());
        }
        h.finish()
    }
}

/// A set of `(agent, item)` pairs; the 0/1 matrix `x_ij` in sparse form.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment {
    pairs: Vec<(usize, usize)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// Takes pairs in any order; they are stored sorted by agent then item.
    pub fn from_pairs(mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Item of each agent, `None` when unassigned. Assumes a matching.
    pub fn item_of_agent(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for &(i, j) in &self.pairs {
            out[i] = Some(j);
        }
        out
    }

    /// Number of agents of each type placed in each block, row-major `k × l`.
    pub fn type_block_counts(&self, inst: &Instance) -> Vec<usize> {
        let l = inst.l();
        let mut counts = vec![0; inst.k() * l];
        for &(i, j) in &self.pairs {
            counts[inst.agent_type(i) * l + inst.item_block(j)] += 1;
        }
        counts
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = fnv::FnvHasher::default();
        for &(i, j) in &self.pairs {
            h.write_u64(i as u64);
            h.write_u64(j as u64);
        }
        h.finish()
    }
}

/// The first constraint an assignment breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// An agent holds more than one item.
    AgentRepeated { agent: usize },
    /// An item is held by more than one agent.
    ItemRepeated { item: usize },
    /// More than `λ_pq` agents of type `p` in block `q`.
    Capacity {
        type_index: usize,
        block: usize,
        count: usize,
        capacity: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Ok,
    Violated(Violation),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

fn check_indices(inst: &Instance, asg: &Assignment) -> Result<()> {
    for &(i, j) in asg.pairs() {
        if i >= inst.n() {
            return Err(Error::IndexOutOfRange {
                what: "agent",
                index: i,
                len: inst.n(),
            });
        }
        if j >= inst.m() {
            return Err(Error::IndexOutOfRange {
                what: "item",
                index: j,
                len: inst.m(),
            });
        }
    }
    Ok(())
}

/// Checks the matching constraints (agents, then items) and then the
/// type-block capacities in `(p, q)` lexicographic order.
pub fn check_feasible(inst: &Instance, asg: &Assignment) -> Result<Verdict> {
    check_indices(inst, asg)?;

    let mut per_agent = vec![0usize; inst.n()];
    let mut per_item = vec![0usize; inst.m()];
    for &(i, j) in asg.pairs() {
        per_agent[i] += 1;
        per_item[j] += 1;
    }
    if let Some(agent) = per_agent.iter().position(|&c| c > 1) {
        return Ok(Verdict::Violated(Violation::AgentRepeated { agent }));
    }
    if let Some(item) = per_item.iter().position(|&c| c > 1) {
        return Ok(Verdict::Violated(Violation::ItemRepeated { item }));
    }

    let counts = asg.type_block_counts(inst);
    let l = inst.l();
    for p in 0..inst.k() {
        for q in 0..l {
            let count = counts[p * l + q];
            let capacity = inst.capacity(p, q);
            if count > capacity {
                return Ok(Verdict::Violated(Violation::Capacity {
                    type_index: p,
                    block: q,
                    count,
                    capacity,
                }));
            }
        }
    }
    Ok(Verdict::Ok)
}

/// Total utility of each type, `u_p(X)`. Pairs are summed in agent order.
pub fn per_type_welfare(inst: &Instance, asg: &Assignment) -> Result<Vec<f64>> {
    check_indices(inst, asg)?;
    let mut sums = vec![0.0; inst.k()];
    // pairs are kept sorted by agent, so this is a fixed order
    for &(i, j) in asg.pairs() {
        sums[inst.agent_type(i)] += inst.utility(i, j);
    }
    Ok(sums)
}

/// Utilitarian welfare `u(X)`, the sum of the per-type totals in type order.
pub fn welfare(inst: &Instance, asg: &Assignment) -> Result<f64> {
    Ok(per_type_welfare(inst, asg)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_block(types: Vec<usize>, m: usize, caps: Vec<usize>, u: f64) -> Instance {
        let n: usize = types.iter().sum();
        Instance::new(types, vec![m], vec![u; n * m], caps).unwrap()
    }

    #[test]
    fn empty_assignment_is_feasible_with_zero_welfare() {
        let inst = one_block(vec![2, 1], 3, vec![0, 0], 1.0);
        let asg = Assignment::new();
        assert_eq!(check_feasible(&inst, &asg).unwrap(), Verdict::Ok);
        assert_eq!(welfare(&inst, &asg).unwrap(), 0.0);
        assert_eq!(per_type_welfare(&inst, &asg).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn capacity_violation_is_reported() {
        let inst = one_block(vec![2], 2, vec![1], 1.0);
        let asg = Assignment::from_pairs(vec![(0, 0), (1, 1)]);
        assert_eq!(
            check_feasible(&inst, &asg).unwrap(),
            Verdict::Violated(Violation::Capacity {
                type_index: 0,
                block: 0,
                count: 2,
                capacity: 1
            })
        );
    }

    #[test]
    fn matching_rows_are_scanned_before_columns_and_caps() {
        let inst = one_block(vec![3], 3, vec![0], 1.0);
        let asg = Assignment::from_pairs(vec![(2, 0), (2, 1), (0, 1)]);
        assert_eq!(
            check_feasible(&inst, &asg).unwrap(),
            Verdict::Violated(Violation::AgentRepeated { agent: 2 })
        );
        let asg = Assignment::from_pairs(vec![(0, 2), (1, 2)]);
        assert_eq!(
            check_feasible(&inst, &asg).unwrap(),
            Verdict::Violated(Violation::ItemRepeated { item: 2 })
        );
    }

    #[test]
    fn out_of_range_indices_are_input_errors() {
        let inst = one_block(vec![1], 1, vec![1], 1.0);
        let err = check_feasible(&inst, &Assignment::from_pairs(vec![(0, 3)])).unwrap_err();
        assert!(err.is_input_error());
        assert!(welfare(&inst, &Assignment::from_pairs(vec![(5, 0)])).is_err());
    }

    #[test]
    fn single_pair_welfare_and_per_type_split() {
        let inst = Instance::new(vec![1, 1], vec![2], vec![3.0, 1.0, 2.0, 5.0], vec![1, 1]).unwrap();
        let asg = Assignment::from_pairs(vec![(0, 0), (1, 1)]);
        assert_eq!(per_type_welfare(&inst, &asg).unwrap(), vec![3.0, 5.0]);
        assert_eq!(welfare(&inst, &asg).unwrap(), 8.0);
        let single = Assignment::from_pairs(vec![(1, 0)]);
        assert_eq!(welfare(&inst, &single).unwrap(), 2.0);
    }

    #[test]
    fn capacities_are_clamped_to_block_size() {
        let inst = Instance::new(vec![1], vec![2], vec![0.0; 2], vec![5]).unwrap();
        assert!(inst.was_clamped());
        assert_eq!(inst.capacity(0, 0), 2);
        let ok = Instance::new(vec![1], vec![2], vec![0.0; 2], vec![2]).unwrap();
        assert!(!ok.was_clamped());
        assert_eq!(ok.capacities_above_type_size(), vec![(0, 0)]);
    }

    #[test]
    fn invalid_utilities_are_rejected() {
        assert!(Instance::new(vec![1], vec![1], vec![-1.0], vec![1]).is_err());
        assert!(Instance::new(vec![1], vec![1], vec![f64::NAN], vec![1]).is_err());
        assert!(Instance::new(vec![1], vec![2], vec![1.0], vec![1]).is_err());
    }

    #[test]
    fn quota_rounding_rules() {
        let qp = QuotaProfile::uniform(&[0.87, 0.25, 0.15], 1, Rounding::Floor);
        assert_eq!(qp.capacities(3, &[10]).unwrap(), vec![8, 2, 1]);
        let guard = QuotaProfile::uniform(&[0.29], 1, Rounding::Floor);
        assert_eq!(guard.capacities(1, &[100]).unwrap(), vec![29]);
        let exact = QuotaProfile::uniform(&[0.25], 1, Rounding::Exact);
        assert_eq!(exact.capacities(1, &[4]).unwrap(), vec![1]);
        assert!(exact.capacities(1, &[5]).is_err());
    }

    #[test]
    fn uniformity_predicates() {
        // two agents of one type, two blocks of two items
        let tu = Instance::new(vec![2], vec![2, 2], vec![1.0, 2.0, 3.0, 4.0, 1.0, 2.0, 3.0, 4.0], vec![2, 2]).unwrap();
        assert!(tu.is_type_uniform());
        assert!(!tu.is_block_uniform());
        assert_eq!(tu.block_uniform_violation(), Some((0, 0, 0, 1)));
        let bu = Instance::new(vec![2], vec![2, 2], vec![1.0, 1.0, 3.0, 3.0, 2.0, 2.0, 0.0, 0.0], vec![2, 2]).unwrap();
        assert!(bu.is_block_uniform());
        assert_eq!(bu.type_uniform_violation(), Some((0, 0, 1, 0)));
    }
}
