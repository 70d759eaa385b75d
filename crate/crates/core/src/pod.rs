// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Price of diversity: `PoD = OPT / OPT_C`, the ratio of the unconstrained
//! optimum to the optimum under type-block caps.
//!
//! Two closed-form upper bounds are provided. The quota bound is
//! `1 / min_pq α_pq`. The disparity bound is
//! `(1/β) / Σ_p ν_p min_q α_pq`, where `ν_p = |N_p| / n` and `β` is the
//! smallest ratio between a type's average utility and the overall average
//! in an optimal unconstrained assignment. Both hold with the effective
//! quotas `λ_pq / |M_q|`; the nominal quotas of a [`QuotaProfile`] can be
//! larger under floor rounding, so only the effective variants are
//! guaranteed to dominate the realized PoD.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::model::{check_feasible, per_type_welfare, Assignment, Instance, QuotaProfile, Rounding};
use crate::solvers::{solve, solve_unconstrained, Method, SolveResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// Quotas from the instance's quota profile (effective when absent).
    Nominal,
    /// `λ_pq / |M_q|` from the stored integer capacities.
    Effective,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PodReport {
    pub opt: f64,
    pub opt_c: f64,
    pub pod: ExtReal,
    pub bound_thm4: ExtReal,
    pub bound_thm4_effective: ExtReal,
    /// `None` when the unconstrained optimum is zero.
    pub beta: Option<f64>,
    pub beta_per_type: Option<Vec<f64>>,
    pub nu: Vec<f64>,
    pub bound_thm5: ExtReal,
    pub bound_combined: ExtReal,
    /// Quota mode used by `bound_thm5` and `bound_combined`.
    pub mode: BoundMode,
    pub method: Method,
    /// Whether `opt_c` is proven optimal. A budget-limited solve gives a
    /// lower bound on `OPT_C`, hence an upper bound on the PoD.
    pub opt_c_exact: bool,
    pub instance_hash: String,
    pub assignment_hash: String,
}

/// PoD under the conventions `0/0 = 1` and `x/0 = +∞`.
pub fn pod_ratio(opt: f64, opt_c: f64) -> ExtReal {
    if opt_c > 0.0 {
        ExtReal::Finite(opt / opt_c)
    } else if opt > 0.0 {
        ExtReal::Infinite
    } else {
        ExtReal::Finite(1.0)
    }
}

/// The quota bound `1 / min α_pq` over blocks with at least one item.
pub fn bound_thm4(inst: &Instance, mode: BoundMode) -> ExtReal {
    let mut min = f64::INFINITY;
    for p in 0..inst.k() {
        for q in 0..inst.l() {
            if inst.block_sizes()[q] > 0 {
                min = min.min(quota(inst, p, q, mode));
            }
        }
    }
    if min.is_finite() {
        ExtReal::recip(min)
    } else {
        // no items at all: nothing can be lost
        ExtReal::Finite(1.0)
    }
}

fn quota(inst: &Instance, p: usize, q: usize, mode: BoundMode) -> f64 {
    match mode {
        BoundMode::Nominal => inst.alpha(p, q),
        BoundMode::Effective => inst.effective_alpha(p, q),
    }
}

/// `min_q α_pq` for every type, over nonempty blocks.
pub fn min_alpha_per_type(inst: &Instance, mode: BoundMode) -> Vec<f64> {
    (0..inst.k())
        .map(|p| {
            (0..inst.l())
                .filter(|&q| inst.block_sizes()[q] > 0)
                .map(|q| quota(inst, p, q, mode))
                .fold(f64::INFINITY, f64::min)
        })
        .map(|a| if a.is_finite() { a } else { 1.0 })
        .collect()
}

/// `ν_p = |N_p| / n`.
pub fn type_proportions(inst: &Instance) -> Vec<f64> {
    let n = inst.n() as f64;
    inst.type_sizes()
        .iter()
        .map(|&s| if n > 0.0 { s as f64 / n } else { 0.0 })
        .collect()
}

/// `β = min_p β_p` with `β_p = (u_p(X*) / |N_p|) / (u(X*) / n)`.
/// Empty types report `β_p = 1` and are left out of the minimum.
pub fn disparity_beta(inst: &Instance, x_star: &Assignment) -> Result<(f64, Vec<f64>)> {
    let verdict = check_feasible(&inst.relaxed(), x_star)?;
    if !verdict.is_ok() {
        return Err(Error::InvalidInput(format!("not a matching: {verdict:?}")));
    }
    let per_type = per_type_welfare(inst, x_star)?;
    let total: f64 = per_type.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("disparity is undefined when total welfare is zero"));
    }
    let avg = total / inst.n() as f64;
    let betas: Vec<f64> = per_type
        .iter()
        .zip(inst.type_sizes())
        .map(|(&w, &s)| if s == 0 { 1.0 } else { (w / s as f64) / avg })
        .collect();
    let beta = betas
        .iter()
        .zip(inst.type_sizes())
        .filter(|(_, &s)| s > 0)
        .map(|(&b, _)| b)
        .fold(f64::INFINITY, f64::min);
    Ok((beta.min(1.0), betas))
}

/// The disparity bound `(1/β) / Σ_p ν_p min_q α_pq`; `+∞` when `β` or the
/// denominator is zero.
pub fn bound_thm5(beta: f64, nu: &[f64], min_alpha_per_type: &[f64]) -> ExtReal {
    assert_eq!(nu.len(), min_alpha_per_type.len());
    let denom: f64 = nu.iter().zip(min_alpha_per_type).map(|(v, a)| v * a).sum();
    ExtReal::ratio(1.0, beta * denom)
}

/// Optima with the selected exact method, then the report.
pub fn compute_pod(inst: &Instance, method: Method, mode: BoundMode) -> Result<PodReport> {
    if !method.is_exact_for_constrained() {
        return Err(Error::Precondition(format!("{method} is not an exact solver")));
    }
    let unconstrained = solve_unconstrained(inst)?;
    let constrained = solve(inst, method)?;
    PodReport::from_results(inst, &unconstrained, &constrained, mode)
}

impl PodReport {
    /// Builds the report from an unconstrained optimum and a constrained
    /// solution (optimal or not).
    pub fn from_results(
        inst: &Instance,
        unconstrained: &SolveResult,
        constrained: &SolveResult,
        mode: BoundMode,
    ) -> Result<Self> {
        let opt = unconstrained.objective;
        let opt_c = constrained.objective;
        let nu = type_proportions(inst);
        let (beta, beta_per_type) = match disparity_beta(inst, &unconstrained.assignment) {
            Ok((b, v)) => (Some(b), Some(v)),
            Err(Error::Degenerate(_)) => (None, None),
            Err(e) => return Err(e),
        };
        let bound_thm4_nominal = bound_thm4(inst, BoundMode::Nominal);
        let bound_thm4_effective = bound_thm4(inst, BoundMode::Effective);
        let bound_thm5 = match beta {
            Some(b) => bound_thm5(b, &nu, &min_alpha_per_type(inst, mode)),
            None => ExtReal::Infinite,
        };
        let thm4_in_mode = match mode {
            BoundMode::Nominal => bound_thm4_nominal,
            BoundMode::Effective => bound_thm4_effective,
        };
        Ok(Self {
            opt,
            opt_c,
            pod: pod_ratio(opt, opt_c),
            bound_thm4: bound_thm4_nominal,
            bound_thm4_effective,
            beta,
            beta_per_type,
            nu,
            bound_thm5,
            bound_combined: thm4_in_mode.min(bound_thm5),
            mode,
            method: constrained.method,
            opt_c_exact: constrained.optimality.is_optimal(),
            instance_hash: format!("{:016x}", inst.fingerprint()),
            assignment_hash: format!("{:016x}", unconstrained.assignment.fingerprint()),
        })
    }

    /// Whether the realized PoD respects the effective quota bound and the
    /// disparity bound, with relative slack `tol`.
    pub fn respects_bounds(&self, tol: f64) -> bool {
        let within = |b: ExtReal| match (self.pod, b) {
            (_, ExtReal::Infinite) => true,
            (ExtReal::Infinite, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(p), ExtReal::Finite(b)) => p <= b * (1.0 + tol),
        };
        within(self.bound_thm4_effective) && within(self.bound_thm5)
    }
}

/// Instance on which the quota bound is attained: utility 1 on
/// `N_p0 × M_q0` and 0 elsewhere, caps from `alphas` with exact rounding.
pub fn make_tightness_instance(
    type_sizes: &[usize],
    block_sizes: &[usize],
    alphas: &[f64],
    p0: usize,
    q0: usize,
) -> Result<Instance> {
    let (k, l) = (type_sizes.len(), block_sizes.len());
    if alphas.len() != k * l {
        return Err(Error::InvalidInput(format!("expected {k}x{l} quotas, got {}", alphas.len())));
    }
    if p0 >= k || q0 >= l {
        return Err(Error::InvalidInput(format!("({p0}, {q0}) is not a type-block pair")));
    }
    if type_sizes[p0] < block_sizes[q0] {
        return Err(Error::Precondition(format!(
            "type {p0} has {} agents but block {q0} has {} items",
            type_sizes[p0], block_sizes[q0]
        )));
    }
    let a0 = alphas[p0 * l + q0];
    for p in 0..k {
        for q in 0..l {
            if block_sizes[q] > 0 && alphas[p * l + q] < a0 {
                return Err(Error::Precondition(format!(
                    "alpha[{p0}][{q0}] = {a0} is not the minimum quota (alpha[{p}][{q}] is smaller)"
                )));
            }
        }
    }
    let profile = QuotaProfile::new(alphas.to_vec(), Rounding::Exact);
    // the exact rounding rule needs every quota integral, not only the tight one
    profile
        .capacities(k, block_sizes)
        .map_err(|e| Error::Precondition(format!("{e}")))?;
    let (n, m): (usize, usize) = (type_sizes.iter().sum(), block_sizes.iter().sum());
    let mut u = vec![0.0; n * m];
    let agents_start: usize = type_sizes[..p0].iter().sum();
    let items_start: usize = block_sizes[..q0].iter().sum();
    for i in agents_start..agents_start + type_sizes[p0] {
        for j in items_start..items_start + block_sizes[q0] {
            u[i * m + j] = 1.0;
        }
    }
    Instance::with_quota_profile(type_sizes.to_vec(), block_sizes.to_vec(), u, profile)
}

/// `k` types and `k` blocks of `mu` members each, utility 1 between type
/// `p` and block `p`, all caps 1. Its PoD is `mu`.
pub fn diagonal_groups_instance(k: usize, mu: usize) -> Result<Instance> {
    let n = k * mu;
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i / mu.max(1) == j / mu.max(1) {
                u[i * n + j] = 1.0;
            }
        }
    }
    Instance::new(vec![mu; k], vec![mu; k], u, vec![1; k * k])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pod_conventions() {
        assert_eq!(pod_ratio(0.0, 0.0), ExtReal::Finite(1.0));
        assert_eq!(pod_ratio(2.0, 0.0), ExtReal::Infinite);
        assert_eq!(pod_ratio(6.0, 3.0), ExtReal::Finite(2.0));
    }

    #[test]
    fn quota_bound_on_uniform_block_size_ten() {
        let profile = QuotaProfile::uniform(&[0.87, 0.25, 0.15], 2, Rounding::Floor);
        let inst = Instance::with_quota_profile(vec![1, 1, 1], vec![10, 10], vec![0.0; 60], profile).unwrap();
        assert_eq!(inst.capacities(), &[8, 8, 2, 2, 1, 1]);
        assert_eq!(bound_thm4(&inst, BoundMode::Effective), ExtReal::Finite(10.0));
        let nominal = bound_thm4(&inst, BoundMode::Nominal).to_f64();
        assert!((nominal - 1.0 / 0.15).abs() < 1e-12);
    }

    #[test]
    fn disparity_of_two_equal_types() {
        let s = 3;
        let mut u = vec![0.0; 2 * s * 2 * s];
        let n = 2 * s;
        // type 0 totals 2, type 1 totals 6 on the diagonal
        u[0] = 2.0;
        for i in s..n {
            u[i * n + i] = 2.0;
        }
        let inst = Instance::new(vec![s, s], vec![n], u, vec![n, n]).unwrap();
        let x = solve_unconstrained(&inst).unwrap().assignment;
        let (beta, per) = disparity_beta(&inst, &x).unwrap();
        assert!((beta - 0.5).abs() < 1e-12);
        assert!((per[0] - 0.5).abs() < 1e-12 && (per[1] - 1.5).abs() < 1e-12);
        let zero = Instance::new(vec![1], vec![1], vec![0.0], vec![1]).unwrap();
        assert!(matches!(
            disparity_beta(&zero, &Assignment::new()),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn disparity_bound_values() {
        let nu = [0.741, 0.134, 0.125];
        let alpha = [0.87, 0.25, 0.15];
        let b1 = bound_thm5(1.0, &nu, &alpha).to_f64();
        let independent = 1.0 / (0.87 * 0.741 + 0.25 * 0.134 + 0.15 * 0.125);
        assert_eq!(b1, independent);
        assert!((bound_thm5(0.5, &nu, &alpha).to_f64() - 2.0 * independent).abs() < 1e-12);
        assert_eq!(bound_thm5(0.25, &[1.0], &[1.0]), ExtReal::Finite(4.0));
        assert_eq!(bound_thm5(0.0, &[1.0], &[1.0]), ExtReal::Infinite);
    }

    #[test]
    fn tightness_instances() {
        for (alpha, size) in [(0.25, 4usize), (0.2, 5), (1.0, 3)] {
            let inst = make_tightness_instance(&[size], &[size], &[alpha], 0, 0).unwrap();
            let r = compute_pod(&inst, Method::Exact, BoundMode::Effective).unwrap();
            assert_eq!(r.pod, ExtReal::Finite(1.0 / alpha));
            assert_eq!(r.pod, r.bound_thm4);
        }
        assert!(make_tightness_instance(&[3], &[4], &[0.25], 0, 0)
            .unwrap_err()
            .is_precondition_error());
        assert!(make_tightness_instance(&[4, 4], &[4], &[0.5, 0.25], 0, 0)
            .unwrap_err()
            .is_precondition_error());
        assert!(make_tightness_instance(&[4], &[4], &[0.3], 0, 0)
            .unwrap_err()
            .is_precondition_error());
    }

    #[test]
    fn diagonal_groups_pod_is_group_size() {
        let inst = diagonal_groups_instance(2, 3).unwrap();
        let r = compute_pod(&inst, Method::Brute, BoundMode::Effective).unwrap();
        assert_eq!((r.opt, r.opt_c), (6.0, 2.0));
        assert_eq!(r.pod, ExtReal::Finite(3.0));
        assert!(r.respects_bounds(1e-12));
    }

    #[test]
    fn heuristic_method_is_rejected() {
        let inst = diagonal_groups_instance(1, 1).unwrap();
        assert!(compute_pod(&inst, Method::Greedy, BoundMode::Effective)
            .unwrap_err()
            .is_precondition_error());
    }
}
