// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Assignment algorithms.
//!
//! | method          | guarantee                                   |
//! |-----------------|---------------------------------------------|
//! | `brute`         | exhaustive enumeration, used as an oracle   |
//! | `exact`         | branch-and-bound, optimal                   |
//! | `mcf-type`      | min-cost flow, optimal on type-uniform input |
//! | `mcf-block`     | min-cost flow, optimal on block-uniform input |
//! | `greedy`        | at least 1/3 of the constrained optimum     |
//! | `unconstrained` | optimum with the type-block caps dropped    |

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{check_feasible, welfare, Assignment, Instance};

pub mod bcm;
pub mod brute;
pub mod exact;
pub mod greedy;
pub mod uniform;
pub mod unconstrained;

pub use bcm::{reduce_from_bcm, reduce_to_bcm, BcmEdge, BcmInstance};
pub use brute::{solve_brute_force, solve_brute_force_with_budget, DEFAULT_NODE_BUDGET};
pub use exact::{solve_exact, solve_exact_with, ExactConfig};
pub use greedy::solve_greedy;
pub use uniform::{solve_block_uniform, solve_type_uniform, solve_type_uniform_explicit};
pub use unconstrained::solve_unconstrained;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "brute")]
    Brute,
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "mcf-type")]
    McfType,
    #[serde(rename = "mcf-block")]
    McfBlock,
    #[serde(rename = "greedy")]
    Greedy,
    #[serde(rename = "unconstrained")]
    Unconstrained,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Brute,
        Method::Exact,
        Method::McfType,
        Method::McfBlock,
        Method::Greedy,
        Method::Unconstrained,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Exact => "exact",
            Method::McfType => "mcf-type",
            Method::McfBlock => "mcf-block",
            Method::Greedy => "greedy",
            Method::Unconstrained => "unconstrained",
        }
    }

    /// Whether the method returns the constrained optimum (given its preconditions).
    pub fn is_exact_for_constrained(self) -> bool {
        matches!(
            self,
            Method::Brute | Method::Exact | Method::McfType | Method::McfBlock
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(alloc::format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimality {
    /// Proven optimal for the problem the method solves.
    Exact,
    /// Feasible; `ratio` is the worst-case fraction of the optimum, when known.
    Heuristic { ratio: Option<f64> },
    /// Exhaustive enumeration.
    Oracle,
}

impl Optimality {
    pub fn is_optimal(self) -> bool {
        !matches!(self, Optimality::Heuristic { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub pruned: u64,
    pub bound_evaluations: u64,
    pub augmentations: u64,
    pub budget_exhausted: bool,
    /// Upper bound on the optimum proven by a search that stopped early
    /// (or the root bound of a completed one).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub method: Method,
    pub assignment: Assignment,
    pub objective: f64,
    pub optimality: Optimality,
    pub stats: SolveStats,
}

impl SolveResult {
    /// Builds a result whose objective is recomputed from the assignment.
    pub(crate) fn new(
        inst: &Instance,
        method: Method,
        assignment: Assignment,
        optimality: Optimality,
        stats: SolveStats,
    ) -> Result<Self> {
        let objective = welfare(inst, &assignment)?;
        Ok(Self {
            method,
            assignment,
            objective,
            optimality,
            stats,
        })
    }

    /// Checks the result invariants: feasibility (for constrained methods)
    /// and objective equal to the recomputed welfare.
    pub fn verify(&self, inst: &Instance) -> core::result::Result<(), String> {
        if self.method != Method::Unconstrained {
            let verdict = check_feasible(inst, &self.assignment).map_err(|e| alloc::format!("{e}"))?;
            if !verdict.is_ok() {
                return Err(alloc::format!("{} returned infeasible assignment: {verdict:?}", self.method));
            }
        }
        let w = welfare(inst, &self.assignment).map_err(|e| alloc::format!("{e}"))?;
        if w != self.objective {
            return Err(alloc::format!("objective {} differs from welfare {w}", self.objective));
        }
        Ok(())
    }
}

impl Serialize for SolveResult {
    fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        let ratio = match self.optimality {
            Optimality::Heuristic { ratio } => ratio,
            _ => None,
        };
        let mut st = s.serialize_struct("SolveResult", 6)?;
        st.serialize_field("method", self.method.as_str())?;
        st.serialize_field("objective", &self.objective)?;
        st.serialize_field("optimal", &self.optimality.is_optimal())?;
        if let Some(r) = ratio {
            st.serialize_field("ratio", &r)?;
        } else {
            st.skip_field("ratio")?;
        }
        st.serialize_field("pairs", &self.assignment)?;
        st.serialize_field("stats", &self.stats)?;
        st.end()
    }
}

/// Runs the named solver with default settings.
pub fn solve(inst: &Instance, method: Method) -> Result<SolveResult> {
    match method {
        Method::Brute => solve_brute_force(inst),
        Method::Exact => solve_exact(inst),
        Method::McfType => solve_type_uniform(inst),
        Method::McfBlock => solve_block_uniform(inst),
        Method::Greedy => solve_greedy(inst),
        Method::Unconstrained => solve_unconstrained(inst),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("lp".parse::<Method>().is_err());
    }
}
