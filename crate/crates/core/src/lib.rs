// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Assignment with type-block constraints.
//!
//! Agents are partitioned into *types*, items into *blocks*, and every
//! (type, block) pair carries a capacity: the number of agents of that type
//! who may receive an item of that block. This crate holds the problem model
//! and everything that is pure computation on top of it:
//!
//! - [`model`]: instances, assignments, feasibility and welfare.
//! - [`solvers`]: brute force, branch-and-bound, min-cost-flow special
//!   cases, greedy, and the two reductions to/from bounded color matching.
//! - [`pod`]: price of diversity and its closed-form upper bounds.
//! - [`lottery`]: the quota-respecting serial lottery and Monte-Carlo runs.
//! - [`gen`]: utility-model instance generators over geographic data.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! the experiment harness live in the `assigntc` crate.
#![no_std]

extern crate alloc;

pub mod assignment;
pub mod error;
pub mod extreal;
pub mod flow;
pub mod gen;
pub mod lottery;
pub mod model;
pub mod pod;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use model::{Assignment, Instance, QuotaProfile, Rounding, Verdict, Violation};
pub use solvers::{Method, Optimality, SolveResult, SolveStats};
