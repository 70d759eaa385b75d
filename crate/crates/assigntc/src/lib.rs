// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! File formats, datasets, experiments and the command-line interface on
//! top of `assigntc-core`.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod geodata;
pub mod io;

pub use error::{exit, AppError, AppResult};
