// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("instance is not type-uniform: type {type_index}, agents {agent} and {other}, item {item}")]
    NotTypeUniform {
        type_index: usize,
        agent: usize,
        other: usize,
        item: usize,
    },
    #[error("instance is not block-uniform: agent {agent}, block {block}, items {item} and {other}")]
    NotBlockUniform {
        agent: usize,
        block: usize,
        item: usize,
        other: usize,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("enumeration budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
}

impl Error {
    /// Errors caused by malformed input rather than by the chosen method.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::IndexOutOfRange { .. } | Error::InvalidInput(_))
    }

    pub fn is_precondition_error(&self) -> bool {
        matches!(
            self,
            Error::NotTypeUniform { .. }
                | Error::NotBlockUniform { .. }
                | Error::Precondition(_)
                | Error::Degenerate(_)
        )
    }
}
