// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const PRECONDITION: i32 = 3;
    pub const BUDGET: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] assigntc_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{file}, row {row}: {message}")]
    Csv { file: String, row: usize, message: String },
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error("{0}")]
    Input(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error("search stopped after its budget; best objective found {objective}")]
    Budget { objective: f64 },
}

impl AppError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(e) if e.is_precondition_error() => exit::PRECONDITION,
            AppError::Core(assigntc_core::Error::BudgetExceeded { .. }) | AppError::Budget { .. } => exit::BUDGET,
            AppError::Check(_) => exit::FAILURE,
            _ => exit::INPUT,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
