// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! JSON interchange for instances and assignments.
//!
//! ```json
//! {
//!   "types":  [{"name": "A", "size": 2}],
//!   "blocks": [{"name": "X", "size": 2}],
//!   "capacities": {"lambda": [[1]]},
//!   "utilities": [1, 0, 0, 1]
//! }
//! ```
//!
//! `capacities` holds either an integer `lambda` matrix or a fractional
//! `alpha` matrix with `rounding` (`"floor"` or `"exact"`). When both are
//! present they must agree. An assignment is an array of `[agent, item]`
//! pairs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use assigntc_core::{Assignment, Instance, QuotaProfile, Rounding};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Named {
    pub name: String,
    pub size: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CapacitySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounding: Option<Rounding>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub types: Vec<Named>,
    pub blocks: Vec<Named>,
    pub capacities: CapacitySpec,
    pub utilities: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, Vec<f64>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        let (k, l) = (inst.k(), inst.l());
        let named = |names: &[String], sizes: &[usize]| {
            names
                .iter()
                .zip(sizes)
                .map(|(name, &size)| Named {
                    name: name.clone(),
                    size,
                })
                .collect()
        };
        let lambda = (0..k).map(|p| (0..l).map(|q| inst.capacity(p, q)).collect()).collect();
        let (alpha, rounding) = match inst.quotas() {
            Some(qp) => (
                Some((0..k).map(|p| (0..l).map(|q| qp.alpha(p, q, l)).collect()).collect()),
                Some(qp.rounding),
            ),
            None => (None, None),
        };
        Self {
            types: named(inst.type_names(), inst.type_sizes()),
            blocks: named(inst.block_names(), inst.block_sizes()),
            capacities: CapacitySpec {
                lambda: Some(lambda),
                alpha,
                rounding,
            },
            utilities: inst.utilities().to_vec(),
            metadata: inst.metadata().clone(),
        }
    }

    pub fn into_instance(self) -> AppResult<Instance> {
        let (k, l) = (self.types.len(), self.blocks.len());
        let type_sizes: Vec<usize> = self.types.iter().map(|t| t.size).collect();
        let block_sizes: Vec<usize> = self.blocks.iter().map(|b| b.size).collect();
        let flatten_checked = |rows: &Vec<Vec<f64>>, what: &str| -> AppResult<Vec<f64>> {
            if rows.len() != k || rows.iter().any(|r| r.len() != l) {
                return Err(AppError::Input(format!("`{what}` must be a {k}x{l} matrix")));
            }
            Ok(rows.iter().flatten().copied().collect())
        };
        let inst = match (&self.capacities.lambda, &self.capacities.alpha) {
            (None, None) => {
                return Err(AppError::Input("`capacities` needs `lambda` or `alpha`".into()));
            }
            (Some(lambda), None) => {
                let as_f: Vec<Vec<f64>> = lambda.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
                flatten_checked(&as_f, "lambda")?;
                let caps = lambda.iter().flatten().copied().collect();
                Instance::new(type_sizes, block_sizes, self.utilities, caps)?
            }
            (lambda, Some(alpha)) => {
                let rounding = self
                    .capacities
                    .rounding
                    .ok_or_else(|| AppError::Input("`alpha` needs `rounding`".into()))?;
                let profile = QuotaProfile::new(flatten_checked(alpha, "alpha")?, rounding);
                let inst = Instance::with_quota_profile(type_sizes, block_sizes, self.utilities, profile)?;
                if let Some(lambda) = lambda {
                    let given: Vec<usize> = lambda.iter().flatten().copied().collect();
                    if given.as_slice() != inst.capacities() {
                        return Err(AppError::Input("`lambda` disagrees with `alpha` and `rounding`".into()));
                    }
                }
                inst
            }
        };
        let mut inst = inst.with_names(
            self.types.into_iter().map(|t| t.name).collect(),
            self.blocks.into_iter().map(|b| b.name).collect(),
        )?;
        for (key, values) in self.metadata {
            inst = inst.with_metadata(key, values);
        }
        Ok(inst)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| AppError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> AppResult<()> {
    let text = to_json(value);
    fs::write(path, text + "\n").map_err(|e| AppError::io(path, e))
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}

pub fn read_instance(path: &Path) -> AppResult<Instance> {
    read_json::<InstanceFile>(path)?.into_instance()
}

pub fn write_instance(path: &Path, inst: &Instance) -> AppResult<()> {
    write_json(path, &InstanceFile::from_instance(inst))
}

pub fn parse_instance(text: &str) -> AppResult<Instance> {
    serde_json::from_str::<InstanceFile>(text)
        .map_err(|source| AppError::Json {
            path: "<string>".into(),
            source,
        })?
        .into_instance()
}

pub fn read_assignment(path: &Path) -> AppResult<Assignment> {
    let pairs: Vec<(usize, usize)> = read_json(path)?;
    Ok(Assignment::from_pairs(pairs))
}

pub fn write_assignment(path: &Path, asg: &Assignment) -> AppResult<()> {
    write_json(path, asg.pairs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_lambda_and_alpha() {
        let inst = Instance::new(vec![1, 1], vec![2], vec![0.5, 0.25, 1.0 / 3.0, 0.0], vec![1, 2]).unwrap();
        let back = parse_instance(&to_json(&InstanceFile::from_instance(&inst))).unwrap();
        assert_eq!(back, inst);

        let profile = QuotaProfile::new(vec![0.5, 0.29], Rounding::Floor);
        let q = Instance::with_quota_profile(vec![1, 1], vec![100], vec![1.0; 200], profile).unwrap();
        let back = parse_instance(&to_json(&InstanceFile::from_instance(&q))).unwrap();
        assert_eq!(back.capacities(), &[50, 29]);
        assert_eq!(back, q);
    }

    #[test]
    fn schema_errors() {
        let missing = r#"{"types":[{"name":"a","size":1}],"blocks":[{"name":"b","size":1}],"capacities":{},"utilities":[1]}"#;
        assert!(parse_instance(missing).is_err());
        let shape = r#"{"types":[{"name":"a","size":1}],"blocks":[{"name":"b","size":1}],"capacities":{"lambda":[[1,1]]},"utilities":[1]}"#;
        assert!(parse_instance(shape).is_err());
        let clash = r#"{"types":[{"name":"a","size":1}],"blocks":[{"name":"b","size":4}],"capacities":{"lambda":[[1]],"alpha":[[0.5]],"rounding":"floor"},"utilities":[1,1,1,1]}"#;
        assert!(parse_instance(clash).is_err());
    }
}
