// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! CSV datasets for the instance generators.
//!
//! A dataset is a directory with these files (header row required):
//!
//! | file               | columns                                   | required |
//! |--------------------|-------------------------------------------|----------|
//! | `blocks.csv`       | `name,size,lat,lon`                       | yes      |
//! | `types.csv`        | `name,proportion,salary[,quota]`          | yes      |
//! | `regions.csv`      | `name,lat,lon,pop_<type>...`              | no       |
//! | `prices.csv`       | `category,block,lb,ub`                    | no       |
//! | `tracts.csv`       | `tract_id,tier,lat,lon` (tier from 1)     | no       |
//! | `compositions.csv` | `n,<type>...`                             | no       |
//! | `domain.csv`       | `lat,lon`, polygon vertices in order      | no       |
//!
//! `prices.csv` names blocks by name. Population and composition columns
//! follow the order of `types.csv`.

use std::fs;
use std::path::Path;

use assigntc_core::gen::{Block, Composition, GeoDataset, LatLon, PriceBound, Region, Tract, TypeStat};

use crate::error::{AppError, AppResult};

/// Names accepted by [`load_dataset`] without a directory.
pub const BUILTIN: [&str; 3] = ["sg", "sg-desk", "chicago"];

/// A dataset plus the per-type default quotas from `types.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub data: GeoDataset,
    pub quotas: Option<Vec<f64>>,
}

macro_rules! fixture {
    ($dir:literal, $file:literal) => {
        include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/", $dir, "/", $file))
    };
}

fn builtin_file(name: &str, file: &str) -> Option<&'static str> {
    Some(match (name, file) {
        ("sg", "blocks.csv") => fixture!("sg", "blocks.csv"),
        ("sg", "types.csv") => fixture!("sg", "types.csv"),
        ("sg", "regions.csv") => fixture!("sg", "regions.csv"),
        ("sg", "prices.csv") => fixture!("sg", "prices.csv"),
        ("sg", "compositions.csv") => fixture!("sg", "compositions.csv"),
        ("sg-desk", "blocks.csv") => fixture!("sg-desk", "blocks.csv"),
        ("sg-desk", "types.csv") => fixture!("sg-desk", "types.csv"),
        ("sg-desk", "regions.csv") => fixture!("sg-desk", "regions.csv"),
        ("sg-desk", "prices.csv") => fixture!("sg-desk", "prices.csv"),
        ("sg-desk", "compositions.csv") => fixture!("sg-desk", "compositions.csv"),
        ("chicago", "blocks.csv") => fixture!("chicago", "blocks.csv"),
        ("chicago", "types.csv") => fixture!("chicago", "types.csv"),
        ("chicago", "tracts.csv") => fixture!("chicago", "tracts.csv"),
        ("chicago", "compositions.csv") => fixture!("chicago", "compositions.csv"),
        _ => return None,
    })
}

/// Loads a dataset from a directory, or a builtin fixture by name. A path
/// that exists wins over a builtin of the same name.
pub fn load_dataset(spec: &str) -> AppResult<Dataset> {
    let path = Path::new(spec);
    if path.is_dir() {
        let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        return parse_dataset(&name, |file| {
            let p = path.join(file);
            match fs::read_to_string(&p) {
                Ok(text) => Ok(Some(text)),
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
                Err(e) => Err(AppError::io(p, e)),
            }
        });
    }
    if BUILTIN.contains(&spec) {
        return parse_dataset(spec, |file| Ok(builtin_file(spec, file).map(str::to_owned)));
    }
    Err(AppError::Input(format!(
        "dataset `{spec}` is neither a directory nor one of {}",
        BUILTIN.join(", ")
    )))
}

/// Parses a dataset from a file lookup returning `None` for missing files.
pub fn parse_dataset(
    name: &str,
    mut read: impl FnMut(&str) -> AppResult<Option<String>>,
) -> AppResult<Dataset> {
    let mut require = |file: &str| -> AppResult<Table> {
        match read(file)? {
            Some(text) => Table::parse(file, &text),
            None => Err(AppError::Input(format!("dataset `{name}` has no {file}"))),
        }
    };
    let blocks_t = require("blocks.csv")?;
    let types_t = require("types.csv")?;
    let mut optional = |file: &str| -> AppResult<Option<Table>> {
        read(file)?.map(|text| Table::parse(file, &text)).transpose()
    };
    let regions_t = optional("regions.csv")?;
    let prices_t = optional("prices.csv")?;
    let tracts_t = optional("tracts.csv")?;
    let comps_t = optional("compositions.csv")?;
    let domain_t = optional("domain.csv")?;

    blocks_t.expect_columns(&["name", "size", "lat", "lon"])?;
    let mut blocks = Vec::new();
    for r in &blocks_t.rows {
        blocks.push(Block {
            name: r.text(0).to_owned(),
            size: r.parse(1, "size")?,
            loc: LatLon::new(r.parse(2, "lat")?, r.parse(3, "lon")?),
        });
    }

    types_t.expect_prefix(&["name", "proportion", "salary"])?;
    let has_quota = types_t.header.get(3).map(String::as_str) == Some("quota");
    let mut types = Vec::new();
    let mut quotas = Vec::new();
    for r in &types_t.rows {
        types.push(TypeStat {
            name: r.text(0).to_owned(),
            proportion: r.parse(1, "proportion")?,
            salary: r.parse(2, "salary")?,
        });
        if has_quota {
            quotas.push(r.parse(3, "quota")?);
        }
    }
    let k = types.len();

    let mut regions = Vec::new();
    if let Some(t) = regions_t {
        t.expect_prefix(&["name", "lat", "lon"])?;
        if t.header.len() != 3 + k {
            return Err(t.error(0, format!("expected {k} population columns after lat,lon")));
        }
        for r in &t.rows {
            let population = (0..k).map(|p| r.parse(3 + p, "population")).collect::<AppResult<_>>()?;
            regions.push(Region {
                name: r.text(0).to_owned(),
                centroid: LatLon::new(r.parse(1, "lat")?, r.parse(2, "lon")?),
                population,
            });
        }
    }

    let mut prices = Vec::new();
    if let Some(t) = prices_t {
        t.expect_columns(&["category", "block", "lb", "ub"])?;
        for r in &t.rows {
            let block_name = r.text(1);
            let block = blocks
                .iter()
                .position(|b| b.name == block_name)
                .ok_or_else(|| r.error(format!("unknown block `{block_name}`")))?;
            prices.push(PriceBound {
                category: r.text(0).to_owned(),
                block,
                lb: r.parse(2, "lb")?,
                ub: r.parse(3, "ub")?,
            });
        }
    }

    let mut tracts = Vec::new();
    if let Some(t) = tracts_t {
        t.expect_columns(&["tract_id", "tier", "lat", "lon"])?;
        for r in &t.rows {
            let tier: usize = r.parse(1, "tier")?;
            if tier == 0 || tier > k {
                return Err(r.error(format!("tier {tier} outside 1..={k}")));
            }
            tracts.push(Tract {
                id: r.text(0).to_owned(),
                tier: tier - 1,
                loc: LatLon::new(r.parse(2, "lat")?, r.parse(3, "lon")?),
            });
        }
    }

    let mut compositions = Vec::new();
    if let Some(t) = comps_t {
        t.expect_prefix(&["n"])?;
        if t.header.len() != 1 + k {
            return Err(t.error(0, format!("expected {k} type columns after n")));
        }
        for r in &t.rows {
            let n = r.parse(0, "n")?;
            let sizes: Vec<usize> = (0..k).map(|p| r.parse(1 + p, "size")).collect::<AppResult<_>>()?;
            if sizes.iter().sum::<usize>() != n {
                return Err(r.error(format!("sizes do not sum to {n}")));
            }
            compositions.push(Composition { n, sizes });
        }
    }

    let mut domain = Vec::new();
    if let Some(t) = domain_t {
        t.expect_columns(&["lat", "lon"])?;
        for r in &t.rows {
            domain.push(LatLon::new(r.parse(0, "lat")?, r.parse(1, "lon")?));
        }
        if domain.len() < 3 {
            return Err(t.error(0, "a domain polygon needs at least 3 vertices".into()));
        }
    }

    let data = GeoDataset {
        blocks,
        types,
        regions,
        prices,
        tracts,
        domain,
        compositions,
    };
    data.validate()?;
    Ok(Dataset {
        name: name.to_owned(),
        data,
        quotas: has_quota.then_some(quotas),
    })
}

struct Table {
    file: String,
    header: Vec<String>,
    rows: Vec<Row>,
}

struct Row {
    file: String,
    line: usize,
    fields: Vec<String>,
}

impl Table {
    fn parse(file: &str, text: &str) -> AppResult<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let err = |line: usize, e: csv::Error| AppError::Csv {
            file: file.to_owned(),
            row: line,
            message: e.to_string(),
        };
        let header = rdr.headers().map_err(|e| err(1, e))?.iter().map(str::to_owned).collect::<Vec<_>>();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                err(line, e)
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            rows.push(Row {
                file: file.to_owned(),
                line,
                fields: rec.iter().map(str::to_owned).collect(),
            });
        }
        Ok(Self {
            file: file.to_owned(),
            header,
            rows,
        })
    }

    fn error(&self, line: usize, message: String) -> AppError {
        AppError::Csv {
            file: self.file.clone(),
            row: line.max(1),
            message,
        }
    }

    fn expect_prefix(&self, cols: &[&str]) -> AppResult<()> {
        if self.header.len() < cols.len() || self.header.iter().zip(cols).any(|(h, c)| h != c) {
            return Err(self.error(1, format!("header must start with {}", cols.join(","))));
        }
        Ok(())
    }

    fn expect_columns(&self, cols: &[&str]) -> AppResult<()> {
        if self.header.len() != cols.len() {
            return Err(self.error(1, format!("header must be {}", cols.join(","))));
        }
        self.expect_prefix(cols)
    }
}

impl Row {
    fn text(&self, col: usize) -> &str {
        self.fields.get(col).map_or("", String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, col: usize, what: &str) -> AppResult<T> {
        let raw = self.text(col);
        raw.parse().map_err(|_| self.error(format!("invalid {what} `{raw}`")))
    }

    fn error(&self, message: String) -> AppError {
        AppError::Csv {
            file: self.file.clone(),
            row: self.line,
            message,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_files(files: &'static [(&'static str, &'static str)]) -> AppResult<Dataset> {
        parse_dataset("t", |f| Ok(files.iter().find(|(n, _)| *n == f).map(|(_, t)| t.to_string())))
    }

    #[test]
    fn builtins_load() {
        for name in BUILTIN {
            let d = load_dataset(name).unwrap();
            assert!(d.quotas.is_some(), "{name}");
        }
        let sg = load_dataset("sg").unwrap();
        assert_eq!(sg.data.m(), 1350);
        assert_eq!(sg.data.composition(1350), vec![1000, 180, 170]);
        let desk = load_dataset("sg-desk").unwrap();
        assert_eq!(desk.data.m(), 135);
        assert_eq!(desk.data.composition(135), vec![100, 18, 17]);
        let chi = load_dataset("chicago").unwrap();
        assert_eq!(chi.data.blocks.len(), 37);
        assert_eq!(chi.data.m(), 2261);
        assert_eq!(chi.data.composition(2261), vec![613, 622, 533, 493]);
        assert!(load_dataset("nowhere").is_err());
    }

    #[test]
    fn errors_name_the_row() {
        let e = from_files(&[
            ("blocks.csv", "name,size,lat,lon\nA,3,1.3,103.8\nB,x,1.3,103.8\n"),
            ("types.csv", "name,proportion,salary\nT,1,100\n"),
        ])
        .unwrap_err();
        match e {
            AppError::Csv { file, row, .. } => assert_eq!((file.as_str(), row), ("blocks.csv", 3)),
            other => panic!("{other:?}"),
        }
        let e = from_files(&[
            ("blocks.csv", "name,size,lat,lon\nA,3,1.3,103.8\n"),
            ("types.csv", "name,proportion,salary\nT,1,100\n"),
            ("prices.csv", "category,block,lb,ub\nx,A,1,2\ny,Z,1,2\n"),
        ])
        .unwrap_err();
        assert!(matches!(e, AppError::Csv { row: 3, .. }), "{e:?}");
        assert!(from_files(&[("blocks.csv", "name,size,lat,lon\n")]).is_err());
    }
}
