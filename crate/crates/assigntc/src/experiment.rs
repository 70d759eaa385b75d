// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Replicated experiments over a grid of utility models.
//!
//! ```toml
//! scenario = "sg-desk"
//! data = "sg-desk"
//! master_seed = 2026
//! reps = 30
//! trials = 100
//!
//! [[grid]]
//! model = "dist"
//! params = [1.0, 5.0, 10.0]
//! n = [135]
//! ```
//!
//! Each grid entry expands to one cell per `(param, n)`; cells are emitted
//! in the order entries, params and `n` are listed. Replication `r` of cell
//! `c` uses instance seed `derive_seed(derive_seed(master_seed, c), r)` and
//! lottery master seed `derive_seed(instance_seed, 1)`, so results do not
//! depend on the thread count.

use std::path::Path;
use std::time::{Duration, Instant};

use assigntc_core::gen::{generate, ModelConfig, NoiseMode, UtilityModel};
use assigntc_core::lottery::{lottery_trials, mean_std, summarize};
use assigntc_core::pod::{BoundMode, PodReport};
use assigntc_core::rng::derive_seed;
use assigntc_core::solvers::{solve, solve_exact_with, solve_unconstrained, ExactConfig};
use assigntc_core::{Instance, Method, SolveResult};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};
use crate::geodata::{load_dataset, Dataset};

/// Node budget for the exact solver when a cell falls back to search.
pub const DEFAULT_NODE_BUDGET: u64 = 20_000;
/// Relative optimality gap for exact solves in experiments, matching the
/// usual MILP default.
pub const DEFAULT_REL_GAP: f64 = 1e-4;

/// Relative slack when checking realized PoD values against the bounds.
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    /// Polynomial solver when the instance is type- or block-uniform,
    /// budgeted exact search otherwise.
    #[default]
    Auto,
    Exact,
    Brute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridEntry {
    pub model: String,
    pub params: Vec<f64>,
    pub n: Vec<usize>,
    #[serde(default)]
    pub top_blocks: Option<usize>,
    #[serde(default)]
    pub noise: NoiseMode,
    /// Skip the lottery for this entry.
    #[serde(default)]
    pub no_lottery: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    /// Dataset directory or builtin name.
    pub data: String,
    pub master_seed: u64,
    pub reps: usize,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Per-type quotas; defaults to the dataset's `quota` column.
    #[serde(default)]
    pub quotas: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: SolverChoice,
    #[serde(default = "default_node_budget")]
    pub node_budget: u64,
    /// Optional wall-clock budget per exact solve. Results that hit it are
    /// no longer reproducible across machines.
    #[serde(default)]
    pub time_budget_s: Option<f64>,
    /// Relative optimality gap for exact solves; 0 proves optimality.
    #[serde(default = "default_rel_gap")]
    pub rel_gap: f64,
    #[serde(default)]
    pub degree_km: Option<f64>,
    /// Directory for `results.csv` and `replications.csv`; stdout when absent.
    #[serde(default)]
    pub output: Option<String>,
    #[serde(default)]
    pub grid: Vec<GridEntry>,
}

fn default_trials() -> u64 {
    100
}

fn default_node_budget() -> u64 {
    DEFAULT_NODE_BUDGET
}

fn default_rel_gap() -> f64 {
    DEFAULT_REL_GAP
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &str) -> AppResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| AppError::Config {
            path: origin.to_owned(),
            message: e.to_string(),
        })?;
        cfg.validate(origin)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    fn validate(&self, origin: &str) -> AppResult<()> {
        let bad = |message: String| AppError::Config {
            path: origin.to_owned(),
            message,
        };
        if self.reps == 0 {
            return Err(bad("reps must be positive".into()));
        }
        if self.trials == 0 {
            return Err(bad("trials must be positive".into()));
        }
        if self.grid.is_empty() {
            return Err(bad("grid is empty".into()));
        }
        for (e, entry) in self.grid.iter().enumerate() {
            if entry.params.is_empty() || entry.n.is_empty() {
                return Err(bad(format!("grid entry {e} needs params and n")));
            }
            for &p in &entry.params {
                model_of(entry, p).map_err(|m| bad(format!("grid entry {e}: {m}")))?;
            }
        }
        if let Some(t) = self.time_budget_s {
            if !(t > 0.0 && t.is_finite()) {
                return Err(bad("time_budget_s must be positive".into()));
            }
        }
        if !(self.rel_gap >= 0.0 && self.rel_gap < 1.0) {
            return Err(bad("rel_gap must be in [0, 1)".into()));
        }
        Ok(())
    }

    /// Grid cells in output order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for entry in &self.grid {
            for &param in &entry.params {
                for &n in &entry.n {
                    cells.push(Cell {
                        index: cells.len(),
                        model: model_of(entry, param).expect("validated"),
                        noise: entry.noise,
                        lottery: !entry.no_lottery,
                        n,
                    });
                }
            }
        }
        cells
    }
}

fn model_of(entry: &GridEntry, p: f64) -> Result<UtilityModel, String> {
    Ok(match entry.model.as_str() {
        "dist" => UtilityModel::Dist { sigma2: p },
        "ethn" => UtilityModel::Ethn { sigma2: p },
        "proj" => UtilityModel::Proj { rho_km: p },
        "price" => UtilityModel::Price { sigma2: p },
        "chicago" => UtilityModel::Chicago {
            sigma2: p,
            top_blocks: entry.top_blocks.unwrap_or(assigntc_core::gen::DEFAULT_TOP_BLOCKS),
        },
        other => return Err(format!("unknown model `{other}`")),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub model: UtilityModel,
    pub noise: NoiseMode,
    pub lottery: bool,
    pub n: usize,
}

/// One replication of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepRecord {
    pub cell: usize,
    pub rep: usize,
    pub seed: u64,
    pub method: Method,
    pub pod: f64,
    pub bound_thm4_effective: f64,
    pub bound_thm5: f64,
    pub beta: Option<f64>,
    /// Whether OPT_C is only a lower bound (search stopped by its budget).
    pub lower_bound_only: bool,
    pub respects_bounds: bool,
    /// Mean over trials of `OPT / lottery welfare`.
    pub lottery_mean_of_ratios: Option<f64>,
    /// `OPT / mean lottery welfare`.
    pub lottery_relative_loss: Option<f64>,
    /// Per-trial ratios, kept for pooled statistics.
    #[serde(skip)]
    pub lottery_ratios: Vec<f64>,
}

/// One output row per cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub scenario: String,
    pub model: String,
    pub param: f64,
    pub n: usize,
    pub m: usize,
    pub rep_count: usize,
    pub mean_pod: f64,
    pub se_pod: f64,
    pub mean_bound5: f64,
    pub mean_lottery_ratio: f64,
    pub se_lottery_ratio: f64,
    pub mean_bound4_effective: f64,
    pub max_pod: f64,
    pub mean_beta: f64,
    pub mean_lottery_relative_loss: f64,
    pub pooled_se_lottery_ratio: f64,
    pub lower_bound_only: usize,
    pub bounds_violated: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ExperimentRow>,
    pub reps: Vec<RepRecord>,
    /// Messages for replications that failed, in grid order.
    pub errors: Vec<String>,
}

fn se(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    mean_std(values).1 / (values.len() as f64).sqrt()
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Constrained solve according to `choice`; `Auto` probes uniformity first.
pub fn solve_constrained(
    inst: &Instance,
    choice: SolverChoice,
    node_budget: u64,
    time_budget: Option<Duration>,
    rel_gap: f64,
) -> AppResult<SolveResult> {
    if choice == SolverChoice::Brute {
        return Ok(solve(inst, Method::Brute)?);
    }
    if choice == SolverChoice::Auto {
        if inst.is_type_uniform() {
            return Ok(solve(inst, Method::McfType)?);
        }
        if inst.is_block_uniform() {
            return Ok(solve(inst, Method::McfBlock)?);
        }
    }
    let start = Instant::now();
    let stop = move || time_budget.is_some_and(|t| start.elapsed() >= t);
    let cfg = ExactConfig {
        node_limit: Some(node_budget),
        stop: Some(&stop),
        rel_gap,
        ..ExactConfig::default()
    };
    Ok(solve_exact_with(inst, &cfg)?)
}

fn run_rep(
    cfg: &ExperimentConfig,
    data: &Dataset,
    quotas: &[f64],
    cell: &Cell,
    rep: usize,
) -> AppResult<(usize, RepRecord)> {
    let seed = derive_seed(derive_seed(cfg.master_seed, cell.index as u64), rep as u64);
    let mut mc = ModelConfig::new(cell.model, cell.n, seed, quotas.to_vec());
    mc.noise = cell.noise;
    if let Some(d) = cfg.degree_km {
        mc.degree_km = d;
    }
    let inst = generate(&data.data, &mc)?;
    let unconstrained = solve_unconstrained(&inst)?;
    let constrained = solve_constrained(
        &inst,
        cfg.solver,
        cfg.node_budget,
        cfg.time_budget_s.map(Duration::from_secs_f64),
        cfg.rel_gap,
    )?;
    let report = PodReport::from_results(&inst, &unconstrained, &constrained, BoundMode::Effective)?;
    let (ratios, mean_of_ratios, relative_loss) = if cell.lottery && cfg.trials > 0 {
        let lottery_seed = derive_seed(seed, 1);
        let records = lottery_trials(&inst, cfg.trials, lottery_seed, unconstrained.objective)?;
        let summary = summarize(&records, lottery_seed, unconstrained.objective);
        let ratios: Vec<f64> = records.iter().map(|r| r.ratio.to_f64()).collect();
        (ratios, Some(summary.mean_of_ratios.to_f64()), Some(summary.mean_relative_loss.to_f64()))
    } else {
        (Vec::new(), None, None)
    };
    let lower_bound_only = constrained.stats.budget_exhausted;
    Ok((
        inst.m(),
        RepRecord {
            cell: cell.index,
            rep,
            seed,
            method: constrained.method,
            pod: report.pod.to_f64(),
            bound_thm4_effective: report.bound_thm4_effective.to_f64(),
            bound_thm5: report.bound_thm5.to_f64(),
            beta: report.beta,
            lower_bound_only,
            respects_bounds: report.respects_bounds(BOUND_TOLERANCE),
            lottery_mean_of_ratios: mean_of_ratios,
            lottery_relative_loss: relative_loss,
            lottery_ratios: ratios,
        },
    ))
}

/// Runs every cell and replication. `threads = None` uses rayon's default.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> AppResult<ExperimentOutput> {
    let data = load_dataset(&cfg.data)?;
    let quotas = cfg
        .quotas
        .clone()
        .or_else(|| data.quotas.clone())
        .ok_or_else(|| AppError::Input(format!("dataset `{}` has no quota column and none is configured", cfg.data)))?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..cfg.reps).map(move |r| (c, r))).collect();
    let work = || -> Vec<AppResult<(usize, RepRecord)>> {
        jobs.par_iter()
            .map(|&(c, r)| run_rep(cfg, &data, &quotas, &cells[c], r))
            .collect()
    };
    let results = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| AppError::Input(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };

    let mut reps = Vec::new();
    let mut errors = Vec::new();
    let mut per_cell: Vec<(Option<usize>, Vec<RepRecord>, usize)> = vec![(None, Vec::new(), 0); cells.len()];
    for (&(c, r), res) in jobs.iter().zip(results) {
        match res {
            Ok((m, rec)) => {
                per_cell[c].0 = Some(m);
                per_cell[c].1.push(rec.clone());
                reps.push(rec);
            }
            Err(e) if e.exit_code() == crate::error::exit::INPUT => return Err(e),
            Err(e) => {
                per_cell[c].2 += 1;
                errors.push(format!("cell {c} rep {r}: {e}"));
            }
        }
    }

    let rows = cells
        .iter()
        .zip(&per_cell)
        .map(|(cell, (m, recs, errs))| {
            let pods: Vec<f64> = recs.iter().map(|r| r.pod).collect();
            let lottery: Vec<f64> = recs.iter().filter_map(|r| r.lottery_mean_of_ratios).collect();
            let pooled: Vec<f64> = recs.iter().flat_map(|r| r.lottery_ratios.iter().copied()).collect();
            ExperimentRow {
                scenario: cfg.scenario.clone(),
                model: cell.model.name().to_owned(),
                param: cell.model.parameter(),
                n: cell.n,
                m: m.unwrap_or(0),
                rep_count: recs.len(),
                mean_pod: mean(&pods),
                se_pod: se(&pods),
                mean_bound5: mean(&recs.iter().map(|r| r.bound_thm5).collect::<Vec<_>>()),
                mean_lottery_ratio: mean(&lottery),
                se_lottery_ratio: se(&lottery),
                mean_bound4_effective: mean(&recs.iter().map(|r| r.bound_thm4_effective).collect::<Vec<_>>()),
                max_pod: pods.iter().copied().fold(f64::NAN, f64::max),
                mean_beta: mean(&recs.iter().filter_map(|r| r.beta).collect::<Vec<_>>()),
                mean_lottery_relative_loss: mean(&recs.iter().filter_map(|r| r.lottery_relative_loss).collect::<Vec<_>>()),
                pooled_se_lottery_ratio: se(&pooled),
                lower_bound_only: recs.iter().filter(|r| r.lower_bound_only).count(),
                bounds_violated: recs.iter().filter(|r| !r.respects_bounds).count(),
                errors: *errs,
            }
        })
        .collect();
    Ok(ExperimentOutput { rows, reps, errors })
}

/// Rows as CSV text with a header line.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> AppResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| AppError::Input(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| AppError::Input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
