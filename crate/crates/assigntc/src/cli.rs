// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use assigntc_core::gen::{generate, ModelConfig, NoiseMode, UtilityModel, DEFAULT_DEGREE_KM, DEFAULT_TOP_BLOCKS};
use assigntc_core::lottery::{lottery_trials, summarize};
use assigntc_core::pod::{BoundMode, PodReport};
use assigntc_core::solvers::{solve, solve_brute_force_with_budget, solve_unconstrained};
use assigntc_core::{Error as CoreError, Instance, Method, Optimality, SolveResult};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{exit, AppError, AppResult};
use crate::experiment::{rows_to_csv, run_experiment, solve_constrained, ExperimentConfig, SolverChoice};
use crate::geodata::load_dataset;
use crate::io::{read_instance, to_json, write_instance};

/// Node budget for `--oracle-check`; larger instances skip the check.
pub const ORACLE_NODE_BUDGET: u64 = 5_000_000;

#[derive(Debug, Parser)]
#[command(name = "assigntc", version, about = "Assignment with type-block constraints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an instance from a dataset and a utility model.
    Gen(GenArgs),
    /// Solve an instance.
    Solve(SolveArgs),
    /// Price of diversity and its bounds.
    Pod(PodArgs),
    /// Monte-Carlo lottery simulation.
    Lottery(LotteryArgs),
    /// Run a replicated experiment grid from a TOML file.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Dist,
    Ethn,
    Proj,
    Price,
    Chicago,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    PerItem,
    PerBlock,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    #[arg(long, default_value_t = 0.0)]
    pub sigma2: f64,
    #[arg(long)]
    pub rho_km: Option<f64>,
    /// Agent count; defaults to the number of items.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dataset directory or builtin name (sg, sg-desk, chicago).
    #[arg(long)]
    pub data: Option<String>,
    /// Per-type quotas, comma separated; defaults to the dataset's.
    #[arg(long, value_delimiter = ',')]
    pub quotas: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "per-item")]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = DEFAULT_TOP_BLOCKS)]
    pub top_blocks: usize,
    #[arg(long, default_value_t = DEFAULT_DEGREE_KM)]
    pub degree_km: f64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Node budget for the exact solver.
    #[arg(long)]
    pub node_limit: Option<u64>,
    /// Wall-clock budget for the exact solver, in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Relative optimality gap for the exact solver (0 proves optimality).
    #[arg(long, default_value_t = 0.0)]
    pub gap: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, default_value = "exact")]
    pub method: String,
    /// Cross-check the objective against brute force when small enough.
    #[arg(long)]
    pub oracle_check: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct PodArgs {
    pub instance: PathBuf,
    /// Constrained solver: `auto` or an exact method name.
    #[arg(long, default_value = "auto")]
    pub method: String,
    /// Use the floor-based quotas `λ/|M_q|` in the disparity bound.
    #[arg(long)]
    pub effective: bool,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct LotteryArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-trial CSV output file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory; overrides the config's `output`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
/// Returns the exit code for outcomes that are not errors (0 or the budget
/// code when a search stopped early but still produced output).
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<i32> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a, out, err),
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Pod(a) => cmd_pod(a, out, err),
        Command::Lottery(a) => cmd_lottery(a, out),
        Command::Experiment(a) => cmd_experiment(a, out, err),
    }
}

fn put(w: &mut dyn Write, text: &str) -> AppResult<()> {
    w.write_all(text.as_bytes()).map_err(|e| AppError::io("<stream>", e))
}

fn write_file(path: &Path, text: &str) -> AppResult<()> {
    std::fs::write(path, text).map_err(|e| AppError::io(path, e))
}

pub fn cmd_gen(a: GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<i32> {
    let data_name = a.data.clone().unwrap_or_else(|| match a.model {
        ModelName::Chicago => "chicago".into(),
        _ => "sg".into(),
    });
    let data = load_dataset(&data_name)?;
    let model = match a.model {
        ModelName::Dist => UtilityModel::Dist { sigma2: a.sigma2 },
        ModelName::Ethn => UtilityModel::Ethn { sigma2: a.sigma2 },
        ModelName::Price => UtilityModel::Price { sigma2: a.sigma2 },
        ModelName::Proj => UtilityModel::Proj {
            rho_km: a.rho_km.ok_or_else(|| AppError::Input("proj needs --rho-km".into()))?,
        },
        ModelName::Chicago => UtilityModel::Chicago {
            sigma2: a.sigma2,
            top_blocks: a.top_blocks,
        },
    };
    let quotas = a
        .quotas
        .or(data.quotas.clone())
        .ok_or_else(|| AppError::Input(format!("dataset `{data_name}` has no quotas; pass --quotas")))?;
    let mut cfg = ModelConfig::new(model, a.n.unwrap_or(data.data.m()), a.seed, quotas);
    cfg.degree_km = a.degree_km;
    cfg.noise = match a.noise {
        NoiseArg::PerItem => NoiseMode::PerItem,
        NoiseArg::PerBlock => NoiseMode::PerBlock,
    };
    let inst = generate(&data.data, &cfg)?;
    let summary = summary_line(&inst);
    match &a.output {
        Some(path) => {
            write_instance(path, &inst)?;
            put(out, &format!("{summary}\n"))?;
        }
        None => {
            put(out, &(to_json(&crate::io::InstanceFile::from_instance(&inst)) + "\n"))?;
            put(err, &format!("{summary}\n"))?;
        }
    }
    Ok(exit::OK)
}

/// One-line description: sizes and the capacity matrix.
pub fn summary_line(inst: &Instance) -> String {
    let caps: Vec<String> = (0..inst.k())
        .map(|p| {
            let row: Vec<String> = (0..inst.l()).map(|q| inst.capacity(p, q).to_string()).collect();
            format!("[{}]", row.join(","))
        })
        .collect();
    format!(
        "n={} m={} k={} l={} types={:?} blocks={:?} caps=[{}]",
        inst.n(),
        inst.m(),
        inst.k(),
        inst.l(),
        inst.type_sizes(),
        inst.block_sizes(),
        caps.join(",")
    )
}

fn time_budget(b: &BudgetArgs) -> AppResult<Option<Duration>> {
    match b.time_limit {
        None => Ok(None),
        Some(t) if t > 0.0 && t.is_finite() => Ok(Some(Duration::from_secs_f64(t))),
        Some(t) => Err(AppError::Input(format!("invalid --time-limit {t}"))),
    }
}

fn gap(b: &BudgetArgs) -> AppResult<f64> {
    if b.gap >= 0.0 && b.gap.is_finite() {
        Ok(b.gap)
    } else {
        Err(AppError::Input(format!("invalid --gap {}", b.gap)))
    }
}

fn budgeted(b: &BudgetArgs) -> bool {
    b.node_limit.is_some() || b.time_limit.is_some() || b.gap != 0.0
}

fn stopped_early(r: &SolveResult) -> bool {
    r.stats.budget_exhausted
}

pub fn cmd_solve(a: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<i32> {
    let method: Method = a.method.parse()?;
    let inst = read_instance(&a.instance)?;
    let result = if method == Method::Exact && budgeted(&a.budget) {
        solve_constrained(
            &inst,
            SolverChoice::Exact,
            a.budget.node_limit.unwrap_or(u64::MAX),
            time_budget(&a.budget)?,
            gap(&a.budget)?,
        )?
    } else {
        solve(&inst, method)?
    };
    result.verify(&inst).map_err(AppError::Check)?;
    if a.oracle_check {
        oracle_check(&inst, &result, err)?;
    }
    put(out, &(to_json(&result) + "\n"))?;
    Ok(if stopped_early(&result) { exit::BUDGET } else { exit::OK })
}

fn oracle_check(inst: &Instance, result: &SolveResult, err: &mut dyn Write) -> AppResult<()> {
    let reference = if result.method == Method::Unconstrained {
        solve_unconstrained(&inst.relaxed())
    } else {
        solve_brute_force_with_budget(inst, ORACLE_NODE_BUDGET)
    };
    let oracle = match reference {
        Ok(r) => r,
        Err(CoreError::BudgetExceeded { budget }) => {
            put(err, &format!("oracle check skipped: brute force exceeds {budget} nodes\n"))?;
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    let tol = 1e-9 * (1.0 + oracle.objective.abs());
    let ok = match result.optimality {
        Optimality::Heuristic { ratio } => {
            result.objective <= oracle.objective + tol
                && ratio.is_none_or(|r| result.objective >= r * oracle.objective - tol)
        }
        _ => (result.objective - oracle.objective).abs() <= tol,
    };
    if !ok {
        return Err(AppError::Check(format!(
            "{} objective {} disagrees with brute force {}",
            result.method, result.objective, oracle.objective
        )));
    }
    put(err, &format!("oracle check passed: brute force objective {}\n", oracle.objective))
}

pub fn cmd_pod(a: PodArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<i32> {
    let inst = read_instance(&a.instance)?;
    let mode = if a.effective { BoundMode::Effective } else { BoundMode::Nominal };
    let constrained = if a.method == "auto" {
        solve_constrained(
            &inst,
            SolverChoice::Auto,
            a.budget.node_limit.unwrap_or(u64::MAX),
            time_budget(&a.budget)?,
            gap(&a.budget)?,
        )?
    } else {
        let method: Method = a.method.parse()?;
        if !method.is_exact_for_constrained() {
            return Err(CoreError::Precondition(format!("{method} is not an exact solver")).into());
        }
        if method == Method::Exact && budgeted(&a.budget) {
            solve_constrained(
                &inst,
                SolverChoice::Exact,
                a.budget.node_limit.unwrap_or(u64::MAX),
                time_budget(&a.budget)?,
                gap(&a.budget)?,
            )?
        } else {
            solve(&inst, method)?
        }
    };
    let unconstrained = solve_unconstrained(&inst)?;
    let report = PodReport::from_results(&inst, &unconstrained, &constrained, mode)?;
    put(out, &(to_json(&report) + "\n"))?;
    put(err, &beta_table(&inst, &report))?;
    Ok(if stopped_early(&constrained) { exit::BUDGET } else { exit::OK })
}

fn beta_table(inst: &Instance, r: &PodReport) -> String {
    let mut s = format!("{:<20} {:>8} {:>12}\n", "type", "nu", "beta_p");
    for (p, name) in inst.type_names().iter().enumerate() {
        let beta = r
            .beta_per_type
            .as_ref()
            .map_or("-".to_owned(), |b| format!("{:.6}", b[p]));
        s += &format!("{:<20} {:>8.4} {:>12}\n", name, r.nu[p], beta);
    }
    s += &format!(
        "pod {} | thm4 {} (effective {}) | thm5 {} | combined {}\n",
        fmt_ext(r.pod.to_f64()),
        fmt_ext(r.bound_thm4.to_f64()),
        fmt_ext(r.bound_thm4_effective.to_f64()),
        fmt_ext(r.bound_thm5.to_f64()),
        fmt_ext(r.bound_combined.to_f64()),
    );
    s
}

fn fmt_ext(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "inf".into()
    }
}

pub fn cmd_lottery(a: LotteryArgs, out: &mut dyn Write) -> AppResult<i32> {
    if a.trials == 0 {
        return Err(AppError::Input("--trials must be positive".into()));
    }
    let inst = read_instance(&a.instance)?;
    let opt = solve_unconstrained(&inst)?.objective;
    let records = lottery_trials(&inst, a.trials, a.seed, opt)?;
    if let Some(path) = &a.csv {
        write_file(path, &trials_csv(&records)?)?;
    }
    let summary = summarize(&records, a.seed, opt);
    put(out, &(to_json(&summary) + "\n"))?;
    Ok(exit::OK)
}

/// Per-trial CSV with columns `trial,seed,welfare,ratio`.
pub fn trials_csv(records: &[assigntc_core::lottery::TrialRecord]) -> AppResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["trial", "seed", "welfare", "ratio"])
        .map_err(|e| AppError::Input(format!("csv: {e}")))?;
    for r in records {
        let ratio = r.ratio.finite().map_or("inf".to_owned(), |v| format!("{v:?}"));
        w.write_record([r.trial.to_string(), r.seed.to_string(), format!("{:?}", r.welfare), ratio])
            .map_err(|e| AppError::Input(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| AppError::Input(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn cmd_experiment(a: ExperimentArgs, out: &mut dyn Write, err: &mut dyn Write) -> AppResult<i32> {
    let cfg = ExperimentConfig::load(&a.config)?;
    if a.threads == Some(0) {
        return Err(AppError::Input("--threads must be positive".into()));
    }
    let result = run_experiment(&cfg, a.threads)?;
    for e in &result.errors {
        put(err, &format!("{e}\n"))?;
    }
    if result.reps.is_empty() {
        return Err(AppError::Input("every replication failed".into()));
    }
    let table = rows_to_csv(&result.rows)?;
    let dir = a.output.or(cfg.output.as_ref().map(PathBuf::from));
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
            write_file(&dir.join("results.csv"), &table)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &result.reps {
                w.serialize(r).map_err(|e| AppError::Input(format!("csv: {e}")))?;
            }
            let bytes = w.into_inner().map_err(|e| AppError::Input(format!("csv: {e}")))?;
            write_file(&dir.join("replications.csv"), &String::from_utf8_lossy(&bytes))?;
            put(out, &format!("wrote {} rows to {}\n", result.rows.len(), dir.display()))?;
        }
        None => put(out, &table)?,
    }
    let flagged: usize = result.rows.iter().map(|r| r.lower_bound_only).sum();
    if flagged > 0 {
        put(err, &format!("{flagged} replications hit the node budget (lower_bound_only)\n"))?;
    }
    Ok(exit::OK)
}
