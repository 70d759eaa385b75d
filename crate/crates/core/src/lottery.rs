// Copyright 2026 the assigntc authors
// SPDX-License-Identifier: Apache-2.0

//! Quota-respecting serial lottery.
//!
//! Agents are drawn in a uniformly random order. Each drawn agent takes
//! its highest-utility free item among the blocks whose cap for the agent's
//! type is not yet reached (smallest index on ties), or nothing if no such
//! item exists.
//!
//! Trial `t` of a Monte-Carlo run uses the seed `derive_seed(master, t)`
//! (see [`crate::rng`]), so trials are independent of execution order.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::extreal::ExtReal;
use crate::model::{welfare, Assignment, Instance};
use crate::rng::{derive_seed, rng_from_seed};
use crate::solvers::solve_unconstrained;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LotteryRun {
    pub seed: u64,
    pub assignment: Assignment,
    pub welfare: f64,
    pub draw_order: Vec<usize>,
}

/// Uniform random permutation of `0..n` by Fisher–Yates.
pub fn draw_order(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    order
}

/// Runs the lottery for a fixed draw order.
pub fn run_lottery_with_order(inst: &Instance, order: &[usize]) -> Result<Assignment> {
    let l = inst.l();
    let mut counts = vec![0usize; inst.k() * l];
    let mut taken = vec![false; inst.m()];
    let mut pairs = Vec::with_capacity(order.len().min(inst.m()));
    for &agent in order {
        let p = inst.agent_type(agent);
        let row = inst.row(agent);
        let mut pick: Option<usize> = None;
        for q in 0..l {
            if counts[p * l + q] >= inst.capacity(p, q) {
                continue;
            }
            for j in inst.items_of_block(q) {
                if taken[j] {
                    continue;
                }
                // blocks are scanned in index order, so items are too
                if pick.is_none_or(|b| row[j] > row[b]) {
                    pick = Some(j);
                }
            }
        }
        if let Some(j) = pick {
            taken[j] = true;
            counts[p * l + inst.item_block(j)] += 1;
            pairs.push((agent, j));
        }
    }
    Ok(Assignment::from_pairs(pairs))
}

pub fn run_lottery(inst: &Instance, seed: u64) -> Result<LotteryRun> {
    let order = draw_order(inst.n(), seed);
    let assignment = run_lottery_with_order(inst, &order)?;
    let welfare = welfare(inst, &assignment)?;
    Ok(LotteryRun {
        seed,
        assignment,
        welfare,
        draw_order: order,
    })
}

/// One line of a Monte-Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub welfare: f64,
    /// `OPT / welfare`.
    pub ratio: ExtReal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LotterySummary {
    pub trials: u64,
    pub master_seed: u64,
    pub opt: f64,
    pub mean_welfare: f64,
    /// Sample standard deviation; zero for a single trial.
    pub std_welfare: f64,
    /// `OPT / mean welfare`.
    pub mean_relative_loss: ExtReal,
    /// Mean of the per-trial ratios `OPT / welfare`.
    pub mean_of_ratios: ExtReal,
    pub std_of_ratios: Option<f64>,
    pub min_welfare: f64,
    pub max_welfare: f64,
}

/// Per-trial records, in trial order.
pub fn lottery_trials(inst: &Instance, trials: u64, master_seed: u64, opt: f64) -> Result<Vec<TrialRecord>> {
    (0..trials).map(|t| trial(inst, t, master_seed, opt)).collect()
}

/// Trial `t` on its own, for callers that distribute trials.
pub fn trial(inst: &Instance, t: u64, master_seed: u64, opt: f64) -> Result<TrialRecord> {
    let seed = derive_seed(master_seed, t);
    let run = run_lottery(inst, seed)?;
    Ok(TrialRecord {
        trial: t,
        seed,
        welfare: run.welfare,
        ratio: ratio(opt, run.welfare),
    })
}

fn ratio(opt: f64, welfare: f64) -> ExtReal {
    if welfare > 0.0 {
        ExtReal::Finite(opt / welfare)
    } else if opt > 0.0 {
        ExtReal::Infinite
    } else {
        ExtReal::Finite(1.0)
    }
}

/// Aggregates records. They are sorted by trial index first, so the result
/// does not depend on the order in which trials were computed.
pub fn summarize(records: &[TrialRecord], master_seed: u64, opt: f64) -> LotterySummary {
    assert!(!records.is_empty(), "at least one trial is required");
    let mut recs = records.to_vec();
    recs.sort_by_key(|r| r.trial);
    let t = recs.len() as f64;
    let welfare: Vec<f64> = recs.iter().map(|r| r.welfare).collect();
    let (mean_welfare, std_welfare) = mean_std(&welfare);
    let finite: Option<Vec<f64>> = recs.iter().map(|r| r.ratio.finite()).collect();
    let (mean_of_ratios, std_of_ratios) = match finite {
        Some(v) => {
            let (m, s) = mean_std(&v);
            (ExtReal::Finite(m), Some(s))
        }
        None => (ExtReal::Infinite, None),
    };
    LotterySummary {
        trials: t as u64,
        master_seed,
        opt,
        mean_welfare,
        std_welfare,
        mean_relative_loss: ratio(opt, mean_welfare),
        mean_of_ratios,
        std_of_ratios,
        min_welfare: welfare.iter().copied().fold(f64::INFINITY, f64::min),
        max_welfare: welfare.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Mean and sample standard deviation, summed in slice order.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, libm::sqrt(ss / (n - 1.0)))
}

/// `trials` lotteries against the unconstrained optimum of `inst`.
pub fn lottery_monte_carlo(inst: &Instance, trials: u64, master_seed: u64) -> Result<LotterySummary> {
    let opt = solve_unconstrained(inst)?.objective;
    let records = lottery_trials(inst, trials.max(1), master_seed, opt)?;
    Ok(summarize(&records, master_seed, opt))
}
