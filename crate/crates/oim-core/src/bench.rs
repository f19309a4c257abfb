//! Ensemble experiment runner: success statistics, approximation ratios,
//! time-to-solution, and bitflip diagnostics across seeds.

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{simulate, SimParams, TraceMetric, Trajectory};
use crate::error::{Error, Result};
use crate::oracle::{OracleMethod, OracleResult};
use crate::problem::{cut_value, machine_energy, IsingProblem, WeightedGraph};
use crate::readout::binarize;
use crate::schedule::Schedule;

/// Tolerance on machine energy when deciding whether a run found the
/// oracle optimum.
pub const SUCCESS_ENERGY_TOL: f64 = 1e-9;

/// Outcome of a single simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub machine_energy: f64,
    pub cut: Option<f64>,
    pub settled: bool,
    pub bitflips: usize,
    pub success: bool,
}

/// Aggregate report over an ensemble of runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub runs: usize,
    pub base_seed: u64,
    /// Fraction of runs whose binarized final machine energy matched the
    /// oracle optimum.
    pub success_prob: f64,
    /// Achieved cut over oracle cut; absent when no graph is available or
    /// the oracle cut is not positive.
    pub approx_ratio_mean: Option<f64>,
    pub approx_ratio_max: Option<f64>,
    /// Expected time (cycles) to hit the optimum with 99% confidence;
    /// undefined when the success probability is 0 or 1.
    pub tts_99: Option<f64>,
    pub t_end: f64,
    pub bitflips_mean: f64,
    pub settled_frac: f64,
    pub oracle_method: OracleMethod,
    pub oracle_machine_energy: f64,
    pub oracle_cut: Option<f64>,
    pub per_run: Vec<RunRecord>,
}

/// Time-to-solution at confidence `target` given per-run success
/// probability over runs of length `t_end`. Undefined at the endpoints.
pub fn time_to_solution(t_end: f64, success_prob: f64, target: f64) -> Option<f64> {
    if success_prob <= 0.0 || success_prob >= 1.0 {
        return None;
    }
    Some(t_end * (1.0 - target).ln() / (1.0 - success_prob).ln())
}

/// Runs `n_runs` independent simulations with seeds
/// `base_seed .. base_seed + n_runs` and aggregates them against the
/// oracle. Runs execute in parallel; the fold is in seed order, so the
/// report is a pure function of its inputs.
pub fn run_ensemble(
    p: &IsingProblem,
    graph: Option<&WeightedGraph>,
    schedule: &Schedule,
    params: &SimParams,
    n_runs: usize,
    base_seed: u64,
    oracle: &OracleResult,
) -> Result<BenchReport> {
    run_ensemble_with(
        p,
        graph,
        schedule,
        params,
        n_runs,
        base_seed,
        oracle,
        |_, _| Ok(()),
    )
}

/// [`run_ensemble`] with a per-run hook (e.g. to export trajectories).
/// The hook may run from worker threads.
#[allow(clippy::too_many_arguments)]
pub fn run_ensemble_with<F>(
    p: &IsingProblem,
    graph: Option<&WeightedGraph>,
    schedule: &Schedule,
    params: &SimParams,
    n_runs: usize,
    base_seed: u64,
    oracle: &OracleResult,
    per_run: F,
) -> Result<BenchReport>
where
    F: Fn(u64, &Trajectory) -> Result<()> + Sync,
{
    if n_runs == 0 {
        return Err(Error::InvalidParam("need at least one run".into()));
    }
    if oracle.best.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            got: oracle.best.len(),
        });
    }
    if let Some(g) = graph {
        if g.n() != p.n() {
            return Err(Error::DimensionMismatch {
                expected: p.n(),
                got: g.n(),
            });
        }
    }

    let records: Vec<RunRecord> = (0..n_runs)
        .into_par_iter()
        .map(|run| -> Result<RunRecord> {
            let seed = base_seed + run as u64;
            let run_params = SimParams {
                seed,
                ..params.clone()
            };
            let metric = match graph {
                Some(g) => TraceMetric::Cut(g),
                None => TraceMetric::MachineEnergy,
            };
            let traj = simulate(p, schedule, &run_params, metric)?;
            per_run(seed, &traj)?;
            let readout = binarize(&traj.final_state.phases, 0)?;
            let energy = machine_energy(p, &readout.spins)?;
            let cut = match graph {
                Some(g) => Some(cut_value(g, &readout.spins)?),
                None => None,
            };
            let bitflips = crate::readout::bitflip_count(&traj, 0)?;
            Ok(RunRecord {
                seed,
                machine_energy: energy,
                cut,
                settled: readout.settled,
                bitflips,
                success: (energy - oracle.best_machine_energy).abs() <= SUCCESS_ENERGY_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let runs = records.len();
    let successes = records.iter().filter(|r| r.success).count();
    let success_prob = successes as f64 / runs as f64;
    let settled_frac = records.iter().filter(|r| r.settled).count() as f64 / runs as f64;
    let bitflips_mean = records.iter().map(|r| r.bitflips as f64).sum::<f64>() / runs as f64;

    let ratios: Vec<f64> = match oracle.best_cut {
        Some(best_cut) if best_cut > 0.0 => records
            .iter()
            .filter_map(|r| r.cut.map(|c| c / best_cut))
            .collect(),
        _ => Vec::new(),
    };
    let (approx_ratio_mean, approx_ratio_max) = if ratios.is_empty() {
        (None, None)
    } else {
        (
            Some(ratios.iter().sum::<f64>() / ratios.len() as f64),
            Some(ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        )
    };

    Ok(BenchReport {
        runs,
        base_seed,
        success_prob,
        approx_ratio_mean,
        approx_ratio_max,
        tts_99: time_to_solution(params.t_end, success_prob, 0.99),
        t_end: params.t_end,
        bitflips_mean,
        settled_frac,
        oracle_method: oracle.method,
        oracle_machine_energy: oracle.best_machine_energy,
        oracle_cut: oracle.best_cut,
        per_run: records,
    })
}

impl BenchReport {
    /// Pretty JSON export, trailing newline included.
    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        out.push('\n');
        out
    }
}
