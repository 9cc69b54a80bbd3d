//! Experiment commands. Each returns rendered CSV text; the caller decides
//! where it goes.

use rayon::prelude::*;

use semcom_core::engine::{self, Aggregate, Metrics, SlotTrace};
use semcom_core::{oracle, PolicyName};

use crate::config::{ExperimentGrid, Scenario};
use crate::error::{CliError, Result};
use crate::output::{self, SUMMARY_HEADER};

/// Pinned scenario settings for `reproduce-paper`.
pub const REPRODUCE_SEED: u64 = 42;
pub const REPRODUCE_SLOTS: u64 = 1_000_000;
pub const SLOW_SOURCE: (f64, f64) = (0.95, 0.9);
pub const RAPID_SOURCE: (f64, f64) = (0.8, 0.3);
pub const CHANNELS: [f64; 2] = [0.4, 0.9];

#[derive(Debug, Clone)]
pub struct RunReport {
    pub csv: String,
    /// Per-slot traces by grid row, when tracing single runs.
    pub traces: Vec<(usize, Vec<SlotTrace>)>,
    /// Replication statistics by grid row, when `runs > 1`.
    pub aggregates: Vec<(usize, Aggregate)>,
}

enum RowResult {
    Single(engine::RunOutput),
    Replicated(Aggregate),
}

/// Simulates every scenario of the grid. With `runs > 1` each replication
/// becomes its own row, labelled with its derived seed.
pub fn cmd_run(grid: &ExperimentGrid) -> Result<RunReport> {
    let results = grid
        .scenarios
        .par_iter()
        .map(|s| {
            if grid.runs == 1 {
                engine::run(&s.config).map(RowResult::Single)
            } else {
                engine::replicate(&s.config, grid.runs).map(RowResult::Replicated)
            }
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut csv = format!("{SUMMARY_HEADER}\n");
    let mut traces = Vec::new();
    let mut aggregates = Vec::new();
    for (i, (s, result)) in grid.scenarios.iter().zip(results).enumerate() {
        match result {
            RowResult::Single(out) => {
                let sum = out.summary;
                csv.push_str(&output::summary_row(
                    s,
                    Some(sum.slots),
                    Some(sum.seed),
                    Some(&sum.metrics),
                ));
                csv.push('\n');
                if let Some(trace) = out.trace {
                    traces.push((i, trace));
                }
            }
            RowResult::Replicated(agg) => {
                for run in &agg.runs {
                    csv.push_str(&output::summary_row(
                        s,
                        Some(run.slots),
                        Some(run.seed),
                        Some(&run.metrics),
                    ));
                    csv.push('\n');
                }
                aggregates.push((i, agg));
            }
        }
    }
    Ok(RunReport {
        csv,
        traces,
        aggregates,
    })
}

/// Exact metrics for every scenario. Rows whose chain has no unique
/// stationary distribution carry empty metric columns and are listed in the
/// second return value.
pub fn cmd_oracle(grid: &ExperimentGrid) -> Result<(String, Vec<(usize, String)>)> {
    let mut csv = format!("{SUMMARY_HEADER}\n");
    let mut problems = Vec::new();
    for (i, s) in grid.scenarios.iter().enumerate() {
        match oracle::analyze(&s.config) {
            Ok(m) => csv.push_str(&output::summary_row(s, None, None, Some(&m))),
            Err(e) => {
                problems.push((i, e.to_string()));
                csv.push_str(&output::summary_row(s, None, None, None));
            }
        }
        csv.push('\n');
    }
    Ok((csv, problems))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute bound on reconstruction error and uninformative fraction.
    pub abs: f64,
    /// Relative bound on actuation cost and transmission rate.
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 0.005, rel: 0.01 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareStatus {
    Pass,
    Fail,
    NoStationary,
}

impl CompareStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            CompareStatus::Pass => "pass",
            CompareStatus::Fail => "fail",
            CompareStatus::NoStationary => "no-stationary",
        }
    }
}

/// Checks simulated metrics against exact ones.
pub fn within_tolerance(sim: &Metrics, exact: &Metrics, tol: Tolerances) -> bool {
    let abs_ok = |a: f64, b: f64| (a - b).abs() <= tol.abs;
    let rel_ok = |a: f64, b: f64| (a - b).abs() <= tol.rel * b.abs();
    abs_ok(sim.recon_error, exact.recon_error)
        && abs_ok(sim.uninformative_frac, exact.uninformative_frac)
        && rel_ok(sim.actuation_cost, exact.actuation_cost)
        && rel_ok(sim.tx_rate, exact.tx_rate)
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub csv: String,
    pub statuses: Vec<CompareStatus>,
}

impl CompareReport {
    pub fn failures(&self) -> usize {
        self.statuses.iter().filter(|s| **s == CompareStatus::Fail).count()
    }
}

/// Simulates each scenario (mean over replications when `runs > 1`) and
/// pairs it with the exact value.
pub fn cmd_compare(grid: &ExperimentGrid, tol: Tolerances) -> Result<CompareReport> {
    let rows = grid
        .scenarios
        .par_iter()
        .map(|s| {
            let sim = if grid.runs == 1 {
                engine::run(&s.config)?.summary.metrics
            } else {
                engine::replicate(&s.config, grid.runs)?.mean
            };
            Ok((sim, oracle::analyze(&s.config).ok()))
        })
        .collect::<std::result::Result<Vec<_>, semcom_core::Error>>()
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let mut csv = output::compare_header();
    csv.push('\n');
    let mut statuses = Vec::with_capacity(rows.len());
    for (s, (sim, exact)) in grid.scenarios.iter().zip(rows) {
        csv.push_str(&output::scenario_fields(s, Some(s.config.slots), Some(s.config.seed)));
        let status = match exact {
            Some(exact) => {
                for (a, b) in sim.as_array().iter().zip(exact.as_array()) {
                    csv.push_str(&format!(
                        ",{},{},{}",
                        output::format_g6(*a),
                        output::format_g6(b),
                        output::format_g6((a - b).abs())
                    ));
                }
                if within_tolerance(&sim, &exact, tol) {
                    CompareStatus::Pass
                } else {
                    CompareStatus::Fail
                }
            }
            None => {
                for a in sim.as_array() {
                    csv.push_str(&format!(",{},,", output::format_g6(a)));
                }
                CompareStatus::NoStationary
            }
        };
        csv.push(',');
        csv.push_str(status.as_str());
        csv.push('\n');
        statuses.push(status);
    }
    Ok(CompareReport { csv, statuses })
}

/// The four-policy by two-channel grid for one source.
pub fn scenario_table_grid((p, q): (f64, f64), slots: u64, seed: u64) -> Result<ExperimentGrid> {
    let mut scenarios = Vec::new();
    for policy in PolicyName::ALL {
        for ps in CHANNELS {
            let mut s = Scenario::new(
                policy,
                p,
                q,
                ps,
                crate::config::DEFAULT_PERIOD,
                crate::config::DEFAULT_THRESHOLD,
            )?;
            s.config.slots = slots;
            s.config.seed = seed;
            scenarios.push(s);
        }
    }
    Ok(ExperimentGrid {
        scenarios,
        runs: 1,
        effective: Default::default(),
    })
}

/// Summary CSVs for the slowly and the rapidly changing source.
pub fn cmd_reproduce_paper(slots: u64, seed: u64) -> Result<(String, String)> {
    let slow = cmd_run(&scenario_table_grid(SLOW_SOURCE, slots, seed)?)?.csv;
    let rapid = cmd_run(&scenario_table_grid(RAPID_SOURCE, slots, seed)?)?.csv;
    Ok((slow, rapid))
}
