//! Replication harness: single runs, replication batches and the
//! consent-threshold sweep.
//!
//! Every public entry point is deterministic in `(config, seed)`: replication
//! `k` draws from the stream derived as `root(base_seed) / "rep" / k`, results
//! are collected in replication order and aggregated with fixed-shape
//! pairwise summation, so serial and parallel execution agree byte for byte
//! at any worker count.

mod engine;

use std::fmt;

use rayon::prelude::*;

pub use engine::{run_once, run_once_observed, run_once_with, EnginePhase, RunOptions};

use crate::clock::ClockError;
use crate::genesis::GenesisError;
use crate::rng::{RngError, RngStream};
use crate::scalar::Scalar;
use crate::scenario::{ScenarioConfig, ScenarioError};
use crate::selection::SelectionError;

/// Any error a run can propagate. Runs never silently truncate.
#[derive(Clone, Debug, PartialEq)]
pub enum SimError {
    Clock(ClockError),
    Rng(RngError),
    Genesis(GenesisError),
    Selection(SelectionError),
    Scenario(ScenarioError),
    /// Sweep thresholds must be non-empty, ascending and distinct.
    ThetaListInvalid { message: String },
    /// A report's summary disagreed with its own step records.
    ReportInconsistent { message: String },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Clock(e) => write!(f, "{e}"),
            SimError::Rng(e) => write!(f, "{e}"),
            SimError::Genesis(e) => write!(f, "{e}"),
            SimError::Selection(e) => write!(f, "{e}"),
            SimError::Scenario(e) => write!(f, "{e}"),
            SimError::ThetaListInvalid { message } => write!(f, "invalid theta list: {message}"),
            SimError::ReportInconsistent { message } => {
                write!(f, "report failed self-verification: {message}")
            }
        }
    }
}

impl std::error::Error for SimError {}

impl From<ClockError> for SimError {
    fn from(e: ClockError) -> Self {
        SimError::Clock(e)
    }
}
impl From<RngError> for SimError {
    fn from(e: RngError) -> Self {
        SimError::Rng(e)
    }
}
impl From<GenesisError> for SimError {
    fn from(e: GenesisError) -> Self {
        SimError::Genesis(e)
    }
}
impl From<SelectionError> for SimError {
    fn from(e: SelectionError) -> Self {
        SimError::Selection(e)
    }
}
impl From<ScenarioError> for SimError {
    fn from(e: ScenarioError) -> Self {
        SimError::Scenario(e)
    }
}

/// Per-step, per-region metrics of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionStepRecord<S> {
    /// Mutations financed this step.
    pub mutations: u32,
    /// Share-weighted productivity after the step.
    pub productivity: S,
    pub average_profit_rate: S,
    pub population: S,
    /// Preference tally of this step's financing round, if one took place.
    pub tally: Option<TallySummary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TallySummary {
    /// Candidates standing for financing.
    pub candidates: u32,
    /// Highest preference index.
    pub top_count: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord<S> {
    pub step: u32,
    pub regions: Vec<RegionStepRecord<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionSummary<S> {
    /// Mean log-growth of share-weighted productivity per step.
    pub pace_of_evolution: S,
    pub total_mutations: u64,
    pub final_population: S,
}

/// Full trace of one run; exactly `horizon` step records.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport<S> {
    pub scenario: String,
    pub seed: u64,
    pub replication: Option<u32>,
    pub horizon: u32,
    pub region_names: Vec<String>,
    /// Share-weighted productivity per region before the first step.
    pub initial_productivity: Vec<S>,
    pub steps: Vec<StepRecord<S>>,
    pub summary: Vec<RegionSummary<S>>,
}

impl<S: Scalar> RunReport<S> {
    /// Productivity trace of one region: the initial level plus one point
    /// per step.
    pub fn productivity_trace(&self, region: usize) -> Vec<S> {
        let mut trace = Vec::with_capacity(self.steps.len() + 1);
        trace.push(self.initial_productivity[region]);
        trace.extend(self.steps.iter().map(|s| s.regions[region].productivity));
        trace
    }

    /// Mean pace of evolution over regions.
    pub fn mean_pace(&self) -> S {
        let total: S = self.summary.iter().map(|r| r.pace_of_evolution).sum();
        total / S::cast(self.summary.len())
    }

    pub fn total_mutations(&self) -> u64 {
        self.summary.iter().map(|r| r.total_mutations).sum()
    }

    /// Check that the summary is recomputable from the step records.
    pub fn verify(&self) -> Result<(), SimError> {
        if self.steps.len() != self.horizon as usize {
            return Err(SimError::ReportInconsistent {
                message: format!(
                    "expected {} step records, found {}",
                    self.horizon,
                    self.steps.len()
                ),
            });
        }
        for (r, summary) in self.summary.iter().enumerate() {
            let trace = self.productivity_trace(r);
            let pace = crate::selection::pace_of_evolution(&trace)?;
            if pace != summary.pace_of_evolution {
                return Err(SimError::ReportInconsistent {
                    message: format!("pace mismatch in region {r}"),
                });
            }
            let mutations: u64 = self
                .steps
                .iter()
                .map(|s| u64::from(s.regions[r].mutations))
                .sum();
            if mutations != summary.total_mutations {
                return Err(SimError::ReportInconsistent {
                    message: format!("mutation total mismatch in region {r}"),
                });
            }
            let last = self
                .steps
                .last()
                .map(|s| s.regions[r].population)
                .unwrap_or(self.summary[r].final_population);
            if last != summary.final_population {
                return Err(SimError::ReportInconsistent {
                    message: format!("final population mismatch in region {r}"),
                });
            }
        }
        Ok(())
    }
}

/// Aggregate over a replication batch.
#[derive(Clone, Debug, PartialEq)]
pub struct RunAggregate<S> {
    pub replications: u32,
    /// Mean over replications of the per-run mean pace.
    pub mean_pace: S,
    /// Population standard deviation of the per-run mean pace.
    pub sd_pace: S,
    pub mean_total_mutations: S,
    pub mean_final_population: S,
}

/// Fixed-shape pairwise sum in index order; identical for any worker count.
pub fn pairwise_sum<S: Scalar>(values: &[S]) -> S {
    match values.len() {
        0 => S::zero(),
        1 => values[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

fn mean<S: Scalar>(values: &[S]) -> S {
    pairwise_sum(values) / S::cast(values.len())
}

impl<S: Scalar> RunAggregate<S> {
    /// Aggregate reports in replication order.
    pub fn from_reports(reports: &[RunReport<S>]) -> Self {
        let paces: Vec<S> = reports.iter().map(|r| r.mean_pace()).collect();
        let mean_pace = mean(&paces);
        let squares: Vec<S> = paces
            .iter()
            .map(|p| (*p - mean_pace) * (*p - mean_pace))
            .collect();
        let sd_pace = mean(&squares).sqrt();
        let mutations: Vec<S> = reports
            .iter()
            .map(|r| S::cast(r.total_mutations()))
            .collect();
        let populations: Vec<S> = reports
            .iter()
            .map(|r| {
                let total: S = r.summary.iter().map(|s| s.final_population).sum();
                total
            })
            .collect();
        Self {
            replications: reports.len() as u32,
            mean_pace,
            sd_pace,
            mean_total_mutations: mean(&mutations),
            mean_final_population: mean(&populations),
        }
    }
}

/// A replication batch and its aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct ManyRuns<S> {
    pub reports: Vec<RunReport<S>>,
    pub aggregate: RunAggregate<S>,
}

/// Run `replications` independent replications of one config.
///
/// Replication `k` draws from `root(base_seed)/"rep"/k`; the result does not
/// depend on execution order or worker count.
pub fn run_many<S: Scalar>(
    config: &ScenarioConfig,
    replications: u32,
    base_seed: u64,
) -> Result<ManyRuns<S>, SimError> {
    run_many_with(config, replications, base_seed, &RunOptions::default())
}

/// [`run_many`] with explicit options (e.g. the fixed-tally test hook).
pub fn run_many_with<S: Scalar>(
    config: &ScenarioConfig,
    replications: u32,
    base_seed: u64,
    options: &RunOptions,
) -> Result<ManyRuns<S>, SimError> {
    let root = RngStream::root(base_seed);
    let reports: Vec<RunReport<S>> = (0..replications)
        .into_par_iter()
        .map(|k| {
            let stream = root.derive_indexed("rep", u64::from(k))?;
            engine::run_with_stream(
                config,
                stream,
                base_seed,
                Some(k),
                options.fixed_tally.as_deref(),
            )
        })
        .collect::<Result<_, SimError>>()?;
    let aggregate = RunAggregate::from_reports(&reports);
    Ok(ManyRuns { reports, aggregate })
}

/// One row of a threshold sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<S> {
    pub theta: u32,
    pub replications: u32,
    pub mean_mutations: S,
    pub mean_pace: S,
    pub sd_pace: S,
}

/// Sweep result: one row per threshold plus the rank correlation between
/// θ and the mean pace of evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport<S> {
    pub scenario: String,
    pub base_seed: u64,
    pub rows: Vec<SweepRow<S>>,
    /// Spearman rank correlation; absent with fewer than two rows.
    pub spearman: Option<S>,
}

/// Sweep the consent threshold over `thetas`, holding everything else fixed.
pub fn sweep_threshold<S: Scalar>(
    config: &ScenarioConfig,
    thetas: &[u32],
    replications: u32,
) -> Result<SweepReport<S>, SimError> {
    sweep_threshold_with(config, thetas, replications, &RunOptions::default())
}

/// [`sweep_threshold`] with explicit options (e.g. the fixed-tally hook).
pub fn sweep_threshold_with<S: Scalar>(
    config: &ScenarioConfig,
    thetas: &[u32],
    replications: u32,
    options: &RunOptions,
) -> Result<SweepReport<S>, SimError> {
    if thetas.is_empty() {
        return Err(SimError::ThetaListInvalid {
            message: "theta list must be non-empty".into(),
        });
    }
    if !thetas.windows(2).all(|w| w[0] < w[1]) {
        return Err(SimError::ThetaListInvalid {
            message: "thetas must be ascending and distinct".into(),
        });
    }
    if replications < 1 {
        return Err(SimError::ThetaListInvalid {
            message: "at least one replication is required".into(),
        });
    }

    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        let mut swept = config.clone();
        swept.finance.consent_threshold = theta;
        let runs = run_many_with::<S>(&swept, replications, config.seed, options)?;
        rows.push(SweepRow {
            theta,
            replications,
            mean_mutations: runs.aggregate.mean_total_mutations,
            mean_pace: runs.aggregate.mean_pace,
            sd_pace: runs.aggregate.sd_pace,
        });
    }

    let xs: Vec<S> = rows.iter().map(|r| S::cast(r.theta)).collect();
    let ys: Vec<S> = rows.iter().map(|r| r.mean_pace).collect();
    Ok(SweepReport {
        scenario: config.name.clone(),
        base_seed: config.seed,
        rows,
        spearman: spearman(&xs, &ys),
    })
}

/// Average ranks, ties shared.
fn ranks<S: Scalar>(values: &[S]) -> Vec<S> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut out = vec![S::zero(); values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Average 1-based rank over the tie group [i, j].
        let rank = S::cast(i + 1 + j + 1) / S::cast(2);
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` for fewer than two points or a
/// degenerate (all-tied) side.
pub fn spearman<S: Scalar>(xs: &[S], ys: &[S]) -> Option<S> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = S::cast(xs.len());
    let mean_rank = (n + S::one()) / S::cast(2);
    let mut cov = S::zero();
    let mut var_x = S::zero();
    let mut var_y = S::zero();
    for (x, y) in rx.iter().zip(&ry) {
        let dx = *x - mean_rank;
        let dy = *y - mean_rank;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x <= S::zero() || var_y <= S::zero() {
        return None;
    }
    Some(cov / (var_x * var_y).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_sequential_sum_on_integers() {
        let values: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(pairwise_sum(&values), 5050.0);
        assert_eq!(pairwise_sum::<f64>(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5]), 3.5);
    }

    #[test]
    fn spearman_detects_perfect_monotonicity() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let down = [4.0, 1.0, 0.5, 0.1];
        let up = [0.1, 0.2, 0.7, 0.9];
        assert_eq!(spearman(&xs, &down), Some(-1.0));
        assert_eq!(spearman(&xs, &up), Some(1.0));
    }

    #[test]
    fn spearman_matches_hand_computed_value() {
        // Ranks x = [1,2,3,4], y = [1,3,2,4] → ρ = 0.8.
        let xs = [10.0, 20.0, 30.0, 40.0];
        let ys = [0.1, 0.9, 0.5, 1.2];
        let rho = spearman(&xs, &ys).unwrap();
        assert!((rho - 0.8).abs() < 1e-12);
    }

    #[test]
    fn spearman_handles_ties_by_average_rank() {
        // x = [1, 2, 2, 3] → ranks [1, 2.5, 2.5, 4].
        let xs = [1.0, 2.0, 2.0, 3.0];
        let ys = [1.0, 2.0, 3.0, 4.0];
        let rho = spearman(&xs, &ys).unwrap();
        // Hand Pearson on ranks [1,2.5,2.5,4] vs [1,2,3,4]:
        // devs x [-1.5,0,0,1.5], y [-1.5,-0.5,0.5,1.5]; cov = 4.5,
        // var_x = 4.5, var_y = 5 → ρ = 4.5/sqrt(22.5) ≈ 0.9486832.
        assert!((rho - 4.5 / 22.5_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spearman_is_absent_for_degenerate_input() {
        assert_eq!(spearman::<f64>(&[1.0], &[2.0]), None);
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), None);
    }
}
