//! Deterministic text emission of run and sweep reports.
//!
//! All numeric formatting uses Rust's shortest round-trip decimal rendering
//! and `\n` line endings, so two runs with the same `(config, seed)` emit
//! byte-identical files on any platform and worker count.

use std::fmt::Write as _;

use crate::montecarlo::{RunReport, SweepReport};
use crate::scalar::Scalar;

/// `run.csv`: one row per step and region.
pub fn run_csv<S: Scalar>(report: &RunReport<S>) -> String {
    let mut out = String::new();
    out.push_str("step,region,mutations,productivity,avg_profit_rate,population\n");
    for step in &report.steps {
        for (r, record) in step.regions.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                step.step,
                report.region_names[r],
                record.mutations,
                record.productivity,
                record.average_profit_rate,
                record.population,
            );
        }
    }
    out
}

/// `run.report`: a diffable field-per-line document mirroring the report.
pub fn run_report_doc<S: Scalar>(report: &RunReport<S>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario = {}", report.scenario);
    let _ = writeln!(out, "seed = {}", report.seed);
    if let Some(replication) = report.replication {
        let _ = writeln!(out, "replication = {replication}");
    }
    let _ = writeln!(out, "horizon = {}", report.horizon);
    for (r, name) in report.region_names.iter().enumerate() {
        let _ = writeln!(
            out,
            "region {name} initial_productivity = {}",
            report.initial_productivity[r]
        );
    }
    for step in &report.steps {
        for (r, record) in step.regions.iter().enumerate() {
            let name = &report.region_names[r];
            let _ = write!(
                out,
                "step {} region {name} mutations = {} productivity = {} \
                 avg_profit_rate = {} population = {}",
                step.step,
                record.mutations,
                record.productivity,
                record.average_profit_rate,
                record.population,
            );
            match record.tally {
                Some(tally) => {
                    let _ = writeln!(
                        out,
                        " tally = {}/{}",
                        tally.top_count, tally.candidates
                    );
                }
                None => {
                    let _ = writeln!(out, " tally = -");
                }
            }
        }
    }
    for (r, summary) in report.summary.iter().enumerate() {
        let name = &report.region_names[r];
        let _ = writeln!(
            out,
            "summary region {name} pace_of_evolution = {} total_mutations = {} \
             final_population = {}",
            summary.pace_of_evolution, summary.total_mutations, summary.final_population,
        );
    }
    out
}

/// One human-readable line for the CLI.
pub fn run_summary_line<S: Scalar>(report: &RunReport<S>) -> String {
    format!(
        "{}: seed {}, {} steps, {} regions, total mutations {}, mean pace {}",
        report.scenario,
        report.seed,
        report.horizon,
        report.region_names.len(),
        report.total_mutations(),
        report.mean_pace(),
    )
}

/// `sweep.csv`: one row per swept threshold.
pub fn sweep_csv<S: Scalar>(report: &SweepReport<S>) -> String {
    let mut out = String::new();
    out.push_str("theta,reps,mean_mutations,mean_pace,sd_pace\n");
    for row in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.theta, row.replications, row.mean_mutations, row.mean_pace, row.sd_pace,
        );
    }
    out
}

/// `sweep.report`: rows plus the rank-correlation summary.
pub fn sweep_report_doc<S: Scalar>(report: &SweepReport<S>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scenario = {}", report.scenario);
    let _ = writeln!(out, "seed = {}", report.base_seed);
    for row in &report.rows {
        let _ = writeln!(
            out,
            "theta {} reps = {} mean_mutations = {} mean_pace = {} sd_pace = {}",
            row.theta, row.replications, row.mean_mutations, row.mean_pace, row.sd_pace,
        );
    }
    let _ = writeln!(out, "spearman_theta_pace = {}", spearman_text(report));
    out
}

/// Correlation summary line for the CLI.
pub fn sweep_summary_line<S: Scalar>(report: &SweepReport<S>) -> String {
    format!(
        "{}: seed {}, {} thetas x {} reps, Spearman(theta, mean pace) = {}",
        report.scenario,
        report.base_seed,
        report.rows.len(),
        report.rows.first().map(|r| r.replications).unwrap_or(0),
        spearman_text(report),
    )
}

fn spearman_text<S: Scalar>(report: &SweepReport<S>) -> String {
    match report.spearman {
        Some(rho) => rho.to_string(),
        None => "undefined".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{run_once, sweep_threshold};
    use crate::scenario::preset;

    #[test]
    fn run_csv_has_header_and_one_row_per_step_and_region() {
        let mut config = preset("reference").unwrap();
        config.horizon = 5;
        let report = run_once::<f64>(&config).unwrap();
        let csv = run_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines[0],
            "step,region,mutations,productivity,avg_profit_rate,population"
        );
        assert_eq!(lines.len(), 1 + 5 * config.regions.len());
    }

    #[test]
    fn emission_is_deterministic() {
        let mut config = preset("reference").unwrap();
        config.horizon = 8;
        let a = run_once::<f64>(&config).unwrap();
        let b = run_once::<f64>(&config).unwrap();
        assert_eq!(run_csv(&a), run_csv(&b));
        assert_eq!(run_report_doc(&a), run_report_doc(&b));
    }

    #[test]
    fn sweep_csv_row_count_matches_thetas() {
        let mut config = preset("reference").unwrap();
        config.horizon = 5;
        let sweep = sweep_threshold::<f64>(&config, &[0, 20, 60], 3).unwrap();
        let csv = sweep_csv(&sweep);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("theta,reps,mean_mutations,mean_pace,sd_pace\n"));
        let doc = sweep_report_doc(&sweep);
        assert!(doc.contains("spearman_theta_pace = "));
    }
}
