use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use log::info;
use serde::Serialize;

use crate::error::Result;
use crate::flow::{evolve, StopReason, Trajectory};
use crate::io::{write_csv_rows, write_json, write_modes_csv, write_trajectory};

use super::analysis::{analyze_trajectory, AnalysisOptions, Check, Metrics, RunAnalysis};
use super::spec::ScenarioSpec;

/// Contents of `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    pub t_estimate: Option<f64>,
    pub stop_reason: StopReason,
    pub n_frames: usize,
    pub checks: BTreeMap<String, Check>,
    pub metrics: Metrics,
    pub passes: bool,
}

/// Writes `diagnostics.csv`, `summary.json` and, when computed,
/// `barrier_report.json` and `modes.csv` into `dir`.
pub fn write_analysis(
    dir: &Path,
    traj: &Trajectory<f64>,
    analysis: &RunAnalysis,
    scenario: Option<ScenarioSpec>,
) -> Result<ScenarioSummary> {
    fs::create_dir_all(dir)?;
    write_csv_rows(&dir.join("diagnostics.csv"), &analysis.rows)?;
    if let Some(b) = &analysis.barrier {
        write_json(&dir.join("barrier_report.json"), b)?;
    }
    if let Some(m) = &analysis.modes {
        write_modes_csv(&dir.join("modes.csv"), m)?;
    }
    let summary = ScenarioSummary {
        scenario,
        t_estimate: traj.t_estimate,
        stop_reason: traj.stopped_reason,
        n_frames: traj.frames.len(),
        checks: analysis.checks.clone(),
        metrics: analysis.metrics.clone(),
        passes: analysis.passes(),
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Builds the curve, evolves it, runs the requested analyses and persists
/// everything under `out`. Relative input paths resolve against `base_dir`.
pub fn run_scenario(spec: &ScenarioSpec, base_dir: &Path, out: &Path) -> Result<ScenarioSummary> {
    let curve = spec.build_curve(base_dir)?;
    info!("evolving {} vertices in R^{}", curve.len(), curve.dim());
    let traj = evolve(&curve, &spec.controls)?;
    info!(
        "stopped ({:?}) after {} steps, T = {:?}",
        traj.stopped_reason,
        traj.steps(),
        traj.t_estimate
    );
    write_trajectory(out, &traj, Some(serde_json::to_value(spec)?))?;
    let opts = AnalysisOptions {
        rho: spec.rho,
        barrier_epsilon: spec.barrier_epsilon,
    };
    let analysis = analyze_trajectory(&traj, &spec.analyses, &opts);
    write_analysis(out, &traj, &analysis, Some(spec.clone()))
}
