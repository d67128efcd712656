use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::barrier::{barrier_report, BarrierReport, BarrierSettings};
use crate::curve::fit_circle;
use crate::error::{Error, Result};
use crate::flow::{huisken_functional, rescaled_frames, type_i_report, Frame, RescaledState, Trajectory, TypeIVerdict};
use crate::projection::{branch_split, projection_report, track_min_points, MinPointTrack, ProjectionReport};
use crate::spectral::{cutoff, mode_evolution, GaussianQuadrature, ModeEvolution};

use super::spec::Analysis;

/// Allowed per-step relative increase of the Huisken functional.
pub const HUISKEN_RELATIVE_SLACK: f64 = 1e-6;
/// `M` may grow and `δ` shrink by these factors after `t_0 = 0.05 T`.
pub const SLOPE_BAND: f64 = 1.05;
pub const FLOOR_BAND: f64 = 0.95;
pub const PERSISTENCE_START: f64 = 0.05;
/// Rescaled circle-fit residual accepted as circular.
pub const CIRCULARITY_RMS: f64 = 0.05;
/// Relative tolerance on `A_1 + A_2 = A`.
pub const AREA_SPLIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub verdict: Verdict,
    pub detail: String,
}

impl Check {
    fn new(pass: bool, detail: String) -> Self {
        Self {
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Monotonicity {
    pub holds: bool,
    /// Largest `(H_{j+1} - H_j) / H_j`.
    pub worst_relative_increase: f64,
    pub increases: usize,
}

/// Per-step check `H_{j+1} <= H_j (1 + slack)`.
pub fn huisken_monotonicity(values: &[f64], slack: f64) -> Monotonicity {
    let mut worst = f64::NEG_INFINITY;
    let mut increases = 0;
    for w in values.windows(2) {
        let rel = (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        if rel > slack {
            increases += 1;
        }
    }
    Monotonicity {
        holds: increases == 0,
        worst_relative_increase: if values.len() < 2 { 0.0 } else { worst },
        increases,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PersistenceBands {
    pub t0: f64,
    pub m0: f64,
    pub delta0: f64,
    pub worst_m_ratio: f64,
    pub worst_delta_ratio: f64,
    pub holds: bool,
}

/// `M(t) <= 1.05 M(t_0)` and `δ(t) >= 0.95 δ(t_0)` for every frame at or
/// after the first one with `t >= 0.05 T`.
pub fn persistence_bands(frames: &[Frame<f64>], reports: &[ProjectionReport<f64>], t_ext: f64) -> Result<PersistenceBands> {
    let start = frames
        .iter()
        .position(|f| f.t >= PERSISTENCE_START * t_ext)
        .ok_or_else(|| Error::InvalidParameter("no frame after the persistence start".into()))?;
    let m0 = reports[start]
        .slope_constant_m
        .ok_or_else(|| Error::Domain("slope constant undefined at t0".into()))?;
    let d0 = reports[start].horizontal_floor_delta;
    let mut worst_m: f64 = 0.0;
    let mut worst_d = f64::INFINITY;
    for r in &reports[start..] {
        worst_m = worst_m.max(r.slope_constant_m.map_or(f64::INFINITY, |m| m / m0));
        worst_d = worst_d.min(r.horizontal_floor_delta / d0);
    }
    Ok(PersistenceBands {
        t0: frames[start].t,
        m0,
        delta0: d0,
        worst_m_ratio: worst_m,
        worst_delta_ratio: worst_d,
        holds: worst_m <= SLOPE_BAND && worst_d >= FLOOR_BAND,
    })
}

/// One row of `diagnostics.csv`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub tau: Option<f64>,
    pub length: f64,
    pub diameter: f64,
    pub max_kappa: f64,
    pub type_i_ratio: Option<f64>,
    pub is_convex: bool,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub delta: f64,
    #[serde(rename = "A1")]
    pub a1: Option<f64>,
    #[serde(rename = "A2")]
    pub a2: Option<f64>,
    pub p_x: Option<f64>,
    pub p_y: Option<f64>,
    pub q_x: Option<f64>,
    pub q_y: Option<f64>,
    pub circle_fit_rms: Option<f64>,
    pub huisken: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Metrics {
    pub t_estimate: Option<f64>,
    pub last_certifiable: usize,
    pub tau_span: Option<f64>,
    pub type_i_terminal_ratio: Option<f64>,
    pub type_i_sup_ratio: Option<f64>,
    pub circle_fit_rms: Option<f64>,
    pub circle_fit_radius: Option<f64>,
    pub axis_ratio: Option<f64>,
    pub multiplicity: Option<u32>,
    pub persistence: Option<PersistenceBands>,
    pub area_delta0: Option<f64>,
    pub area_split_error: Option<f64>,
    pub huisken: Option<Monotonicity>,
    pub barrier_epsilon: Option<f64>,
    pub barrier_min_slack: Option<f64>,
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalysisOptions {
    pub rho: Option<f64>,
    pub barrier_epsilon: Option<f64>,
}

/// Everything the pipeline derives from a trajectory.
#[derive(Debug, Clone)]
pub struct RunAnalysis {
    pub rows: Vec<DiagnosticsRow>,
    pub checks: BTreeMap<String, Check>,
    pub metrics: Metrics,
    pub barrier: Option<BarrierReport<f64>>,
    pub modes: Option<ModeEvolution<f64>>,
    pub min_points: Option<MinPointTrack<f64>>,
}

impl RunAnalysis {
    /// No requested check failed or errored.
    pub fn passes(&self) -> bool {
        self.checks
            .values()
            .all(|c| matches!(c.verdict, Verdict::Pass | Verdict::NotApplicable))
    }
}

/// Cut-off scale that keeps `η(x/ρ)` inside every branch domain.
fn auto_rho(states: &[RescaledState<f64>]) -> f64 {
    let reach = states
        .iter()
        .map(|s| {
            let (lo, hi) = s
                .curve
                .points()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])));
            hi.min(-lo)
        })
        .fold(f64::INFINITY, f64::min);
    0.45 * reach
}

/// Mode series of the upper branch `y^u(x̃)` of each rescaled frame.
pub fn branch_modes(states: &[RescaledState<f64>], rho: f64) -> Result<ModeEvolution<f64>> {
    let quad = GaussianQuadrature::<f64>::standard();
    let mut taus = Vec::with_capacity(states.len());
    let mut samples = Vec::with_capacity(states.len());
    for s in states {
        let d = branch_split(&s.curve, 3)?;
        if !(2.0 * rho < d.x_max.min(-d.x_min)) {
            return Err(Error::Domain(format!(
                "cut-off support [-{}, {}] leaves the branch domain [{}, {}]",
                2.0 * rho,
                2.0 * rho,
                d.x_min,
                d.x_max
            )));
        }
        taus.push(s.tau);
        samples.push(
            quad.nodes
                .iter()
                .map(|&x| if cutoff(x / rho) > 0.0 { d.upper_branch.y_at(x) } else { 0.0 })
                .collect(),
        );
    }
    mode_evolution(&quad, &taus, &samples, rho)
}

fn error_check(e: &Error) -> Check {
    Check {
        verdict: Verdict::Error,
        detail: e.to_string(),
    }
}

/// Runs the requested analyses; a failing precondition is recorded on its
/// own check and the others still run.
pub fn analyze_trajectory(traj: &Trajectory<f64>, analyses: &BTreeSet<Analysis>, opts: &AnalysisOptions) -> RunAnalysis {
    let mut checks = BTreeMap::new();
    let mut metrics = Metrics {
        t_estimate: traj.t_estimate,
        last_certifiable: traj.last_certifiable(),
        ..Default::default()
    };
    let reports: Vec<ProjectionReport<f64>> = traj.frames.iter().map(|f| projection_report(&f.curve)).collect();
    let mut rows: Vec<DiagnosticsRow> = traj
        .frames
        .iter()
        .zip(&reports)
        .map(|(f, r)| DiagnosticsRow {
            t: f.t,
            length: f.length,
            diameter: f.diameter,
            max_kappa: f.max_kappa,
            is_convex: r.passes(),
            m: r.slope_constant_m,
            delta: r.horizontal_floor_delta,
            ..Default::default()
        })
        .collect();
    let convex_start = reports[0].passes();
    let want = |a: Analysis| analyses.contains(&a);

    let t_ext = match traj.t_estimate() {
        Ok(t) => t,
        Err(e) => {
            for a in analyses {
                checks.insert(a.name().to_string(), error_check(&e));
            }
            return RunAnalysis {
                rows,
                checks,
                metrics,
                barrier: None,
                modes: None,
                min_points: None,
            };
        }
    };
    let last = metrics.last_certifiable;
    for (row, f) in rows.iter_mut().zip(&traj.frames) {
        if f.t < t_ext {
            row.tau = Some(-0.5 * (t_ext - f.t).ln());
        }
    }
    let states = rescaled_frames(traj, &traj.extinction_point, last).unwrap_or_default();
    if let Some(first) = states.first() {
        metrics.tau_span = Some(states.last().unwrap().tau - first.tau);
    }

    if want(Analysis::Convexity) {
        let check = if !convex_start {
            Check {
                verdict: Verdict::NotApplicable,
                detail: "initial frame has no one-to-one convex projection".into(),
            }
        } else {
            let bad = reports.iter().filter(|r| !r.passes()).count();
            match persistence_bands(&traj.frames, &reports, t_ext) {
                Ok(p) => {
                    metrics.persistence = Some(p);
                    Check::new(
                        bad == 0 && p.holds,
                        format!(
                            "{bad} failing frames; M ratio {:.4}, delta ratio {:.4}",
                            p.worst_m_ratio, p.worst_delta_ratio
                        ),
                    )
                }
                Err(e) => error_check(&e),
            }
        };
        checks.insert(Analysis::Convexity.name().into(), check);
    }

    if want(Analysis::TypeI) {
        let check = match type_i_report(traj) {
            Ok(rep) => {
                for (t, r) in &rep.ratio_series {
                    if let Some(i) = traj.frames.iter().position(|f| f.t == *t) {
                        rows[i].type_i_ratio = Some(*r);
                    }
                }
                metrics.type_i_terminal_ratio = Some(rep.terminal_ratio);
                metrics.type_i_sup_ratio = Some(rep.sup_ratio);
                Check::new(
                    rep.verdict == TypeIVerdict::TypeIBounded,
                    format!("terminal ratio {:.4}, sup {:.4}", rep.terminal_ratio, rep.sup_ratio),
                )
            }
            Err(e) => error_check(&e),
        };
        checks.insert(Analysis::TypeI.name().into(), check);
    }

    // rows index of each rescaled state
    let state_rows: Vec<usize> = traj
        .frames
        .iter()
        .enumerate()
        .take(last + 1)
        .filter(|(_, f)| f.t < t_ext)
        .map(|(i, _)| i)
        .collect();

    if want(Analysis::Circularity) || want(Analysis::Huisken) {
        let mut hs = Vec::with_capacity(states.len());
        for (s, &i) in states.iter().zip(&state_rows) {
            let h = huisken_functional(&s.curve);
            rows[i].huisken = Some(h);
            hs.push(h);
            if let Ok(fit) = fit_circle(&s.curve) {
                rows[i].circle_fit_rms = Some(fit.rms_residual);
            }
        }
        if want(Analysis::Circularity) {
            let check = match states.last().ok_or_else(|| Error::Domain("no rescaled frames".into())).and_then(|s| fit_circle(&s.curve)) {
                Ok(fit) => {
                    metrics.circle_fit_rms = Some(fit.rms_residual);
                    metrics.circle_fit_radius = Some(fit.radius);
                    metrics.axis_ratio = Some(fit.axis_ratio);
                    metrics.multiplicity = Some(fit.multiplicity);
                    Check::new(
                        fit.rms_residual <= CIRCULARITY_RMS && fit.multiplicity == 1,
                        format!(
                            "rms {:.3e}, radius {:.4}, multiplicity {} at the last certifiable frame",
                            fit.rms_residual, fit.radius, fit.multiplicity
                        ),
                    )
                }
                Err(e) => error_check(&e),
            };
            checks.insert(Analysis::Circularity.name().into(), check);
        }
        if want(Analysis::Huisken) {
            let check = if !convex_start {
                Check {
                    verdict: Verdict::NotApplicable,
                    detail: "monotonicity is only asserted for convex-projection runs".into(),
                }
            } else {
                let m = huisken_monotonicity(&hs, HUISKEN_RELATIVE_SLACK);
                metrics.huisken = Some(m);
                Check::new(
                    m.holds && hs.len() >= 2,
                    format!("{} increases, worst relative step {:.3e}", m.increases, m.worst_relative_increase),
                )
            };
            checks.insert(Analysis::Huisken.name().into(), check);
        }
    }

    let not_convex = || Check {
        verdict: Verdict::NotApplicable,
        detail: "needs a one-to-one convex projection".into(),
    };

    let mut min_points = None;
    if want(Analysis::AreaFloor) {
        let check = if !convex_start {
            not_convex()
        } else {
            match track_min_points(&states) {
                Ok(tr) => {
                    for (k, &i) in state_rows.iter().enumerate() {
                        let row = &mut rows[i];
                        row.a1 = Some(tr.areas[k].0);
                        row.a2 = Some(tr.areas[k].1);
                        row.p_x = Some(tr.p_track[k][0]);
                        row.p_y = Some(tr.p_track[k][1]);
                        row.q_x = Some(tr.q_track[k][0]);
                        row.q_y = Some(tr.q_track[k][1]);
                    }
                    let err = tr.area_split_error();
                    metrics.area_delta0 = Some(tr.delta0);
                    metrics.area_split_error = Some(err);
                    let c = Check::new(
                        tr.delta0 > 0.0 && err <= AREA_SPLIT_TOL && tr.continuous,
                        format!("delta0 {:.4e}, split error {err:.2e}, continuous {}", tr.delta0, tr.continuous),
                    );
                    min_points = Some(tr);
                    c
                }
                Err(e) => error_check(&e),
            }
        };
        checks.insert(Analysis::AreaFloor.name().into(), check);
    }

    let mut barrier = None;
    if want(Analysis::Barrier) {
        let check = if !convex_start {
            not_convex()
        } else {
            let settings = BarrierSettings {
                epsilon: opts.barrier_epsilon,
                ..Default::default()
            };
            match barrier_report(traj, &settings) {
                Ok(rep) => {
                    metrics.barrier_epsilon = Some(rep.epsilon);
                    metrics.barrier_min_slack = Some(rep.min_slack);
                    let c = Check::new(
                        rep.passes(),
                        format!(
                            "epsilon {:.4}, min slack {:.3e}, residual {:.3e}, one-sided ok {}",
                            rep.epsilon, rep.min_slack, rep.max_residual_offcenter, rep.onesided_ok_at_zero
                        ),
                    );
                    barrier = Some(rep);
                    c
                }
                Err(e) => error_check(&e),
            }
        };
        checks.insert(Analysis::Barrier.name().into(), check);
    }

    let mut modes = None;
    if want(Analysis::Spectral) {
        let check = if !convex_start {
            not_convex()
        } else {
            let rho = opts.rho.unwrap_or_else(|| auto_rho(&states));
            metrics.rho = Some(rho);
            match branch_modes(&states, rho) {
                Ok(m) => {
                    let c = Check::new(
                        true,
                        format!("{} frames, rho {rho:.4}, final tail {:.3e}", m.tau.len(), m.splits.last().map_or(0.0, |s| s.tail_norm)),
                    );
                    modes = Some(m);
                    c
                }
                Err(e) => error_check(&e),
            }
        };
        checks.insert(Analysis::Spectral.name().into(), check);
    }

    RunAnalysis {
        rows,
        checks,
        metrics,
        barrier,
        modes,
        min_points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotonicity_slack() {
        assert!(huisken_monotonicity(&[3.0, 2.0, 2.0, 1.0], 1e-6).holds);
        let m = huisken_monotonicity(&[1.0, 1.0 + 5e-7, 1.0 + 9e-7], 1e-6);
        assert!(m.holds);
        let m = huisken_monotonicity(&[1.0, 1.1, 1.0], 1e-6);
        assert!(!m.holds && m.increases == 1 && (m.worst_relative_increase - 0.1).abs() < 1e-12);
    }
}
