use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{Frame, Trajectory};
use crate::projection::{branch_split, BranchDecomposition};
use crate::scalar::Real;

use super::field::BarrierField;
use super::residual::{subsolution_residual, SpaceTimeGrid, SubsolutionReport};
use super::track::ExtremaTrack;

/// Required ratio `Y0 / (ε φ_unit)` on the initial grid.
pub const EPSILON_MARGIN: f64 = 1.1;
const MAX_HALVINGS: usize = 60;

/// Largest `ε = 2^{-k} Y0(0) / φ_unit(0)` with `Y0 >= 1.1 ε φ_unit` on every
/// interior grid point of the initial branch decomposition.
pub fn choose_epsilon<S: Real>(y0: &BranchDecomposition<S>, unit_field: &BarrierField<S>, t0: S) -> Result<S> {
    let m = y0.grid.len();
    if let Some(i) = (1..m - 1).find(|&i| !(y0.gap[i] > S::zero())) {
        return Err(Error::Domain(format!("Y0 = {} is not positive at x = {}", y0.gap[i], y0.grid[i])));
    }
    let unit = unit_field.with_epsilon(S::one());
    let phi0 = unit.amplitude(t0)?;
    let eps0 = y0.gap_at(S::zero()) / phi0;
    if !(eps0 > S::zero()) {
        return Err(Error::Domain("Y0(0) is not positive".into()));
    }
    let phi: Vec<S> = (1..m - 1)
        .map(|i| unit.eval_or_zero(y0.grid[i], t0))
        .collect::<Result<_>>()?;
    let margin = S::lit(EPSILON_MARGIN);
    let mut eps = eps0;
    for _ in 0..=MAX_HALVINGS {
        if (1..m - 1).all(|i| y0.gap[i] >= margin * eps * phi[i - 1]) {
            return Ok(eps);
        }
        eps = eps * S::half();
    }
    Err(Error::Domain(format!("no admissible epsilon after {MAX_HALVINGS} halvings")))
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameSlack<S> {
    pub t: S,
    pub min_slack: S,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonCertificate<S> {
    pub holds: bool,
    pub min_slack: S,
    pub per_frame: Vec<FrameSlack<S>>,
}

/// `Y(x, t) - φ(x, t)` on the branch grid of every frame; endpoints count
/// as zero slack. A frame holds iff its minimum is at least `-1e-8` times
/// its largest gap.
pub fn comparison_certificate<S: Real>(
    frames: &[Frame<S>],
    field: &BarrierField<S>,
    grid_n: usize,
) -> Result<ComparisonCertificate<S>> {
    let mut per_frame = Vec::with_capacity(frames.len());
    for f in frames {
        let d = branch_split(&f.curve, grid_n)?;
        let mut slack = S::zero();
        for i in 1..d.grid.len() - 1 {
            slack = slack.min(d.gap[i] - field.eval_or_zero(d.grid[i], f.t)?);
        }
        let scale = d.gap.iter().copied().fold(S::zero(), |a, b| a.max(b));
        per_frame.push(FrameSlack {
            t: f.t,
            min_slack: slack,
            holds: slack >= -S::lit(1e-8) * scale,
        });
    }
    Ok(ComparisonCertificate {
        holds: per_frame.iter().all(|p| p.holds),
        min_slack: per_frame.iter().map(|p| p.min_slack).fold(S::zero(), |a, b| a.min(b)),
        per_frame,
    })
}

/// Contents of `barrier_report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct BarrierReport<S> {
    pub epsilon: S,
    pub t_ext: S,
    pub min_slack: S,
    pub holds: bool,
    pub max_residual_offcenter: S,
    pub onesided_ok_at_zero: bool,
    pub residual: SubsolutionReport<S>,
    pub monotone_track: bool,
    pub per_frame: Vec<FrameSlack<S>>,
}

impl<S: Real> BarrierReport<S> {
    pub fn passes(&self) -> bool {
        self.holds && self.onesided_ok_at_zero && self.max_residual_offcenter <= self.residual.tolerance
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BarrierSettings {
    /// Branch grid points per frame.
    pub grid_n: usize,
    pub nx: usize,
    pub nt: usize,
    /// Fixed amplitude instead of [`choose_epsilon`].
    pub epsilon: Option<f64>,
}

impl Default for BarrierSettings {
    fn default() -> Self {
        Self {
            grid_n: 201,
            nx: 200,
            nt: 200,
            epsilon: None,
        }
    }
}

/// Full barrier pipeline on a trajectory: frames up to the last certifiable
/// one, shifted so the extinction point sits at the origin.
pub fn barrier_report<S: Real>(traj: &Trajectory<S>, settings: &BarrierSettings) -> Result<BarrierReport<S>> {
    let t_ext = traj.t_estimate()?;
    let last = traj.last_certifiable();
    let shift: Vec<S> = traj.extinction_point.iter().map(|&v| -v).collect();
    let frames: Vec<Frame<S>> = traj.frames[..=last]
        .iter()
        .filter(|f| f.t < t_ext)
        .map(|f| Frame {
            curve: f.curve.translated(&shift),
            ..f.clone()
        })
        .collect();
    if frames.len() < 2 {
        return Err(Error::InvalidParameter("fewer than two certifiable frames".into()));
    }
    let track = ExtremaTrack::from_frames(&frames)?;
    let unit = BarrierField::new(track, t_ext, S::one())?;
    let t0 = frames[0].t;
    let epsilon = match settings.epsilon {
        Some(e) => S::lit(e),
        None => choose_epsilon(&branch_split(&frames[0].curve, settings.grid_n)?, &unit, t0)?,
    };
    let field = unit.with_epsilon(epsilon);
    let grid = SpaceTimeGrid::spanning(&field, settings.nx, settings.nt, frames.last().unwrap().t)?;
    let residual = subsolution_residual(&field, &grid)?;
    let cert = comparison_certificate(&frames, &field, settings.grid_n)?;
    Ok(BarrierReport {
        epsilon,
        t_ext,
        min_slack: cert.min_slack,
        holds: cert.holds,
        max_residual_offcenter: residual.max_residual_offcenter,
        onesided_ok_at_zero: residual.onesided_ok_at_zero,
        monotone_track: field.track.monotone,
        residual,
        per_frame: cert.per_frame,
    })
}
