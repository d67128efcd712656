use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::curve::{ops::curvature_into, resample_equal_arclength, Curve, SPACING_RATIO_LIMIT};
use crate::error::{Error, Result};
use crate::scalar::{norm, Real};

use super::step::{euler, step_csf, Scheme};

/// Frames with diameter below this fraction of the initial diameter are
/// reported but never used to certify anything.
pub const CERTIFY_DIAMETER_FRAC: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FlowControls {
    pub scheme: Scheme,
    /// `dt = dt_cfl * h_min^2`.
    pub dt_cfl: f64,
    pub resample_every: usize,
    pub stop_diameter_frac: f64,
    pub max_steps: usize,
    /// A frame is stored whenever `ln(radius)` has dropped by this much.
    pub frame_log_spacing: f64,
    /// A frame is stored at least this often (in steps).
    pub frame_max_gap: usize,
}

impl Default for FlowControls {
    fn default() -> Self {
        Self {
            scheme: Scheme::Explicit,
            dt_cfl: 0.2,
            resample_every: 10,
            stop_diameter_frac: 1e-3,
            max_steps: 20_000_000,
            frame_log_spacing: 0.01,
            frame_max_gap: 5000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ExtinctionThreshold,
    StepLimit,
    Instability,
}

/// A stored time slice with the diagnostics computed when it was recorded.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct Frame<S> {
    pub t: S,
    /// Step size in force when the frame was recorded.
    pub dt: S,
    pub curve: Curve<S>,
    pub length: S,
    pub diameter: S,
    pub max_kappa: S,
}

impl<S: Real> Frame<S> {
    pub fn new(t: S, dt: S, curve: Curve<S>) -> Self {
        let mut kappa = vec![S::zero(); curve.coords().len()];
        curvature_into(&curve, &curve.edge_lengths(), &mut kappa);
        let max_kappa = kappa
            .chunks_exact(curve.dim())
            .map(norm)
            .fold(S::zero(), |a, b| a.max(b));
        Self {
            t,
            dt,
            length: curve.length(),
            diameter: curve.diameter(),
            max_kappa,
            curve,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct Trajectory<S> {
    pub frames: Vec<Frame<S>>,
    pub dt_history: Vec<S>,
    pub t_estimate: Option<S>,
    /// Centroid of the last frame; the point the curve shrinks to.
    pub extinction_point: Vec<S>,
    pub stopped_reason: StopReason,
    pub controls: FlowControls,
}

impl<S: Real> Trajectory<S> {
    pub fn t_estimate(&self) -> Result<S> {
        self.t_estimate
            .ok_or_else(|| Error::NoExtinction("trajectory has no extinction estimate".into()))
    }

    /// Index of the last frame whose diameter is at least
    /// [`CERTIFY_DIAMETER_FRAC`] times the initial one.
    pub fn last_certifiable(&self) -> usize {
        let floor = self.frames[0].diameter * S::lit(CERTIFY_DIAMETER_FRAC);
        self.frames
            .iter()
            .rposition(|f| f.diameter >= floor)
            .unwrap_or(0)
    }

    pub fn steps(&self) -> usize {
        self.dt_history.len()
    }
}

/// Runs the flow until the diameter drops below the stopping fraction, the
/// step limit is hit, or an instability is detected.
///
/// The input is first redistributed to equal arc length with its own vertex
/// count; that redistributed curve is frame 0.
pub fn evolve<S: Real>(initial: &Curve<S>, controls: &FlowControls) -> Result<Trajectory<S>> {
    if !(controls.dt_cfl > 0.0) || controls.resample_every == 0 {
        return Err(Error::InvalidParameter("dt_cfl must be positive and resample_every >= 1".into()));
    }
    initial.validate()?;
    let n = initial.len();
    let mut curve = resample_equal_arclength(initial, n)?;
    let cfl = S::lit(controls.dt_cfl);
    let stop_diam = curve.diameter() * S::lit(controls.stop_diameter_frac);

    let edges = curve.edge_lengths();
    let h0 = edges.iter().copied().fold(S::infinity(), |a, b| a.min(b));
    let mut frames = vec![Frame::new(S::zero(), cfl * h0 * h0, curve.clone())];
    let mut dt_history = Vec::new();
    let mut t = S::zero();
    let mut kappa = vec![S::zero(); curve.coords().len()];
    let mut last_kappa_max = frames[0].max_kappa;
    let mut last_length = curve.length();
    let mut last_log_r = radius(&curve).ln();
    let mut last_frame_step = 0usize;
    let frame_spacing = S::lit(controls.frame_log_spacing);

    let mut reason = StopReason::StepLimit;
    for step in 1..=controls.max_steps {
        let edges = curve.edge_lengths();
        let h = edges.iter().copied().fold(S::infinity(), |a, b| a.min(b));
        let dt = cfl * h * h;
        let next = match controls.scheme {
            Scheme::Explicit => {
                curvature_into(&curve, &edges, &mut kappa);
                let kmax = kappa
                    .chunks_exact(curve.dim())
                    .map(norm)
                    .fold(S::zero(), |a, b| a.max(b));
                if kmax > S::lit(10.0) * last_kappa_max {
                    warn!("curvature jumped from {last_kappa_max:e} to {kmax:e} at step {step}");
                    reason = StopReason::Instability;
                    break;
                }
                last_kappa_max = kmax;
                euler(&curve, &kappa, dt)
            }
            Scheme::SemiImplicit => step_csf(&curve, dt, Scheme::SemiImplicit)?,
        };
        let length = next.length();
        if !(length < last_length) {
            warn!("length did not decrease at step {step}");
            reason = StopReason::Instability;
            break;
        }
        t = t + dt;
        dt_history.push(dt);
        curve = next;
        if step % controls.resample_every == 0 || curve.spacing_ratio() > S::lit(SPACING_RATIO_LIMIT) {
            curve = resample_equal_arclength(&curve, n)?;
        }
        last_length = curve.length();

        let r = radius(&curve);
        let stop = if S::two() * r < stop_diam {
            true
        } else if r < stop_diam && step % controls.resample_every == 0 {
            curve.diameter() < stop_diam
        } else {
            false
        };
        let log_r = r.ln();
        if stop || last_log_r - log_r >= frame_spacing || step - last_frame_step >= controls.frame_max_gap {
            let frame = Frame::new(t, dt, curve.clone());
            if controls.scheme == Scheme::SemiImplicit {
                last_kappa_max = frame.max_kappa;
            }
            frames.push(frame);
            last_log_r = log_r;
            last_frame_step = step;
        }
        if stop {
            reason = StopReason::ExtinctionThreshold;
            break;
        }
    }
    if last_frame_step != dt_history.len() {
        frames.push(Frame::new(t, *dt_history.last().unwrap(), curve.clone()));
    }
    debug!("evolve: {} steps, {} frames, {:?}", dt_history.len(), frames.len(), reason);

    let extinction_point = frames.last().unwrap().curve.centroid();
    let mut traj = Trajectory {
        frames,
        dt_history,
        t_estimate: None,
        extinction_point,
        stopped_reason: reason,
        controls: *controls,
    };
    traj.t_estimate = match estimate_extinction(&traj.frames) {
        Ok(t) => Some(t),
        Err(e) => {
            warn!("{e}");
            None
        }
    };
    Ok(traj)
}

fn radius<S: Real>(curve: &Curve<S>) -> S {
    curve.max_radius_about(&curve.centroid())
}

/// Least-squares fit of `diameter^2 ≈ c (T - t)` over the last quartile of
/// the frames.
pub fn estimate_extinction<S: Real>(frames: &[Frame<S>]) -> Result<S> {
    if frames.len() < 10 {
        return Err(Error::NoExtinction(format!("{} frames, need at least 10", frames.len())));
    }
    if !(frames.last().unwrap().diameter < frames[0].diameter) {
        return Err(Error::NoExtinction("diameter is not decreasing".into()));
    }
    let tail = &frames[frames.len() - frames.len() / 4..];
    let m = S::from_usize_lossy(tail.len());
    let mt = tail.iter().map(|f| f.t).sum::<S>() / m;
    let md = tail.iter().map(|f| f.diameter * f.diameter).sum::<S>() / m;
    let (mut sxy, mut sxx) = (S::zero(), S::zero());
    for f in tail {
        let dx = f.t - mt;
        sxy = sxy + dx * (f.diameter * f.diameter - md);
        sxx = sxx + dx * dx;
    }
    let slope = sxy / sxx;
    if !(slope < S::zero()) {
        return Err(Error::NoExtinction("diameter^2 is not decreasing in the last quartile".into()));
    }
    let t_ext = mt - md / slope;
    if !(t_ext > frames.last().unwrap().t) {
        return Err(Error::NoExtinction("fitted extinction time precedes the last frame".into()));
    }
    Ok(t_ext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::fixtures::*;

    #[test]
    fn synthetic_linear_law() {
        let frames: Vec<Frame<f64>> = (0..40)
            .map(|i| {
                let t = 0.6 * i as f64 / 39.0;
                let d = (3.0 * (0.7 - t)).sqrt();
                Frame {
                    t,
                    dt: 1e-6,
                    curve: circle(16, 0.5 * d),
                    length: 0.0,
                    diameter: d,
                    max_kappa: 0.0,
                }
            })
            .collect();
        assert!((estimate_extinction(&frames).unwrap() - 0.7).abs() < 1e-9);
        assert!(estimate_extinction(&frames[..5]).is_err());
        let mut grow = frames.clone();
        grow.reverse();
        assert!(estimate_extinction(&grow).is_err());
    }

    #[test]
    fn circle_extinction() {
        let traj = evolve(&circle(64, 1.0), &FlowControls::default()).unwrap();
        assert_eq!(traj.stopped_reason, StopReason::ExtinctionThreshold);
        assert!((traj.t_estimate().unwrap() - 0.5).abs() < 1e-3);
        for w in traj.frames.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].length < w[0].length);
        }
        let last = traj.frames.last().unwrap();
        assert!(last.diameter < 2e-3);
    }

    #[test]
    fn radius_two_scaling() {
        let traj = evolve(&circle(64, 2.0), &FlowControls::default()).unwrap();
        assert!((traj.t_estimate().unwrap() - 2.0).abs() < 4e-3);
    }

    #[test]
    fn step_limit_is_reported() {
        let controls = FlowControls {
            max_steps: 50,
            ..FlowControls::default()
        };
        let traj = evolve(&circle(64, 1.0), &controls).unwrap();
        assert_eq!(traj.stopped_reason, StopReason::StepLimit);
        assert_eq!(traj.steps(), 50);
    }
}
