use serde::{Deserialize, Serialize};

use crate::curve::{ops::curvature_into, resample_equal_arclength, Curve};
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

use super::step::{euler, EXPLICIT_CEILING};
use super::trajectory::{Frame, Trajectory};

/// Huisken-rescaled curve `Γ = (γ - x0) / sqrt(2(T - t))` at `τ = -½ ln(T - t)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct RescaledState<S> {
    pub tau: S,
    pub curve: Curve<S>,
    /// Unrescaled time, when the state came from a trajectory.
    pub source_t: Option<S>,
}

impl<S: Real> RescaledState<S> {
    pub fn from_curve(curve: &Curve<S>, t: S, t_ext: S, center: &[S]) -> Result<Self> {
        let gap = t_ext - t;
        if !(gap > S::zero()) {
            return Err(Error::Domain(format!("t = {t} is not before T = {t_ext}")));
        }
        let factor = S::one() / (S::two() * gap).sqrt();
        let dim = curve.dim();
        let coords = curve
            .coords()
            .iter()
            .enumerate()
            .map(|(i, &c)| (c - center[i % dim]) * factor)
            .collect();
        Ok(Self {
            tau: -S::half() * gap.ln(),
            curve: Curve::from_raw(dim, coords),
            source_t: Some(t),
        })
    }
}

/// Rescales about the origin.
pub fn rescale<S: Real>(traj: &Trajectory<S>, t: S) -> Result<RescaledState<S>> {
    let origin = vec![S::zero(); traj.frames[0].curve.dim()];
    rescale_about(traj, t, &origin)
}

/// Rescales about `center`, interpolating linearly per vertex between the
/// two frames that bracket `t`.
pub fn rescale_about<S: Real>(traj: &Trajectory<S>, t: S, center: &[S]) -> Result<RescaledState<S>> {
    let t_ext = traj.t_estimate()?;
    if t >= t_ext {
        return Err(Error::Domain(format!("t = {t} is not before T = {t_ext}")));
    }
    let curve = curve_at(&traj.frames, t)?;
    RescaledState::from_curve(&curve, t, t_ext, center)
}

pub(crate) fn curve_at<S: Real>(frames: &[Frame<S>], t: S) -> Result<Curve<S>> {
    let first = frames.first().ok_or_else(|| Error::Domain("empty trajectory".into()))?;
    let last = frames.last().unwrap();
    if t < first.t || t > last.t {
        return Err(Error::Domain(format!(
            "t = {t} outside the recorded range [{}, {}]",
            first.t, last.t
        )));
    }
    let j = frames.partition_point(|f| f.t <= t);
    if j == 0 || frames[j - 1].t == t {
        return Ok(frames[j.saturating_sub(1)].curve.clone());
    }
    let (a, b) = (&frames[j - 1], &frames[j]);
    let w = (t - a.t) / (b.t - a.t);
    let coords = a
        .curve
        .coords()
        .iter()
        .zip(b.curve.coords())
        .map(|(&p, &q)| p + w * (q - p))
        .collect();
    Ok(Curve::from_raw(a.curve.dim(), coords))
}

/// Every frame strictly before `T`, rescaled about `center`.
pub fn rescaled_frames<S: Real>(traj: &Trajectory<S>, center: &[S], upto: usize) -> Result<Vec<RescaledState<S>>> {
    let t_ext = traj.t_estimate()?;
    traj.frames[..=upto.min(traj.frames.len() - 1)]
        .iter()
        .filter(|f| f.t < t_ext)
        .map(|f| RescaledState::from_curve(&f.curve, f.t, t_ext, center))
        .collect()
}

/// One explicit step of `Γ_τ = Γ_σσ + Γ`.
pub fn step_rescaled<S: Real>(curve: &Curve<S>, dtau: S) -> Result<Curve<S>> {
    let edges = curve.edge_lengths();
    let h = edges.iter().copied().fold(S::infinity(), |a, b| a.min(b));
    let ceiling = S::lit(EXPLICIT_CEILING) * h * h;
    if dtau > ceiling {
        return Err(Error::StepTooLarge {
            dt: dtau.to_f64_lossy(),
            ceiling: ceiling.to_f64_lossy(),
        });
    }
    let mut v = vec![S::zero(); curve.coords().len()];
    curvature_into(curve, &edges, &mut v);
    for (vi, &c) in v.iter_mut().zip(curve.coords()) {
        *vi = *vi + c;
    }
    Ok(euler(curve, &v, dtau))
}

/// Integrates the rescaled flow over `tau_span` with `dτ = cfl h_min^2`,
/// resampling every `resample_every` steps and storing a state every
/// `record_every` steps.
pub fn evolve_rescaled<S: Real>(
    initial: &Curve<S>,
    tau0: S,
    tau_span: S,
    cfl: S,
    resample_every: usize,
    record_every: usize,
) -> Result<Vec<RescaledState<S>>> {
    let n = initial.len();
    let mut curve = resample_equal_arclength(initial, n)?;
    let mut tau = tau0;
    let end = tau0 + tau_span;
    let mut out = vec![RescaledState {
        tau,
        curve: curve.clone(),
        source_t: None,
    }];
    let mut step = 0usize;
    while tau < end {
        let h = curve.min_spacing();
        let dtau = (cfl * h * h).min(end - tau);
        curve = step_rescaled(&curve, dtau)?;
        tau = tau + dtau;
        step += 1;
        if step.is_multiple_of(resample_every.max(1)) {
            curve = resample_equal_arclength(&curve, n)?;
        }
        if step.is_multiple_of(record_every.max(1)) || tau >= end {
            out.push(RescaledState {
                tau,
                curve: curve.clone(),
                source_t: None,
            });
        }
    }
    Ok(out)
}

/// `∫ e^{-|Γ|²/2} |Γ_σσ + Γ^⊥|² dσ` by the vertex trapezoid rule, with
/// `Γ^⊥ = Γ - (Γ·Γ_σ) Γ_σ` from the centred-chord unit tangent.
pub fn huisken_functional<S: Real>(curve: &Curve<S>) -> S {
    weighted_sum(curve, true)
}

/// Gaussian-weighted length `∫ e^{-|Γ|²/2} dσ`; its τ-derivative is minus
/// [`huisken_functional`].
pub fn gaussian_length<S: Real>(curve: &Curve<S>) -> S {
    weighted_sum(curve, false)
}

fn weighted_sum<S: Real>(curve: &Curve<S>, dissipation: bool) -> S {
    let n = curve.len();
    let dim = curve.dim();
    let edges = curve.edge_lengths();
    let mut kappa = vec![S::zero(); curve.coords().len()];
    if dissipation {
        curvature_into(curve, &edges, &mut kappa);
    }
    let mut tangent = vec![S::zero(); dim];
    let mut total = S::zero();
    for i in 0..n {
        let p = curve.point(i);
        let ds = (edges[i] + edges[curve.prev(i)]) * S::half();
        let weight = (-dot(p, p) * S::half()).exp();
        if !dissipation {
            total = total + weight * ds;
            continue;
        }
        let a = curve.point(curve.prev(i));
        let b = curve.point(curve.next(i));
        for k in 0..dim {
            tangent[k] = b[k] - a[k];
        }
        let tn = dot(&tangent, &tangent).sqrt();
        tangent.iter_mut().for_each(|x| *x = *x / tn);
        let along = dot(p, &tangent);
        let mut sq = S::zero();
        for k in 0..dim {
            let r = kappa[i * dim + k] + p[k] - along * tangent[k];
            sq = sq + r * r;
        }
        total = total + weight * sq * ds;
    }
    total
}
