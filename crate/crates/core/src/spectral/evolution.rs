use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{graphical_rescaled_step, GraphicalState};
use crate::scalar::Real;

use super::modes::{cutoff, mode_split, ModeSplit};
use super::quadrature::GaussianQuadrature;

/// Mode coefficients of the cut-off profile along a run, with rates.
#[derive(Debug, Clone, Serialize)]
pub struct ModeEvolution<S> {
    pub rho: S,
    pub tau: Vec<S>,
    pub splits: Vec<ModeSplit<S>>,
    /// `(d c_{-1}/dτ) / c_{-1}` per sample.
    pub rate_minus1: Vec<S>,
    /// `d c_0 / dτ` per sample.
    pub dc_0: Vec<S>,
    /// Least-squares slope of `ln |c_{-1}|`.
    pub growth_minus1: Option<S>,
    pub max_drift_0: S,
    /// Least-squares slope of `ln tail_norm`.
    pub tail_log_slope: Option<S>,
    /// The graphical regime was lost before the requested end.
    pub truncated: bool,
}

/// Derivative of the parabola through three neighbouring samples, so the
/// ends stay second order too.
fn derivative<S: Real>(t: &[S], v: &[S]) -> Vec<S> {
    let m = t.len();
    if m < 3 {
        let d = if m == 2 { (v[1] - v[0]) / (t[1] - t[0]) } else { S::zero() };
        return vec![d; m];
    }
    (0..m)
        .map(|j| {
            let c = j.clamp(1, m - 2);
            let (a, b, e) = (c - 1, c, c + 1);
            let x = t[j];
            let la = ((x - t[b]) + (x - t[e])) / ((t[a] - t[b]) * (t[a] - t[e]));
            let lb = ((x - t[a]) + (x - t[e])) / ((t[b] - t[a]) * (t[b] - t[e]));
            let le = ((x - t[a]) + (x - t[b])) / ((t[e] - t[a]) * (t[e] - t[b]));
            la * v[a] + lb * v[b] + le * v[e]
        })
        .collect()
}

fn log_slope<S: Real>(t: &[S], v: &[S]) -> Option<S> {
    let pts: Vec<(S, S)> = t
        .iter()
        .zip(v)
        .filter(|(_, &y)| y.abs() > S::min_positive_value())
        .map(|(&x, &y)| (x, y.abs().ln()))
        .collect();
    if pts.len() < 2 || pts.len() < t.len() {
        return None;
    }
    let n = S::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<S>() / n;
    let my = pts.iter().map(|p| p.1).sum::<S>() / n;
    let sxx: S = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: S = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > S::zero()).then(|| sxy / sxx)
}

/// Mode series for profiles already sampled on the quadrature nodes; the
/// cut-off `η(x/ρ)` is applied here.
pub fn mode_evolution<S: Real>(
    quad: &GaussianQuadrature<S>,
    tau: &[S],
    samples: &[Vec<S>],
    rho: S,
) -> Result<ModeEvolution<S>> {
    if tau.len() != samples.len() || tau.is_empty() {
        return Err(Error::InvalidParameter("one sample per tau required".into()));
    }
    if !(rho > S::zero()) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must be positive")));
    }
    let eta: Vec<S> = quad.nodes.iter().map(|&x| cutoff(x / rho)).collect();
    let splits = samples
        .iter()
        .map(|u| {
            let hat: Vec<S> = u.iter().zip(&eta).map(|(&a, &b)| a * b).collect();
            mode_split(quad, &hat)
        })
        .collect::<Result<Vec<_>>>()?;
    let cm: Vec<S> = splits.iter().map(|s| s.c_minus1).collect();
    let c0: Vec<S> = splits.iter().map(|s| s.c_0).collect();
    let tail: Vec<S> = splits.iter().map(|s| s.tail_norm).collect();
    let dcm = derivative(tau, &cm);
    let dc_0 = derivative(tau, &c0);
    Ok(ModeEvolution {
        rho,
        tau: tau.to_vec(),
        rate_minus1: dcm.iter().zip(&cm).map(|(&d, &c)| d / c).collect(),
        max_drift_0: dc_0.iter().fold(S::zero(), |a, &b| a.max(b.abs())),
        dc_0,
        growth_minus1: log_slope(tau, &cm),
        tail_log_slope: log_slope(tau, &tail),
        splits,
        truncated: false,
    })
}

/// [`mode_evolution`] for a profile given as a function of `(x, τ)`.
pub fn mode_evolution_fn<S: Real>(
    quad: &GaussianQuadrature<S>,
    tau: &[S],
    u: impl Fn(S, S) -> S,
    rho: S,
) -> Result<ModeEvolution<S>> {
    let samples: Vec<Vec<S>> = tau.iter().map(|&t| quad.sample(|x| u(x, t))).collect();
    mode_evolution(quad, tau, &samples, rho)
}

/// Component `k` of a graphical state (0 is y) on the quadrature nodes,
/// linear in between grid points. Nodes off the grid must lie where the
/// cut-off vanishes.
pub fn sample_graphical<S: Real>(
    quad: &GaussianQuadrature<S>,
    state: &GraphicalState<S>,
    k: usize,
    rho: S,
) -> Result<Vec<S>> {
    let w = if k == 0 {
        &state.y
    } else {
        state
            .z
            .get(k - 1)
            .ok_or_else(|| Error::InvalidParameter(format!("no component {k}")))?
    };
    let x = &state.x;
    let (x0, x1) = (x[0], x[x.len() - 1]);
    let h = state.spacing();
    quad.nodes
        .iter()
        .map(|&xn| {
            if xn < x0 || xn > x1 {
                if cutoff(xn / rho) > S::zero() {
                    return Err(Error::Domain(format!("cut-off support reaches x = {xn} beyond the grid")));
                }
                return Ok(S::zero());
            }
            let pos = (xn - x0) / h;
            let i = (pos.floor().to_f64_lossy() as usize).min(x.len() - 2);
            let a = pos - S::from_usize_lossy(i);
            Ok(w[i] + a * (w[i + 1] - w[i]))
        })
        .collect()
}

/// Steps the graphical rescaled flow and records the mode split of
/// component `k` every `record_every` steps. `boundary(τ)` supplies the
/// Dirichlet values at both ends. Loss of graphicality ends the run with
/// `truncated` set.
#[allow(clippy::too_many_arguments)]
pub fn graphical_mode_run<S: Real>(
    quad: &GaussianQuadrature<S>,
    initial: &GraphicalState<S>,
    dtau: S,
    steps: usize,
    record_every: usize,
    k: usize,
    rho: S,
    boundary: impl Fn(S) -> (Vec<S>, Vec<S>),
) -> Result<ModeEvolution<S>> {
    let record_every = record_every.max(1);
    let mut state = initial.clone();
    let mut tau = S::zero();
    let mut taus = vec![tau];
    let mut samples = vec![sample_graphical(quad, &state, k, rho)?];
    let mut truncated = false;
    for step in 1..=steps {
        let (l, r) = boundary(tau + dtau);
        match graphical_rescaled_step(&state, dtau, &l, &r) {
            Ok(s) => state = s,
            Err(e @ Error::GraphicalRegimeLost { .. }) => {
                warn!("graphical run stops at tau = {tau}: {e}");
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
        tau = tau + dtau;
        if step % record_every == 0 {
            taus.push(tau);
            samples.push(sample_graphical(quad, &state, k, rho)?);
        }
    }
    let mut out = mode_evolution(quad, &taus, &samples, rho)?;
    out.truncated = truncated;
    Ok(out)
}
