use serde::Serialize;

use crate::error::Result;
use crate::scalar::Real;

use super::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeIVerdict {
    TypeIBounded,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeIReport<S> {
    /// `(t, sup k^2 (T - t))` per frame.
    pub ratio_series: Vec<(S, S)>,
    pub sup_ratio: S,
    /// Ratio at the last certifiable frame.
    pub terminal_ratio: S,
    pub verdict: TypeIVerdict,
}

/// Blow-up rate `sup_u k^2 (T - t)` on every frame with `t < T - 10 dt`.
/// The verdict is bounded when the maximum over the last quartile of the
/// series is at most twice its median.
pub fn type_i_report<S: Real>(traj: &Trajectory<S>) -> Result<TypeIReport<S>> {
    let t_ext = traj.t_estimate()?;
    let certified = traj.last_certifiable();
    let mut series = Vec::new();
    let mut terminal = None;
    for (i, f) in traj.frames.iter().enumerate() {
        if f.t >= t_ext - S::lit(10.0) * f.dt {
            continue;
        }
        let r = f.max_kappa * f.max_kappa * (t_ext - f.t);
        series.push((f.t, r));
        if i <= certified {
            terminal = Some(r);
        }
    }
    let values: Vec<S> = series.iter().map(|&(_, r)| r).collect();
    let sup_ratio = values.iter().copied().fold(S::zero(), |a, b| a.max(b));
    let verdict = if values.is_empty() {
        TypeIVerdict::Inconclusive
    } else {
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = sorted[sorted.len() / 2];
        let tail = &values[values.len() - (values.len() / 4).max(1)..];
        let tail_max = tail.iter().copied().fold(S::zero(), |a, b| a.max(b));
        if tail_max <= S::two() * median {
            TypeIVerdict::TypeIBounded
        } else {
            TypeIVerdict::Inconclusive
        }
    };
    Ok(TypeIReport {
        terminal_ratio: terminal.unwrap_or(S::nan()),
        ratio_series: series,
        sup_ratio,
        verdict,
    })
}
