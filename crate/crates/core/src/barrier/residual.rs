use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::field::BarrierField;

/// Space-time sampling: x-nodes at integer multiples of `h`, time levels
/// `t_start + n k` up to `t_end`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpaceTimeGrid<S> {
    pub h: S,
    pub k: S,
    pub t_start: S,
    pub t_end: S,
}

impl<S: Real> SpaceTimeGrid<S> {
    pub fn new(h: S, k: S, t_start: S, t_end: S) -> Result<Self> {
        if !(h > S::zero() && k > S::zero() && t_end > t_start) {
            return Err(Error::InvalidParameter(format!(
                "grid needs h, k > 0 and t_end > t_start (h = {h}, k = {k}, [{t_start}, {t_end}])"
            )));
        }
        Ok(Self { h, k, t_start, t_end })
    }

    /// `nx` cells across the initial interval and `nt` time steps from the
    /// first tracked time to `t_end`.
    pub fn spanning(field: &BarrierField<S>, nx: usize, nt: usize, t_end: S) -> Result<Self> {
        let t0 = field.track.t_first();
        let (lo, hi) = field.track.bounds_at(t0)?;
        Self::new(
            (hi - lo) / S::from_usize_lossy(nx.max(1)),
            (t_end - t0) / S::from_usize_lossy(nt.max(1)),
            t0,
            t_end,
        )
    }

    /// `(h/2, k/4)` on the same time window.
    pub fn refined(&self) -> Self {
        Self {
            h: self.h * S::half(),
            k: self.k / S::lit(4.0),
            ..*self
        }
    }

    pub fn tolerance(&self) -> S {
        S::lit(10.0) * (self.h * self.h + self.k)
    }

    fn levels(&self) -> usize {
        let m = ((self.t_end - self.t_start) / self.k).to_f64_lossy();
        // guard against the last level landing a rounding error past t_end
        (m + 1e-9).floor() as usize
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SubsolutionReport<S> {
    /// Positive part of the largest `φ_t - φ_xx` over points with `|x| > 2h`.
    pub max_residual_offcenter: S,
    /// Signed largest value of the same residual.
    pub raw_max: S,
    pub onesided_ok_at_zero: bool,
    /// Largest deviation of the one-sided difference quotients at 0 from
    /// the exact one-sided second derivatives.
    pub worst_onesided_error: S,
    /// Largest `φ_t(0) - max(φ_xx(0⁺), φ_xx(0⁻))`, exact `φ_t(0)` against the
    /// one-sided quotients.
    pub worst_viscosity: S,
    pub tolerance: S,
    pub points: usize,
}

/// Finite-difference check of `φ_t - φ_xx <= 0`.
///
/// Away from the kink the residual uses a forward difference in t and a
/// centred one in x, only where the whole stencil stays inside the moving
/// interval. At `x = 0` the quotients `2(φ(±h) - φ(0))/h²` are compared with
/// the exact one-sided second derivatives (within `5h`) and combined with
/// the closed-form `φ_t(0)`. A forward difference there is useless close to
/// `T`, where `k` is no longer small against `T - t`.
pub fn subsolution_residual<S: Real>(field: &BarrierField<S>, grid: &SpaceTimeGrid<S>) -> Result<SubsolutionReport<S>> {
    let (h, k) = (grid.h, grid.k);
    let tol = grid.tolerance();
    let two = S::two();
    let mut raw_max = S::neg_infinity();
    let mut worst_onesided = S::zero();
    let mut worst_visc = S::neg_infinity();
    let mut points = 0;
    for n in 0..grid.levels() {
        let t = grid.t_start + S::from_usize_lossy(n) * k;
        let t1 = (t + k).min(grid.t_end);
        let k = t1 - t;
        let (lo, hi) = field.track.bounds_at(t)?;
        let (lo1, hi1) = field.track.bounds_at(t1)?;
        let (a, b) = (lo.max(lo1), hi.min(hi1));

        let i_lo = (a / h).ceil().to_f64_lossy() as i64;
        let i_hi = (b / h).floor().to_f64_lossy() as i64;
        for i in i_lo..=i_hi {
            if i.abs() <= 2 {
                continue;
            }
            let x = S::lit(i as f64) * h;
            if x - h <= lo || x + h >= hi || x <= a || x >= b {
                continue;
            }
            let c = field.eval(x, t)?;
            let phi_t = (field.eval(x, t1)? - c) / k;
            let phi_xx = (field.eval(x + h, t)? - two * c + field.eval(x - h, t)?) / (h * h);
            raw_max = raw_max.max(phi_t - phi_xx);
            points += 1;
        }

        if h < hi && -h > lo {
            let c = field.eval(S::zero(), t)?;
            let plus = two * (field.eval(h, t)? - c) / (h * h);
            let minus = two * (field.eval(-h, t)? - c) / (h * h);
            let (ex_plus, ex_minus) = field.onesided_second_derivatives(t)?;
            worst_onesided = worst_onesided.max((plus - ex_plus).abs()).max((minus - ex_minus).abs());
            worst_visc = worst_visc.max(field.phi_t_at_zero(t)? - plus.max(minus));
        }
    }
    if points == 0 {
        return Err(Error::InvalidParameter("grid has no interior points off the centre".into()));
    }
    Ok(SubsolutionReport {
        max_residual_offcenter: raw_max.max(S::zero()),
        raw_max,
        onesided_ok_at_zero: worst_onesided <= S::lit(5.0) * h && worst_visc <= tol,
        worst_onesided_error: worst_onesided,
        worst_viscosity: worst_visc,
        tolerance: tol,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::track::ExtremaTrack;

    fn track(t_ext: f64, t_end: f64, nodes: usize, skew: f64) -> ExtremaTrack<f64> {
        let t: Vec<f64> = (0..nodes).map(|i| t_end * i as f64 / (nodes - 1) as f64).collect();
        let hi: Vec<f64> = t.iter().map(|&s| (2.0 * (t_ext - s)).sqrt()).collect();
        let lo = hi.iter().map(|v| -skew * v).collect();
        ExtremaTrack::from_samples(t, hi, lo).unwrap()
    }

    #[test]
    fn circle_residual_and_refinement() {
        let field = BarrierField::new(track(0.5, 0.45, 4001, 1.0), 0.5, 1.0).unwrap();
        let grid = SpaceTimeGrid::spanning(&field, 200, 200, 0.45).unwrap();
        let coarse = subsolution_residual(&field, &grid).unwrap();
        let fine = subsolution_residual(&field, &grid.refined()).unwrap();
        assert!(coarse.max_residual_offcenter <= 1e-2);
        assert!(fine.max_residual_offcenter <= coarse.max_residual_offcenter / 2.0 + 1e-12);
        assert!(coarse.onesided_ok_at_zero && fine.onesided_ok_at_zero);
    }

    #[test]
    fn onesided_values_at_start() {
        let field = BarrierField::new(track(0.5, 0.45, 451, 1.0), 0.5, 0.1).unwrap();
        let (p, m) = field.onesided_second_derivatives(0.0).unwrap();
        let want = -(std::f64::consts::PI.powi(2) / 4.0) * 0.1 * 0.5f64.sqrt();
        assert!((p - want).abs() < 1e-12);
        assert!((p - m).abs() < 1e-8);
        let h = 1e-2;
        let c = field.eval(0.0, 0.0).unwrap();
        let num = 2.0 * (field.eval(h, 0.0).unwrap() - c) / (h * h);
        assert!((num - want).abs() < 5.0 * h);
    }

    #[test]
    fn asymmetric_track_viscosity() {
        let field = BarrierField::new(track(0.5, 0.4, 401, 0.6), 0.5, 1.0).unwrap();
        let grid = SpaceTimeGrid::spanning(&field, 200, 200, 0.4).unwrap();
        let rep = subsolution_residual(&field, &grid).unwrap();
        assert!(rep.onesided_ok_at_zero);
        let (p, m) = field.onesided_second_derivatives(0.1).unwrap();
        assert!(m < p);
        assert!(field.phi_t_at_zero(0.1).unwrap() <= p.max(m));
    }
}
