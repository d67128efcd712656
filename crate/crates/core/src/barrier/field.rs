use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::track::ExtremaTrack;

fn integrand<S: Real>(x_max: S, x_min: S, gap: S) -> S {
    let quarter_pi2 = S::PI() * S::PI() / S::lit(4.0);
    let inv = (S::one() / (x_max * x_max)).max(S::one() / (x_min * x_min));
    quarter_pi2 * inv - S::one() / (S::two() * gap)
}

/// Cumulative trapezoid of
/// `π²/4 · max(1/x_max², 1/x_min²) - 1/(2(T - τ))` from the first track
/// time, one value per track node.
pub fn f_of_t<S: Real>(track: &ExtremaTrack<S>, t_ext: S) -> Result<Vec<S>> {
    if !(t_ext > track.t_last()) {
        return Err(Error::Domain(format!(
            "track reaches t = {} but T = {t_ext}",
            track.t_last()
        )));
    }
    let g: Vec<S> = (0..track.t.len())
        .map(|j| integrand(track.x_max[j], track.x_min[j], t_ext - track.t[j]))
        .collect();
    let mut f = Vec::with_capacity(g.len());
    f.push(S::zero());
    for j in 1..g.len() {
        let dt = track.t[j] - track.t[j - 1];
        f.push(f[j - 1] + dt * (g[j] + g[j - 1]) * S::half());
    }
    Ok(f)
}

/// `φ(x, t) = ε e^{-f(t)} sqrt(T - t) cos θ(x, t)` on the moving interval
/// `[x_min(t), x_max(t)]`.
#[derive(Debug, Clone, Serialize)]
pub struct BarrierField<S> {
    pub track: ExtremaTrack<S>,
    pub t_ext: S,
    pub epsilon: S,
    pub f_values: Vec<S>,
}

impl<S: Real> BarrierField<S> {
    pub fn new(track: ExtremaTrack<S>, t_ext: S, epsilon: S) -> Result<Self> {
        if !(epsilon > S::zero()) {
            return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
        }
        let f_values = f_of_t(&track, t_ext)?;
        Ok(Self {
            track,
            t_ext,
            epsilon,
            f_values,
        })
    }

    pub fn with_epsilon(&self, epsilon: S) -> Self {
        Self {
            epsilon,
            ..self.clone()
        }
    }

    /// `f(t)`, trapezoid from the last node below `t` with the integrand
    /// evaluated at interpolated extrema.
    pub fn f_at(&self, t: S) -> Result<S> {
        let (j, w) = self.track.locate(t)?;
        if w == S::zero() {
            return Ok(self.f_values[j]);
        }
        let tr = &self.track;
        let (lo, hi) = self.track.bounds_at(t)?;
        let g0 = integrand(tr.x_max[j], tr.x_min[j], self.t_ext - tr.t[j]);
        let g1 = integrand(hi, lo, self.t_ext - t);
        Ok(self.f_values[j] + (t - tr.t[j]) * (g0 + g1) * S::half())
    }

    /// `ε e^{-f(t)} sqrt(T - t)`, the value at `x = 0`.
    pub fn amplitude(&self, t: S) -> Result<S> {
        Ok(self.epsilon * (-self.f_at(t)?).exp() * (self.t_ext - t).sqrt())
    }

    /// `θ(x, t)`: `(π/2) x / x_max` for `x >= 0`, `(π/2) x / (-x_min)` for `x <= 0`.
    pub fn theta(&self, x: S, t: S) -> Result<S> {
        let (lo, hi) = self.track.bounds_at(t)?;
        let half_pi = S::FRAC_PI_2();
        Ok(if x >= S::zero() { half_pi * x / hi } else { half_pi * x / (-lo) })
    }

    /// Checked evaluation.
    pub fn eval(&self, x: S, t: S) -> Result<S> {
        let (lo, hi) = self.track.bounds_at(t)?;
        if x < lo || x > hi {
            return Err(Error::Domain(format!("x = {x} outside [{lo}, {hi}] at t = {t}")));
        }
        Ok(self.amplitude(t)? * cos_theta(x, lo, hi))
    }

    /// Evaluation that treats points outside the moving interval as zero.
    pub fn eval_or_zero(&self, x: S, t: S) -> Result<S> {
        let (lo, hi) = self.track.bounds_at(t)?;
        if x <= lo || x >= hi {
            return Ok(S::zero());
        }
        Ok(self.amplitude(t)? * cos_theta(x, lo, hi))
    }

    /// The exact one-sided `φ_xx` at `0⁺` and `0⁻`.
    pub fn onesided_second_derivatives(&self, t: S) -> Result<(S, S)> {
        let (lo, hi) = self.track.bounds_at(t)?;
        let a = self.amplitude(t)?;
        let q = S::PI() * S::PI() / S::lit(4.0);
        Ok((-q / (hi * hi) * a, -q / (lo * lo) * a))
    }

    /// `φ_t(0, t) = -ε e^{-f} sqrt(T - t) · π²/4 · max(1/x_max², 1/x_min²)`.
    pub fn phi_t_at_zero(&self, t: S) -> Result<S> {
        let (lo, hi) = self.track.bounds_at(t)?;
        let q = S::PI() * S::PI() / S::lit(4.0);
        let inv = (S::one() / (hi * hi)).max(S::one() / (lo * lo));
        Ok(-self.amplitude(t)? * q * inv)
    }
}

/// `cos θ` written as a sine of the distance to the nearer end, so it is
/// exactly zero at both ends.
fn cos_theta<S: Real>(x: S, lo: S, hi: S) -> S {
    let half_pi = S::FRAC_PI_2();
    if x >= S::zero() {
        (half_pi * (hi - x) / hi).sin()
    } else {
        (half_pi * (x - lo) / (-lo)).sin()
    }
}

/// Checked barrier evaluation.
pub fn barrier_eval<S: Real>(field: &BarrierField<S>, x: S, t: S) -> Result<S> {
    field.eval(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn circle_track(t_ext: f64, t_end: f64, nodes: usize) -> ExtremaTrack<f64> {
        let t: Vec<f64> = (0..nodes).map(|i| t_end * i as f64 / (nodes - 1) as f64).collect();
        let hi: Vec<f64> = t.iter().map(|&s| (2.0 * (t_ext - s)).sqrt()).collect();
        let lo = hi.iter().map(|v| -v).collect();
        ExtremaTrack::from_samples(t, hi, lo).unwrap()
    }

    #[test]
    fn f_closed_forms() {
        let t_ext = 0.5;
        let tr = circle_track(t_ext, 0.45, 20001);
        let f = f_of_t(&tr, t_ext).unwrap();
        assert_eq!(f[0], 0.0);
        let c = std::f64::consts::PI.powi(2) / 8.0 - 0.5;
        for j in (1000..20001).step_by(1000) {
            let want = c * (t_ext / (t_ext - tr.t[j])).ln();
            assert!(((f[j] - want) / want).abs() < 1e-4);
        }

        // constant track sqrt(2T) on [0, T/2]
        let t_ext = 0.8f64;
        let t: Vec<f64> = (0..4001).map(|i| 0.5 * t_ext * i as f64 / 4000.0).collect();
        let hi = vec![(2.0 * t_ext).sqrt(); t.len()];
        let lo = hi.iter().map(|v| -v).collect();
        let tr = ExtremaTrack::from_samples(t, hi, lo).unwrap();
        let f = f_of_t(&tr, t_ext).unwrap();
        for (j, &s) in tr.t.iter().enumerate() {
            let want = std::f64::consts::PI.powi(2) * s / (8.0 * t_ext) - 0.5 * (t_ext / (t_ext - s)).ln();
            assert!((f[j] - want).abs() < 1e-6);
        }
        assert!(f_of_t(&tr, 0.4).is_err());
    }

    #[test]
    fn pointwise_values() {
        let field = BarrierField::new(circle_track(0.5, 0.45, 101), 0.5, 0.1).unwrap();
        assert!((field.eval(0.0, 0.0).unwrap() - 0.1 * 0.5f64.sqrt()).abs() < 1e-10);
        assert_eq!(field.eval(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(field.eval(-1.0, 0.0).unwrap(), 0.0);
        let t = 0.2;
        let (lo, hi) = field.track.bounds_at(t).unwrap();
        assert_eq!(field.eval(hi, t).unwrap(), 0.0);
        assert_eq!(field.eval(lo, t).unwrap(), 0.0);
        assert!((field.eval(0.0, t).unwrap() - field.amplitude(t).unwrap()).abs() < 1e-15);
        assert!(matches!(field.eval(1.01, 0.0), Err(Error::Domain(_))));
        assert!(field.eval(0.0, 0.46).is_err());
        for k in 1..10 {
            let x = hi * k as f64 / 10.0;
            assert!(field.eval(x, t).unwrap() > 0.0 && field.eval(-x, t).unwrap() > 0.0);
        }
    }

    #[test]
    fn f_continuity() {
        let field = BarrierField::new(circle_track(0.5, 0.45, 451), 0.5, 1.0).unwrap();
        let k = 1e-3;
        for i in 0..400 {
            let t = 0.001 * i as f64 + 0.0003;
            let g = |s: f64| integrand(-(2.0 * (0.5 - s)).sqrt(), (2.0 * (0.5 - s)).sqrt(), 0.5 - s);
            let bound = k * g(t).max(g(t + k));
            assert!((field.f_at(t + k).unwrap() - field.f_at(t).unwrap()).abs() <= bound * (1.0 + 1e-6));
        }
    }
}
