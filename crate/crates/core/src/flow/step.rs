use serde::{Deserialize, Serialize};

use crate::curve::{ops::curvature_into, Curve};
use crate::error::{Error, Result};
use crate::linalg::CyclicTridiagonal;
use crate::scalar::Real;

/// Explicit steps must satisfy `dt <= EXPLICIT_CEILING * h_min^2`.
pub const EXPLICIT_CEILING: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Forward Euler `γ + dt γ_ss`.
    #[default]
    Explicit,
    /// Backward Euler in the second-difference operator, frozen edge lengths.
    SemiImplicit,
}

/// One step of `γ_t = γ_ss`.
pub fn step_csf<S: Real>(curve: &Curve<S>, dt: S, scheme: Scheme) -> Result<Curve<S>> {
    if !(dt > S::zero()) {
        return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
    }
    let edges = curve.edge_lengths();
    match scheme {
        Scheme::Explicit => {
            let h = edges.iter().copied().fold(S::infinity(), |a, b| a.min(b));
            let ceiling = S::lit(EXPLICIT_CEILING) * h * h;
            if dt > ceiling {
                return Err(Error::StepTooLarge {
                    dt: dt.to_f64_lossy(),
                    ceiling: ceiling.to_f64_lossy(),
                });
            }
            let mut kappa = vec![S::zero(); curve.coords().len()];
            curvature_into(curve, &edges, &mut kappa);
            Ok(euler(curve, &kappa, dt))
        }
        Scheme::SemiImplicit => semi_implicit(curve, &edges, dt),
    }
}

pub(crate) fn euler<S: Real>(curve: &Curve<S>, velocity: &[S], dt: S) -> Curve<S> {
    let coords = curve
        .coords()
        .iter()
        .zip(velocity)
        .map(|(&x, &v)| x + dt * v)
        .collect();
    Curve::from_raw(curve.dim(), coords)
}

fn semi_implicit<S: Real>(curve: &Curve<S>, edges: &[S], dt: S) -> Result<Curve<S>> {
    let n = curve.len();
    let dim = curve.dim();
    let mut sub = vec![S::zero(); n];
    let mut diag = vec![S::zero(); n];
    let mut sup = vec![S::zero(); n];
    for i in 0..n {
        let hp = edges[i];
        let hm = edges[(i + n - 1) % n];
        let w = S::two() / (hp + hm);
        sub[i] = -dt * w / hm;
        sup[i] = -dt * w / hp;
        diag[i] = S::one() + dt * w * (S::one() / hp + S::one() / hm);
    }
    let solver = CyclicTridiagonal::new(sub, diag, sup, "semi-implicit step")?;
    let mut coords = vec![S::zero(); n * dim];
    let mut rhs = vec![S::zero(); n];
    for k in 0..dim {
        for (i, r) in rhs.iter_mut().enumerate() {
            *r = curve.point(i)[k];
        }
        for (i, v) in solver.solve(&rhs).into_iter().enumerate() {
            coords[i * dim + k] = v;
        }
    }
    Ok(Curve::from_raw(dim, coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::fixtures::*;

    #[test]
    fn circle_one_step() {
        let c = circle(256, 1.0);
        let next = step_csf(&c, 1e-5, Scheme::Explicit).unwrap();
        let want = (1.0f64 - 2e-5).sqrt();
        for p in next.points() {
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - want).abs() < 1e-8);
        }
    }

    #[test]
    fn explicit_ceiling() {
        let c = circle(256, 1.0);
        let h = c.min_spacing();
        assert!(matches!(
            step_csf(&c, 0.5 * h * h, Scheme::Explicit),
            Err(Error::StepTooLarge { .. })
        ));
        // semi-implicit has no ceiling and still shortens
        let big = step_csf(&c, 10.0 * h * h, Scheme::SemiImplicit).unwrap();
        assert!(big.length() < c.length());
    }

    #[test]
    fn ellipse_length_decreases_every_step() {
        let mut e = ellipse(256, 2.0, 1.0);
        let mut last = e.length();
        for _ in 0..1000 {
            e = step_csf(&e, 1e-5, Scheme::Explicit).unwrap();
            let l = e.length();
            assert!(l < last);
            last = l;
        }
    }

    #[test]
    fn semi_implicit_matches_circle_law() {
        let c = circle(256, 1.0);
        let next = step_csf(&c, 1e-5, Scheme::SemiImplicit).unwrap();
        let r = next.point(0)[0].hypot(next.point(0)[1]);
        assert!((r - (1.0f64 - 2e-5).sqrt()).abs() < 1e-8);
    }
}
