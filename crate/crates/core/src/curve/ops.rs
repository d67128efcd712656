use crate::error::{Error, Result};
use crate::scalar::Real;

use super::Curve;

/// Largest max/min edge ratio accepted by [`curvature_vector`].
pub const SPACING_RATIO_LIMIT: f64 = 1.1;

/// Per-vertex `γ_ss` by the centred three-point second difference in arc
/// length. Requires near-uniform spacing.
pub fn curvature_vector<S: Real>(curve: &Curve<S>) -> Result<Vec<Vec<S>>> {
    let ratio = curve.spacing_ratio();
    if ratio > S::lit(SPACING_RATIO_LIMIT) {
        return Err(Error::NonUniformSpacing {
            ratio: ratio.to_f64_lossy(),
            limit: SPACING_RATIO_LIMIT,
        });
    }
    let mut flat = vec![S::zero(); curve.coords().len()];
    curvature_into(curve, &curve.edge_lengths(), &mut flat);
    Ok(flat.chunks_exact(curve.dim()).map(|c| c.to_vec()).collect())
}

/// Unchecked kernel: writes `γ_ss` for every vertex into `out` (flat layout).
pub(crate) fn curvature_into<S: Real>(curve: &Curve<S>, edges: &[S], out: &mut [S]) {
    let n = curve.len();
    let dim = curve.dim();
    let c = curve.coords();
    for i in 0..n {
        let ip = if i + 1 == n { 0 } else { i + 1 };
        let im = if i == 0 { n - 1 } else { i - 1 };
        let hp = edges[i];
        let hm = edges[im];
        let w = S::two() / (hp + hm);
        for k in 0..dim {
            let fwd = (c[ip * dim + k] - c[i * dim + k]) / hp;
            let bwd = (c[i * dim + k] - c[im * dim + k]) / hm;
            out[i * dim + k] = w * (fwd - bwd);
        }
    }
}

/// Drops every coordinate past the first two. The result may not satisfy
/// the immersion invariants (projections can fold or self-overlap).
pub fn project_xy<S: Real>(curve: &Curve<S>) -> Curve<S> {
    let coords = curve.points().flat_map(|p| [p[0], p[1]]).collect();
    Curve::from_raw(2, coords)
}

/// Continuous lift of the angle between `P_xy γ_s` and the positive x-axis.
#[derive(Debug, Clone)]
pub struct TurningAngles<S> {
    /// One lifted angle per vertex.
    pub lift: Vec<S>,
    /// Lift change accumulated over one full loop.
    pub total_change: S,
}

impl<S: Real> TurningAngles<S> {
    pub fn winding(&self) -> i64 {
        (self.total_change / S::TAU()).round().to_i64().unwrap_or(0)
    }
}

pub(crate) fn wrap_angle<S: Real>(a: S) -> S {
    let tau = S::TAU();
    let pi = S::PI();
    let mut w = a % tau;
    if w > pi {
        w = w - tau;
    } else if w <= -pi {
        w = w + tau;
    }
    w
}

/// Angle lift of the projected unit tangent. The tangent at a vertex is the
/// centred chord `p_{i+1} - p_{i-1}` normalised in R^n.
pub fn turning_angle<S: Real>(curve: &Curve<S>) -> Result<TurningAngles<S>> {
    let n = curve.len();
    let floor = S::lit(1e-8);
    let mut raw = Vec::with_capacity(n);
    for i in 0..n {
        let a = curve.point(curve.prev(i));
        let b = curve.point(curve.next(i));
        let norm = crate::scalar::dist(a, b);
        let tx = (b[0] - a[0]) / norm;
        let ty = (b[1] - a[1]) / norm;
        let horizontal = (tx * tx + ty * ty).sqrt();
        if horizontal <= floor {
            return Err(Error::HorizontalSpeedFloor {
                vertex: i,
                speed: horizontal.to_f64_lossy(),
            });
        }
        raw.push(ty.atan2(tx));
    }
    let mut lift = Vec::with_capacity(n);
    lift.push(raw[0]);
    for i in 1..n {
        let prev = lift[i - 1];
        lift.push(prev + wrap_angle(raw[i] - raw[i - 1]));
    }
    let closing = lift[n - 1] + wrap_angle(raw[0] - raw[n - 1]);
    Ok(TurningAngles {
        total_change: closing - lift[0],
        lift,
    })
}

/// Winding number of the xy-polygon traced by `pts` (pairs) about `center`.
pub fn winding_number_about<S: Real>(xy: &[[S; 2]], center: [S; 2]) -> i64 {
    let n = xy.len();
    let mut total = S::zero();
    for i in 0..n {
        let a = xy[i];
        let b = xy[(i + 1) % n];
        let aa = (a[1] - center[1]).atan2(a[0] - center[0]);
        let bb = (b[1] - center[1]).atan2(b[0] - center[0]);
        total = total + wrap_angle(bb - aa);
    }
    (total / S::TAU()).round().to_i64().unwrap_or(0)
}
