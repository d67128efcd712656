use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Curve, PeriodicSpline, MIN_VERTICES};

/// Curves shorter than this are refused by the resampler.
pub const MIN_TOTAL_LENGTH: f64 = 1e-10;

/// How new vertices are placed along the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Periodic cubic spline through the input; spacing is uniform in the
    /// spline's arc length. Fourth-order accurate on smooth curves.
    #[default]
    Cubic,
    /// Points on the input polyline; spacing uniform in polyline length.
    /// Reproduces the input exactly when it is already uniform.
    Linear,
}

/// Redistributes `n_out` vertices at equal arc length along the curve,
/// keeping vertex `0` in place.
pub fn resample_equal_arclength<S: Real>(curve: &Curve<S>, n_out: usize) -> Result<Curve<S>> {
    resample_with(curve, n_out, Interpolation::Cubic)
}

pub fn resample_with<S: Real>(
    curve: &Curve<S>,
    n_out: usize,
    interpolation: Interpolation,
) -> Result<Curve<S>> {
    if n_out < MIN_VERTICES {
        return Err(Error::InvalidParameter(format!(
            "n_out = {n_out}, need at least {MIN_VERTICES}"
        )));
    }
    let length = curve.length();
    if length.to_f64_lossy() < MIN_TOTAL_LENGTH {
        return Err(Error::DegenerateCurve {
            length: length.to_f64_lossy(),
            min: MIN_TOTAL_LENGTH,
        });
    }
    let coords = match interpolation {
        Interpolation::Cubic => cubic(curve, n_out)?,
        Interpolation::Linear => linear(curve, n_out),
    };
    Ok(Curve::from_raw(curve.dim(), coords))
}

fn cubic<S: Real>(curve: &Curve<S>, n_out: usize) -> Result<Vec<S>> {
    let dim = curve.dim();
    let spline = PeriodicSpline::through(curve)?;
    let total = spline.total_arc_length();
    let step = total / S::from_usize_lossy(n_out);
    let mut coords = vec![S::zero(); n_out * dim];
    coords[..dim].copy_from_slice(curve.point(0));
    let mut hint = 0;
    for k in 1..n_out {
        let (seg, s) = spline.locate(step * S::from_usize_lossy(k), hint);
        hint = seg;
        spline.eval_into(seg, s, &mut coords[k * dim..(k + 1) * dim]);
    }
    Ok(coords)
}

fn linear<S: Real>(curve: &Curve<S>, n_out: usize) -> Vec<S> {
    let dim = curve.dim();
    let n = curve.len();
    let edges = curve.edge_lengths();
    let total: S = edges.iter().copied().sum();
    let step = total / S::from_usize_lossy(n_out);
    let mut coords = Vec::with_capacity(n_out * dim);
    coords.extend_from_slice(curve.point(0));
    let mut seg = 0;
    let mut seg_start = S::zero();
    for k in 1..n_out {
        let target = step * S::from_usize_lossy(k);
        while seg + 1 < n && seg_start + edges[seg] <= target {
            seg_start = seg_start + edges[seg];
            seg += 1;
        }
        let t = ((target - seg_start) / edges[seg]).max(S::zero()).min(S::one());
        let a = curve.point(seg);
        let b = curve.point(curve.next(seg));
        coords.extend(a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)));
    }
    coords
}
