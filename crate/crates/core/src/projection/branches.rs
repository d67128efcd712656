use serde::Serialize;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::scalar::Real;

use super::report::projection_report;

/// One side of the projected curve as a graph over x, ascending in x.
#[derive(Debug, Clone, Serialize)]
pub struct Branch<S> {
    pub x: Vec<S>,
    /// `values[k][i]` is coordinate `k + 1` (y, then z components) at `x[i]`.
    pub values: Vec<Vec<S>>,
}

impl<S: Real> Branch<S> {
    /// Linear interpolation of coordinate `k + 1` at `x`, clamped to the ends.
    pub fn at(&self, k: usize, x: S) -> S {
        let xs = &self.x;
        let v = &self.values[k];
        if x <= xs[0] {
            return v[0];
        }
        let last = xs.len() - 1;
        if x >= xs[last] {
            return v[last];
        }
        let j = xs.partition_point(|&a| a <= x).min(last);
        let (x0, x1) = (xs[j - 1], xs[j]);
        if x1 == x0 {
            return v[j];
        }
        let w = (x - x0) / (x1 - x0);
        v[j - 1] + w * (v[j] - v[j - 1])
    }

    pub fn y_at(&self, x: S) -> S {
        self.at(0, x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchDecomposition<S> {
    pub i_max: usize,
    pub i_min: usize,
    pub x_max: S,
    pub x_min: S,
    pub grid: Vec<S>,
    /// `y^u` on the grid.
    pub upper: Vec<S>,
    pub lower: Vec<S>,
    /// z components on the grid, one vector per extra coordinate.
    pub upper_z: Vec<Vec<S>>,
    pub lower_z: Vec<Vec<S>>,
    /// `Y = y^u - y^l`.
    pub gap: Vec<S>,
    pub upper_branch: Branch<S>,
    pub lower_branch: Branch<S>,
}

impl<S: Real> BranchDecomposition<S> {
    /// `Y` at an arbitrary `x`, linearly interpolated on the raw branches.
    pub fn gap_at(&self, x: S) -> S {
        self.upper_branch.y_at(x) - self.lower_branch.y_at(x)
    }
}

/// Vertex indices of the max and min of x (first occurrence).
pub(crate) fn x_extremes<S: Real>(curve: &Curve<S>) -> (usize, usize) {
    let mut i_max = 0;
    let mut i_min = 0;
    for (i, p) in curve.points().enumerate() {
        if p[0] > curve.point(i_max)[0] {
            i_max = i;
        }
        if p[0] < curve.point(i_min)[0] {
            i_min = i;
        }
    }
    (i_max, i_min)
}

/// Walks forward from `from` to `to` inclusive.
pub(crate) fn chain(n: usize, from: usize, to: usize) -> Vec<usize> {
    let len = (to + n - from) % n + 1;
    (0..len).map(|k| (from + k) % n).collect()
}

fn build_branch<S: Real>(curve: &Curve<S>, idx: &[usize], scale: S) -> Result<Branch<S>> {
    let mut idx = idx.to_vec();
    if curve.point(idx[0])[0] > curve.point(*idx.last().unwrap())[0] {
        idx.reverse();
    }
    let tol = scale * S::lit(1e-12);
    let extra = curve.dim() - 1;
    let mut x: Vec<S> = Vec::with_capacity(idx.len());
    let mut values = vec![Vec::with_capacity(idx.len()); extra];
    for (k, &i) in idx.iter().enumerate() {
        let p = curve.point(i);
        if k > 0 && p[0] < x[k - 1] - tol {
            return Err(Error::NotGraphical(format!(
                "x decreases by {:e} at vertex {i}",
                (x[k - 1] - p[0]).to_f64_lossy()
            )));
        }
        let xv = if k > 0 { p[0].max(x[k - 1]) } else { p[0] };
        x.push(xv);
        for (c, vals) in values.iter_mut().enumerate() {
            vals.push(p[c + 1]);
        }
    }
    Ok(Branch { x, values })
}

/// Splits the projected curve at the extremes of x into an upper and a lower
/// graph and samples both on a uniform grid of `grid_n` points.
pub fn branch_split<S: Real>(curve: &Curve<S>, grid_n: usize) -> Result<BranchDecomposition<S>> {
    if grid_n < 3 {
        return Err(Error::InvalidParameter("grid_n must be at least 3".into()));
    }
    if !projection_report(curve).passes() {
        return Err(Error::NotConvexProjection);
    }
    let n = curve.len();
    let (i_max, i_min) = x_extremes(curve);
    let x_max = curve.point(i_max)[0];
    let x_min = curve.point(i_min)[0];
    let scale = x_max - x_min;
    let a = build_branch(curve, &chain(n, i_max, i_min), scale)?;
    let b = build_branch(curve, &chain(n, i_min, i_max), scale)?;
    let mean = |br: &Branch<S>| br.values[0].iter().copied().sum::<S>() / S::from_usize_lossy(br.x.len());
    let (upper_branch, lower_branch) = if mean(&a) >= mean(&b) { (a, b) } else { (b, a) };

    let grid: Vec<S> = (0..grid_n)
        .map(|i| {
            if i + 1 == grid_n {
                x_max
            } else {
                x_min + scale * S::from_usize_lossy(i) / S::from_usize_lossy(grid_n - 1)
            }
        })
        .collect();
    let sample = |br: &Branch<S>, k: usize| grid.iter().map(|&x| br.at(k, x)).collect::<Vec<S>>();
    let upper = sample(&upper_branch, 0);
    let lower = sample(&lower_branch, 0);
    let extra = curve.dim() - 2;
    let upper_z = (0..extra).map(|k| sample(&upper_branch, k + 1)).collect();
    let lower_z = (0..extra).map(|k| sample(&lower_branch, k + 1)).collect();
    let gap = upper.iter().zip(&lower).map(|(&u, &l)| u - l).collect();
    Ok(BranchDecomposition {
        i_max,
        i_min,
        x_max,
        x_min,
        grid,
        upper,
        lower,
        upper_z,
        lower_z,
        gap,
        upper_branch,
        lower_branch,
    })
}
