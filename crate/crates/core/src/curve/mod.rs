//! Closed polylines in R^n and the geometric primitives built on them.

mod fit;
pub(crate) mod ops;
mod resample;
mod spline;

pub use fit::{fit_circle, CircleFit};
pub use ops::{curvature_vector, project_xy, turning_angle, winding_number_about, SPACING_RATIO_LIMIT};
pub use resample::{resample_equal_arclength, resample_with, Interpolation, MIN_TOTAL_LENGTH};
pub use spline::PeriodicSpline;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dist, Real};

/// Smallest vertex count accepted for a closed curve.
pub const MIN_VERTICES: usize = 16;

/// Closed polyline sample of an immersed curve. Vertex `0` sits at `u = 0`;
/// the closing edge from the last vertex back to vertex `0` is implicit.
///
/// Coordinates are stored flat, vertex-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct Curve<S> {
    dim: usize,
    coords: Vec<S>,
}

impl<S: Real> Curve<S> {
    /// Builds a curve from flat coordinates, enforcing the immersion invariants.
    pub fn new(dim: usize, coords: Vec<S>) -> Result<Self> {
        let curve = Self { dim, coords };
        curve.validate()?;
        Ok(curve)
    }

    pub fn from_points(points: &[Vec<S>]) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).unwrap_or(0);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidCurve("vertices do not share one dimension".into()));
        }
        Self::new(dim, points.iter().flatten().copied().collect())
    }

    /// Samples `f(u)` at `u_i = 2πi/n`.
    pub fn from_fn(n: usize, f: impl Fn(S) -> Vec<S>) -> Result<Self> {
        let tau = S::TAU();
        let pts: Vec<Vec<S>> = (0..n)
            .map(|i| f(tau * S::from_usize_lossy(i) / S::from_usize_lossy(n)))
            .collect();
        Self::from_points(&pts)
    }

    pub(crate) fn from_raw(dim: usize, coords: Vec<S>) -> Self {
        debug_assert!(dim >= 2 && coords.len().is_multiple_of(dim));
        Self { dim, coords }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidCurve(format!("ambient dimension {} < 2", self.dim)));
        }
        if !self.coords.len().is_multiple_of(self.dim) {
            return Err(Error::InvalidCurve("coordinate count not a multiple of dim".into()));
        }
        let n = self.len();
        if n < MIN_VERTICES {
            return Err(Error::InvalidCurve(format!("{n} vertices, need at least {MIN_VERTICES}")));
        }
        if self.coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidCurve("non-finite coordinate".into()));
        }
        let edges = self.edge_lengths();
        let total: S = edges.iter().copied().sum();
        let floor = total * S::lit(1e-12);
        if let Some(i) = edges.iter().position(|&e| e <= floor) {
            return Err(Error::InvalidCurve(format!("zero-length edge after vertex {i}")));
        }
        // a discrete cusp: the curve doubles back on itself
        for i in 0..n {
            let a = self.point(self.prev(i));
            let b = self.point(i);
            let c = self.point(self.next(i));
            let mut d = S::zero();
            for k in 0..self.dim {
                d = d + (b[k] - a[k]) * (c[k] - b[k]);
            }
            let cos = d / (edges[self.prev(i)] * edges[i]);
            if cos <= -S::one() + S::lit(1e-12) {
                return Err(Error::InvalidCurve(format!("curve folds back at vertex {i}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[S] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[S]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    #[inline]
    pub fn next(&self, i: usize) -> usize {
        if i + 1 == self.len() {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    pub fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.len() - 1
        } else {
            i - 1
        }
    }

    /// Length of edge `i -> i+1` for every vertex.
    pub fn edge_lengths(&self) -> Vec<S> {
        (0..self.len())
            .map(|i| dist(self.point(i), self.point(self.next(i))))
            .collect()
    }

    /// Polyline length.
    pub fn length(&self) -> S {
        self.edge_lengths().into_iter().sum()
    }

    /// Length of the periodic cubic interpolant through the vertices.
    pub fn smooth_length(&self) -> S {
        PeriodicSpline::through(self)
            .map(|s| s.total_arc_length())
            .unwrap_or_else(|_| self.length())
    }

    pub fn min_spacing(&self) -> S {
        self.edge_lengths()
            .into_iter()
            .fold(S::infinity(), |a, b| a.min(b))
    }

    /// max edge / min edge.
    pub fn spacing_ratio(&self) -> S {
        let e = self.edge_lengths();
        let max = e.iter().copied().fold(S::zero(), |a, b| a.max(b));
        let min = e.iter().copied().fold(S::infinity(), |a, b| a.min(b));
        max / min
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> S {
        let n = self.len();
        let mut best = S::zero();
        for i in 0..n {
            let p = self.point(i);
            for j in i + 1..n {
                let q = self.point(j);
                let mut d2 = S::zero();
                for k in 0..self.dim {
                    let d = p[k] - q[k];
                    d2 = d2 + d * d;
                }
                if d2 > best {
                    best = d2;
                }
            }
        }
        best.sqrt()
    }

    pub fn centroid(&self) -> Vec<S> {
        let n = S::from_usize_lossy(self.len());
        let mut c = vec![S::zero(); self.dim];
        for p in self.points() {
            for (ck, &pk) in c.iter_mut().zip(p) {
                *ck = *ck + pk;
            }
        }
        c.iter_mut().for_each(|ck| *ck = *ck / n);
        c
    }

    /// Largest distance from `center` to a vertex.
    pub fn max_radius_about(&self, center: &[S]) -> S {
        self.points()
            .map(|p| dist(p, center))
            .fold(S::zero(), |a, b| a.max(b))
    }

    pub fn scaled(&self, factor: S) -> Self {
        Self::from_raw(self.dim, self.coords.iter().map(|&c| c * factor).collect())
    }

    pub fn translated(&self, shift: &[S]) -> Self {
        assert_eq!(shift.len(), self.dim);
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(shift).map(|(&a, &b)| a + b))
            .collect();
        Self::from_raw(self.dim, coords)
    }

    /// Applies the linear map `x -> A x` given as rows.
    pub fn transformed(&self, rows: &[Vec<S>]) -> Self {
        assert_eq!(rows.len(), self.dim);
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| rows.iter().map(move |r| crate::scalar::dot(r, p)))
            .collect();
        Self::from_raw(self.dim, coords)
    }

    /// Embeds into a higher dimension by appending zero coordinates.
    pub fn embedded(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().copied().chain(std::iter::repeat_n(S::zero(), dim - self.dim)))
            .collect();
        Self::from_raw(dim, coords)
    }

    /// Signed shoelace area of the xy-projection.
    pub fn signed_area_xy(&self) -> S {
        let n = self.len();
        let mut a = S::zero();
        for i in 0..n {
            let p = self.point(i);
            let q = self.point(self.next(i));
            a = a + p[0] * q[1] - q[0] * p[1];
        }
        a * S::half()
    }

    pub fn map_scalar<T: Real>(&self) -> Curve<T> {
        Curve::from_raw(self.dim, self.coords.iter().map(|&c| T::lit(c.to_f64_lossy())).collect())
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Curve;

    pub fn circle(n: usize, r: f64) -> Curve<f64> {
        Curve::<f64>::from_fn(n, |u| vec![r * u.cos(), r * u.sin()]).unwrap()
    }

    pub fn ellipse(n: usize, a: f64, b: f64) -> Curve<f64> {
        Curve::<f64>::from_fn(n, |u| vec![a * u.cos(), b * u.sin()]).unwrap()
    }
}
