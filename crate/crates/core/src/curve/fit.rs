use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{solve_dense, symmetric_eigen};
use crate::scalar::{dot, Real};

use super::{winding_number_about, Curve};

/// Best-fit circle in the principal 2-plane of a vertex cloud.
#[derive(Debug, Clone, Serialize)]
pub struct CircleFit<S> {
    pub center: Vec<S>,
    pub radius: S,
    /// Two orthonormal vectors spanning the fitted plane.
    pub plane_basis: [Vec<S>; 2],
    /// RMS distance of the vertices to the fitted circle, divided by the radius.
    pub rms_residual: S,
    /// Winding count of the in-plane projection about the fitted centre.
    pub multiplicity: u32,
    /// Ratio of the two principal standard deviations (1 for a round cloud).
    pub axis_ratio: S,
}

/// PCA picks the plane; a geometric least-squares fit (algebraic start,
/// Gauss–Newton refinement) picks centre and radius inside it.
pub fn fit_circle<S: Real>(curve: &Curve<S>) -> Result<CircleFit<S>> {
    let n = curve.len();
    let dim = curve.dim();
    let centroid = curve.centroid();
    let inv_n = S::one() / S::from_usize_lossy(n);
    let mut cov = vec![vec![S::zero(); dim]; dim];
    for p in curve.points() {
        for a in 0..dim {
            let da = p[a] - centroid[a];
            for b in a..dim {
                cov[a][b] = cov[a][b] + da * (p[b] - centroid[b]) * inv_n;
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            cov[a][b] = cov[b][a];
        }
    }
    let (values, vectors) = symmetric_eigen(&cov);
    if !(values[0] > S::zero()) || values[1] <= values[0] * S::lit(1e-12) {
        return Err(Error::NoTwoPlane);
    }
    let e1 = vectors[0].clone();
    let e2 = vectors[1].clone();

    let mut planar = Vec::with_capacity(n);
    let mut off_plane2 = Vec::with_capacity(n);
    let mut rel = vec![S::zero(); dim];
    for p in curve.points() {
        for k in 0..dim {
            rel[k] = p[k] - centroid[k];
        }
        let a = dot(&rel, &e1);
        let b = dot(&rel, &e2);
        let mut z2 = S::zero();
        for k in 0..dim {
            let r = rel[k] - a * e1[k] - b * e2[k];
            z2 = z2 + r * r;
        }
        planar.push([a, b]);
        off_plane2.push(z2);
    }

    // algebraic start: x^2 + y^2 + D x + E y + F = 0
    let mut ata = vec![vec![S::zero(); 3]; 3];
    let mut atb = vec![S::zero(); 3];
    for q in &planar {
        let row = [q[0], q[1], S::one()];
        let rhs = -(q[0] * q[0] + q[1] * q[1]);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] = ata[i][j] + row[i] * row[j];
            }
            atb[i] = atb[i] + row[i] * rhs;
        }
    }
    let sol = solve_dense(ata, atb).ok_or(Error::NoTwoPlane)?;
    let mut cx = -sol[0] * S::half();
    let mut cy = -sol[1] * S::half();

    let radius_for = |cx: S, cy: S| -> S {
        planar
            .iter()
            .map(|q| (q[0] - cx).hypot(q[1] - cy))
            .sum::<S>()
            * inv_n
    };
    for _ in 0..50 {
        let r = radius_for(cx, cy);
        // Gauss–Newton on residuals d_i - r with r eliminated
        let (mut gx, mut gy) = (S::zero(), S::zero());
        let mut jtj = [[S::zero(); 2]; 2];
        let mut jtr = [S::zero(); 2];
        let mut rows = Vec::with_capacity(n);
        for q in &planar {
            let d = (q[0] - cx).hypot(q[1] - cy);
            if d == S::zero() {
                continue;
            }
            let jx = -(q[0] - cx) / d;
            let jy = -(q[1] - cy) / d;
            gx = gx + jx * inv_n;
            gy = gy + jy * inv_n;
            rows.push((jx, jy, d - r));
        }
        for (jx, jy, res) in rows {
            let ax = jx - gx;
            let ay = jy - gy;
            jtj[0][0] = jtj[0][0] + ax * ax;
            jtj[0][1] = jtj[0][1] + ax * ay;
            jtj[1][1] = jtj[1][1] + ay * ay;
            jtr[0] = jtr[0] + ax * res;
            jtr[1] = jtr[1] + ay * res;
        }
        let det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[0][1];
        if det.abs() <= S::min_positive_value() {
            break;
        }
        let dx = -(jtj[1][1] * jtr[0] - jtj[0][1] * jtr[1]) / det;
        let dy = -(jtj[0][0] * jtr[1] - jtj[0][1] * jtr[0]) / det;
        cx = cx + dx;
        cy = cy + dy;
        let scale = radius_for(cx, cy).max(S::min_positive_value());
        if dx.hypot(dy) <= scale * S::epsilon() * S::lit(8.0) {
            break;
        }
    }
    let radius = radius_for(cx, cy);

    let sum_sq: S = planar
        .iter()
        .zip(&off_plane2)
        .map(|(q, &z2)| {
            let d = (q[0] - cx).hypot(q[1] - cy) - radius;
            d * d + z2
        })
        .sum();
    let rms_residual = (sum_sq * inv_n).sqrt() / radius;

    let center = (0..dim)
        .map(|k| centroid[k] + cx * e1[k] + cy * e2[k])
        .collect();
    let multiplicity = winding_number_about(&planar, [cx, cy]).unsigned_abs() as u32;
    let axis_ratio = (values[0] / values[1]).sqrt();

    Ok(CircleFit {
        center,
        radius,
        plane_basis: [e1, e2],
        rms_residual,
        multiplicity,
        axis_ratio,
    })
}
