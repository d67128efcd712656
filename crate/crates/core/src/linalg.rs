//! Small dense and banded solvers used by the spline and the implicit step.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periodic tridiagonal system
/// `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]` with indices mod n.
///
/// Solved by the Sherman–Morrison correction of a plain Thomas sweep.
/// The factorisation is reused across right-hand sides.
pub struct CyclicTridiagonal<S> {
    sub: Vec<S>,
    corner_top: S,
    gamma: S,
    z: Vec<S>,
    // Thomas forward sweep coefficients for the modified matrix
    cprime: Vec<S>,
    denom: Vec<S>,
}

impl<S: Real> CyclicTridiagonal<S> {
    pub fn new(sub: Vec<S>, diag: Vec<S>, sup: Vec<S>, context: &'static str) -> Result<Self> {
        let n = diag.len();
        assert!(n >= 3 && sub.len() == n && sup.len() == n);
        let corner_top = sub[0]; // A[0][n-1]
        let corner_bottom = sup[n - 1]; // A[n-1][0]
        let gamma = -diag[0];
        if gamma == S::zero() {
            return Err(Error::SingularSystem(context));
        }
        let mut diag_mod = diag;
        diag_mod[0] = diag_mod[0] - gamma;
        diag_mod[n - 1] = diag_mod[n - 1] - corner_bottom * corner_top / gamma;

        let mut cprime = vec![S::zero(); n];
        let mut denom = vec![S::zero(); n];
        let tiny = S::min_positive_value().sqrt();
        for i in 0..n {
            let d = if i == 0 {
                diag_mod[0]
            } else {
                diag_mod[i] - sub[i] * cprime[i - 1]
            };
            if d.abs() <= tiny {
                return Err(Error::SingularSystem(context));
            }
            denom[i] = d;
            cprime[i] = if i + 1 < n { sup[i] / d } else { S::zero() };
        }

        let mut this = Self {
            sub,
            corner_top,
            gamma,
            z: Vec::new(),
            cprime,
            denom,
        };
        let mut u = vec![S::zero(); n];
        u[0] = gamma;
        u[n - 1] = corner_bottom;
        this.z = this.thomas(&u);
        let check = S::one() + this.z[0] + corner_top * this.z[n - 1] / gamma;
        if check.abs() <= tiny {
            return Err(Error::SingularSystem(context));
        }
        Ok(this)
    }

    fn thomas(&self, rhs: &[S]) -> Vec<S> {
        let n = rhs.len();
        let mut x = vec![S::zero(); n];
        x[0] = rhs[0] / self.denom[0];
        for i in 1..n {
            x[i] = (rhs[i] - self.sub[i] * x[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            x[i] = x[i] - self.cprime[i] * x[i + 1];
        }
        x
    }

    pub fn solve(&self, rhs: &[S]) -> Vec<S> {
        let n = rhs.len();
        let mut x = self.thomas(rhs);
        let num = x[0] + self.corner_top * x[n - 1] / self.gamma;
        let den = S::one() + self.z[0] + self.corner_top * self.z[n - 1] / self.gamma;
        let fact = num / den;
        for (xi, &zi) in x.iter_mut().zip(&self.z) {
            *xi = *xi - fact * zi;
        }
        x
    }

    #[cfg(test)]
    fn apply(sub: &[S], diag: &[S], sup: &[S], x: &[S]) -> Vec<S> {
        let n = x.len();
        (0..n)
            .map(|i| sub[i] * x[(i + n - 1) % n] + diag[i] * x[i] + sup[i] * x[(i + 1) % n])
            .collect()
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// rows. Intended for the small covariance matrices of point clouds.
pub fn symmetric_eigen<S: Real>(matrix: &[Vec<S>]) -> (Vec<S>, Vec<Vec<S>>) {
    let n = matrix.len();
    let mut a: Vec<Vec<S>> = matrix.to_vec();
    let mut v: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    let eps = S::epsilon();
    for _sweep in 0..100 {
        let off: S = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: S = (0..n).map(|i| a[i][i] * a[i][i]).sum::<S>() + off;
        if off <= eps * eps * scale || off == S::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == S::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (S::two() * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|k| v[k][i]).collect())
        .collect();
    (values, vectors)
}

/// Solves a dense linear system by Gaussian elimination with partial pivoting.
pub fn solve_dense<S: Real>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col].abs() <= S::epsilon() * S::lit(1e-4) {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let s: S = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
