use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::quadrature::{inner_product, GaussianQuadrature};

/// Normalised eigenfunction `φ_i = He_{i-1} / sqrt((i-1)!)` of `-L`, with
/// eigenvalue `i - 2`. Defined for `1 <= i <= 6`.
pub fn hermite_phi<S: Real>(i: usize, x: S) -> S {
    let he = match i {
        1 => S::one(),
        2 => x,
        3 => x * x - S::one(),
        4 => x * x * x - S::lit(3.0) * x,
        5 => x.powi(4) - S::lit(6.0) * x * x + S::lit(3.0),
        6 => x.powi(5) - S::lit(10.0) * x.powi(3) + S::lit(15.0) * x,
        _ => panic!("hermite_phi is tabulated for i in 1..=6, got {i}"),
    };
    let fact = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0][i - 1];
    he / S::lit(fact).sqrt()
}

/// `Lf = f'' - x f' + f` on the uniform grid `x_i = x0 + i h`: centred
/// differences inside, second-order one-sided ones at the two ends.
pub fn apply_shifted_ou<S: Real>(f: &[S], x0: S, h: S) -> Vec<S> {
    let m = f.len();
    assert!(m >= 4, "need at least 4 samples");
    let h2 = h * h;
    let (two, three, four, five) = (S::two(), S::lit(3.0), S::lit(4.0), S::lit(5.0));
    (0..m)
        .map(|i| {
            let (d1, d2) = if i == 0 {
                (
                    (-three * f[0] + four * f[1] - f[2]) / (two * h),
                    (two * f[0] - five * f[1] + four * f[2] - f[3]) / h2,
                )
            } else if i + 1 == m {
                let j = m - 1;
                (
                    (three * f[j] - four * f[j - 1] + f[j - 2]) / (two * h),
                    (two * f[j] - five * f[j - 1] + four * f[j - 2] - f[j - 3]) / h2,
                )
            } else {
                ((f[i + 1] - f[i - 1]) / (two * h), (f[i + 1] - two * f[i] + f[i - 1]) / h2)
            };
            let x = x0 + S::from_usize_lossy(i) * h;
            d2 - x * d1 + f[i]
        })
        .collect()
}

/// Projections onto `φ_1`, `φ_2` and the rest.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModeSplit<S> {
    pub c_minus1: S,
    pub c_0: S,
    pub tail_norm: S,
    pub total_norm: S,
}

/// Relative size of a negative Parseval remainder tolerated as rounding.
pub const PARSEVAL_SLACK: f64 = 1e-10;

/// Coefficients by quadrature; the tail by Parseval subtraction.
pub fn mode_split<S: Real>(quad: &GaussianQuadrature<S>, f: &[S]) -> Result<ModeSplit<S>> {
    let one = vec![S::one(); quad.order()];
    let c_minus1 = inner_product(quad, f, &one);
    let c_0 = inner_product(quad, f, &quad.nodes);
    let total2 = inner_product(quad, f, f);
    let tail2 = total2 - c_minus1 * c_minus1 - c_0 * c_0;
    if tail2 < -S::lit(PARSEVAL_SLACK) * total2.max(S::one()) {
        return Err(Error::Consistency(format!("negative Parseval remainder {tail2}")));
    }
    Ok(ModeSplit {
        c_minus1,
        c_0,
        tail_norm: tail2.max(S::zero()).sqrt(),
        total_norm: total2.sqrt(),
    })
}

pub fn mode_split_fn<S: Real>(quad: &GaussianQuadrature<S>, f: impl Fn(S) -> S) -> Result<ModeSplit<S>> {
    mode_split(quad, &quad.sample(f))
}

/// Quintic smoothstep `6u⁵ - 15u⁴ + 10u³`.
fn smoothstep<S: Real>(u: S) -> S {
    u * u * u * (u * (u * S::lit(6.0) - S::lit(15.0)) + S::lit(10.0))
}

/// Cut-off `η(s)`: 1 for `|s| <= 1`, 0 for `|s| >= 2`, `1 - smoothstep(|s| - 1)`
/// between. `|η'| <= 15/8`, `|η''| <= 10/sqrt(3)`.
pub fn cutoff<S: Real>(s: S) -> S {
    let a = s.abs();
    if a <= S::one() {
        S::one()
    } else if a >= S::two() {
        S::zero()
    } else {
        S::one() - smoothstep(a - S::one())
    }
}

/// `û = u · η(x / ρ)` pointwise.
pub fn cutoff_profile<S: Real>(u: &[S], x: &[S], rho: S) -> Result<Vec<S>> {
    if !(rho > S::zero()) {
        return Err(Error::InvalidParameter(format!("rho = {rho} must be positive")));
    }
    if u.len() != x.len() {
        return Err(Error::InvalidParameter("u and x differ in length".into()));
    }
    Ok(u.iter().zip(x).map(|(&v, &xi)| v * cutoff(xi / rho)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad() -> GaussianQuadrature<f64> {
        GaussianQuadrature::standard()
    }

    #[test]
    fn orthonormal_eigenfunctions() {
        let q = quad();
        for i in 1..=6 {
            for j in 1..=6 {
                let v: f64 = inner_product(&q, &q.sample(|x| hermite_phi(i, x)), &q.sample(|x| hermite_phi(j, x)));
                let want: f64 = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-10, "{i} {j} {v}");
            }
        }
    }

    #[test]
    fn eigen_relations() {
        let q = quad();
        let h = q.spacing.unwrap();
        for i in 1..=6 {
            let f = q.sample(|x| hermite_phi(i, x));
            let lf = apply_shifted_ou(&f, q.nodes[0], h);
            let lambda = 2.0 - i as f64; // L φ_i = -(i - 2) φ_i
            // one-sided end stencils are inexact beyond cubics, and the
            // end nodes carry ~e^{-50} weight; compare inside
            for k in 1..f.len() - 1 {
                let scale = 1.0 + f[k].abs().max(q.nodes[k].abs().powi(i as i32));
                assert!((lf[k] - lambda * f[k]).abs() <= 5.0 * h * h * scale, "{i} at {}", q.nodes[k]);
            }
        }
        let one = apply_shifted_ou(&vec![1.0; q.order()], -10.0, h);
        assert!(one.iter().all(|v| (v - 1.0).abs() < 1e-10));
        let lin = apply_shifted_ou(&q.nodes.clone(), -10.0, h);
        assert!(lin.iter().all(|v| v.abs() < 1e-8));
    }

    #[test]
    fn self_adjoint_on_monomials() {
        let q = quad();
        let h = q.spacing.unwrap();
        let mono: Vec<Vec<f64>> = (0..4).map(|p| q.sample(|x| x.powi(p))).collect();
        let l: Vec<Vec<f64>> = mono.iter().map(|f| apply_shifted_ou(f, -10.0, h)).collect();
        for a in 0..4 {
            for b in 0..4 {
                let lhs = inner_product(&q, &l[a], &mono[b]);
                let rhs = inner_product(&q, &mono[a], &l[b]);
                assert!((lhs - rhs).abs() <= 5.0 * h * h, "{a} {b}");
            }
        }
    }

    #[test]
    fn splits() {
        let q = quad();
        let s = mode_split_fn(&q, |x| x).unwrap();
        assert!(s.c_minus1.abs() < 1e-12 && (s.c_0 - 1.0).abs() < 1e-10 && s.tail_norm < 1e-4);
        let s = mode_split_fn(&q, |x| x * x).unwrap();
        assert!((s.c_minus1 - 1.0).abs() < 1e-10 && s.c_0.abs() < 1e-12);
        assert!((s.tail_norm - 2f64.sqrt()).abs() < 1e-9);
        let s = mode_split_fn(&q, |_| 5.0).unwrap();
        assert!((s.c_minus1 - 5.0).abs() < 1e-10 && s.c_0.abs() < 1e-12 && s.tail_norm < 1e-4);
        let t = s.c_minus1.powi(2) + s.c_0.powi(2) + s.tail_norm.powi(2);
        assert!((t - s.total_norm.powi(2)).abs() < 1e-10);
    }

    #[test]
    fn spectral_gap() {
        let q = quad();
        let h = q.spacing.unwrap();
        let coeffs = [[1.0, 0.0, 0.0, 0.0], [0.3, -1.2, 0.5, 0.0], [0.0, 0.4, 0.0, 2.0], [1.0, 1.0, 1.0, 1.0]];
        for c in coeffs {
            let f = q.sample(|x| (0..4).map(|k| c[k] * hermite_phi(k + 3, x)).sum());
            let lf = apply_shifted_ou(&f, -10.0, h);
            let neg: Vec<f64> = lf.iter().map(|v| -v).collect();
            let lhs = inner_product(&q, &neg, &f);
            assert!(lhs >= inner_product(&q, &f, &f) - 5.0 * h * h);
        }
    }

    #[test]
    fn cutoff_values_and_bounds() {
        assert_eq!(cutoff(0.5f64), 1.0);
        assert_eq!(cutoff(3.0f64), 0.0);
        let m = cutoff(1.5f64);
        assert!(m > 0.0 && m < 1.0);
        assert_eq!(cutoff_profile(&[1.0, 1.0, 1.0], &[0.5, 1.5, 3.0], 1.0).unwrap()[0], 1.0);
        let d = 1e-4f64;
        let (mut d1, mut d2) = (0.0f64, 0.0f64);
        let mut s = 0.5f64;
        while s < 2.5 {
            d1 = d1.max(((cutoff(s + d) - cutoff(s - d)) / (2.0 * d)).abs());
            d2 = d2.max(((cutoff(s + d) - 2.0 * cutoff(s) + cutoff(s - d)) / (d * d)).abs());
            s += 1e-3;
        }
        assert!(d1 <= 2.0 && (d1 - 1.875).abs() < 1e-3);
        assert!((d2 - 10.0 / 3f64.sqrt()).abs() < 1e-2);
        assert!((1..200).all(|k| cutoff(1.0 + k as f64 / 200.0) <= cutoff(1.0 + (k - 1) as f64 / 200.0)));
    }

    #[test]
    fn cutoff_tail() {
        let q = quad();
        for rho in [3.0, 4.0, 5.0] {
            let diff = q.sample(|x| x * cutoff(x / rho) - x);
            let n = inner_product(&q, &diff, &diff).sqrt();
            assert!(n <= 10.0 * (-rho * rho / 4.0f64).exp(), "{rho} {n}");
        }
    }
}
