use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest vertex count accepted for scenario curves.
pub const MIN_SCENARIO_POINTS: usize = 64;

fn check_points(n: usize) -> Result<()> {
    if n < MIN_SCENARIO_POINTS {
        return Err(Error::InvalidParameter(format!(
            "scenario curves need at least {MIN_SCENARIO_POINTS} points, got {n}"
        )));
    }
    Ok(())
}

pub fn make_circle<S: Real>(n: usize, radius: S) -> Result<Curve<S>> {
    make_ellipse(n, radius, radius)
}

pub fn make_ellipse<S: Real>(n: usize, a: S, b: S) -> Result<Curve<S>> {
    check_points(n)?;
    if !(a > S::zero() && b > S::zero()) {
        return Err(Error::InvalidParameter(format!("semi-axes {a}, {b} must be positive")));
    }
    Curve::from_fn(n, |u: S| vec![a * u.cos(), b * u.sin()])
}

/// `(cos u, ε sin u, sin 2u)`.
pub fn make_figure_eight<S: Real>(epsilon: S, n: usize) -> Result<Curve<S>> {
    check_points(n)?;
    if epsilon < S::zero() {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be nonnegative")));
    }
    Curve::from_fn(n, |u: S| vec![u.cos(), epsilon * u.sin(), (S::two() * u).sin()])
}

/// Prepends `(ε cos u_i, ε sin u_i)` to every vertex, with `u_i = 2πi/N`.
pub fn make_wave_perturbation<S: Real>(base: &Curve<S>, epsilon: S) -> Result<Curve<S>> {
    if !(epsilon > S::zero()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    base.validate()?;
    let n = base.len();
    let dim = base.dim() + 2;
    let mut coords = Vec::with_capacity(n * dim);
    for (i, p) in base.points().enumerate() {
        let u = S::two() * S::PI() * S::from_usize_lossy(i) / S::from_usize_lossy(n);
        coords.push(epsilon * u.cos());
        coords.push(epsilon * u.sin());
        coords.extend_from_slice(p);
    }
    Curve::new(dim, coords)
}

/// Coefficients are redrawn until `min |c'| >= SPEED_FLOOR × mean |c'|`.
const SPEED_FLOOR: f64 = 0.1;
const MAX_DRAWS: usize = 1000;

/// Random trigonometric polynomial curve in `R^dim`: every coordinate is
/// `Σ_{k=1}^{degree} (a_k cos ku + b_k sin ku) / k` with `a_k, b_k`
/// uniform on `[-1, 1]`, drawn from a ChaCha8 stream seeded by `seed`.
pub fn random_fourier_curve<S: Real>(seed: u64, dim: usize, degree: usize, n: usize) -> Result<Curve<S>> {
    check_points(n)?;
    if dim < 2 || degree == 0 {
        return Err(Error::InvalidParameter(format!("need dim >= 2 and degree >= 1 (got {dim}, {degree})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probe = 4 * n;
    for _ in 0..MAX_DRAWS {
        // coeff[c][k] = (a, b)
        let coeff: Vec<Vec<(f64, f64)>> = (0..dim)
            .map(|_| {
                (1..=degree)
                    .map(|k| (rng.gen_range(-1.0..=1.0) / k as f64, rng.gen_range(-1.0..=1.0) / k as f64))
                    .collect()
            })
            .collect();
        let speed = |u: f64| {
            coeff
                .iter()
                .map(|c| {
                    let d: f64 = c
                        .iter()
                        .enumerate()
                        .map(|(j, &(a, b))| {
                            let k = (j + 1) as f64;
                            k * (b * (k * u).cos() - a * (k * u).sin())
                        })
                        .sum();
                    d * d
                })
                .sum::<f64>()
                .sqrt()
        };
        let speeds: Vec<f64> = (0..probe)
            .map(|i| speed(std::f64::consts::TAU * i as f64 / probe as f64))
            .collect();
        let mean = speeds.iter().sum::<f64>() / probe as f64;
        if speeds.iter().cloned().fold(f64::INFINITY, f64::min) < SPEED_FLOOR * mean {
            continue;
        }
        return Curve::from_fn(n, |u: S| {
            let u = u.to_f64_lossy();
            coeff
                .iter()
                .map(|c| {
                    let v: f64 = c
                        .iter()
                        .enumerate()
                        .map(|(j, &(a, b))| {
                            let k = (j + 1) as f64;
                            a * (k * u).cos() + b * (k * u).sin()
                        })
                        .sum();
                    S::lit(v)
                })
                .collect()
        });
    }
    Err(Error::InvalidParameter(format!("no immersed draw after {MAX_DRAWS} attempts")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::fit_circle;
    use crate::projection::projection_report;

    #[test]
    fn figure_eight_projections() {
        assert!(projection_report(&make_figure_eight(0.5, 256).unwrap()).passes());
        let flat = projection_report(&make_figure_eight(0.0, 256).unwrap());
        assert!(!flat.is_injective);
        let one = make_figure_eight(1.0, 256).unwrap();
        assert!(one.points().all(|p| (f64::hypot(p[0], p[1]) - 1.0).abs() < 1e-14));
        assert!(make_figure_eight(0.5f64, 32).is_err());
    }

    #[test]
    fn wave_perturbation_projects_to_circle() {
        let base = Curve::<f64>::from_fn(256, |u| vec![u.cos(), 0.0, (2.0 * u).sin()]).unwrap();
        let w = make_wave_perturbation(&base, 1.0).unwrap();
        assert_eq!(w.dim(), 5);
        assert!(projection_report(&w).passes());
        let c = make_wave_perturbation(&make_circle(128, 1.0).unwrap(), 0.3).unwrap();
        assert_eq!(c.dim(), 4);
        assert!(c.points().all(|p| (f64::hypot(p[0], p[1]) - 0.3).abs() < 1e-15));
        assert!(projection_report(&c).passes());
        assert!(make_wave_perturbation(&base, 0.0).is_err());
    }

    #[test]
    fn random_fourier_is_deterministic() {
        let a = random_fourier_curve::<f64>(7, 3, 5, 128).unwrap();
        let b = random_fourier_curve::<f64>(7, 3, 5, 128).unwrap();
        let c = random_fourier_curve::<f64>(8, 3, 5, 128).unwrap();
        assert_eq!(a.coords(), b.coords());
        assert_ne!(a.coords(), c.coords());
        assert!(fit_circle(&a).is_ok());
    }
}
