use crate::error::{Error, Result};
use crate::scalar::Real;

/// Slopes above this mean the curve is no longer a graph in any useful sense.
pub const GRAPHICAL_SLOPE_LIMIT: f64 = 10.0;

/// Graph `x -> (y(x), z_1(x), ..)` over a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphicalState<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
    pub z: Vec<Vec<S>>,
}

impl<S: Real> GraphicalState<S> {
    pub fn new(x: Vec<S>, y: Vec<S>, z: Vec<Vec<S>>) -> Result<Self> {
        let m = x.len();
        if m < 3 || y.len() != m || z.iter().any(|c| c.len() != m) {
            return Err(Error::InvalidParameter("grid functions must share a grid of >= 3 nodes".into()));
        }
        let h = x[1] - x[0];
        let uniform = x
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= h * S::lit(1e-9));
        if !(h > S::zero()) || !uniform {
            return Err(Error::InvalidParameter("x-grid must be uniform and increasing".into()));
        }
        Ok(Self { x, y, z })
    }

    pub fn spacing(&self) -> S {
        self.x[1] - self.x[0]
    }

    /// Uniform grid on `[-r, r]` with `m` nodes, components from closures.
    pub fn sample(r: S, m: usize, y: impl Fn(S) -> S, z: &[&dyn Fn(S) -> S]) -> Result<Self> {
        let x: Vec<S> = (0..m)
            .map(|i| -r + S::two() * r * S::from_usize_lossy(i) / S::from_usize_lossy(m - 1))
            .collect();
        let yv = x.iter().map(|&v| y(v)).collect();
        let zv = z.iter().map(|f| x.iter().map(|&v| f(v)).collect()).collect();
        Self::new(x, yv, zv)
    }
}

/// Explicit step of the graphical rescaled equation
/// `w_τ = w_xx / (1 + y_x² + Σ z_x²) - x w_x + w` for `w ∈ {y, z_1, ..}`.
///
/// `left` and `right` hold the Dirichlet values after the step, `y` first.
pub fn graphical_rescaled_step<S: Real>(
    state: &GraphicalState<S>,
    dtau: S,
    left: &[S],
    right: &[S],
) -> Result<GraphicalState<S>> {
    let h = state.spacing();
    let ceiling = S::lit(0.4) * h * h;
    if !(dtau > S::zero()) || dtau > ceiling {
        return Err(Error::StepTooLarge {
            dt: dtau.to_f64_lossy(),
            ceiling: ceiling.to_f64_lossy(),
        });
    }
    let comps = 1 + state.z.len();
    if left.len() != comps || right.len() != comps {
        return Err(Error::InvalidParameter("one boundary value per component".into()));
    }
    let m = state.x.len();
    let inv2h = S::one() / (S::two() * h);
    let invh2 = S::one() / (h * h);
    let slope = |w: &[S], i: usize| (w[i + 1] - w[i - 1]) * inv2h;

    let mut metric = vec![S::one(); m];
    for i in 1..m - 1 {
        let yx = slope(&state.y, i);
        if yx.abs() > S::lit(GRAPHICAL_SLOPE_LIMIT) {
            return Err(Error::GraphicalRegimeLost {
                slope: yx.abs().to_f64_lossy(),
                limit: GRAPHICAL_SLOPE_LIMIT,
            });
        }
        let mut g = S::one() + yx * yx;
        for z in &state.z {
            let zx = slope(z, i);
            g = g + zx * zx;
        }
        metric[i] = g;
    }
    let advance = |w: &[S], lo: S, hi: S| -> Vec<S> {
        let mut out = vec![S::zero(); m];
        out[0] = lo;
        out[m - 1] = hi;
        for i in 1..m - 1 {
            let wxx = (w[i + 1] - S::two() * w[i] + w[i - 1]) * invh2;
            out[i] = w[i] + dtau * (wxx / metric[i] - state.x[i] * slope(w, i) + w[i]);
        }
        out
    };
    Ok(GraphicalState {
        x: state.x.clone(),
        y: advance(&state.y, left[0], right[0]),
        z: state
            .z
            .iter()
            .enumerate()
            .map(|(l, z)| advance(z, left[l + 1], right[l + 1]))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_line_is_stationary() {
        let zero = |_: f64| 0.0;
        let mut s = GraphicalState::sample(2.0, 41, zero, &[&zero, &zero]).unwrap();
        let dt = 0.3 * s.spacing().powi(2);
        for _ in 0..500 {
            s = graphical_rescaled_step(&s, dt, &[0.0; 3], &[0.0; 3]).unwrap();
        }
        assert!(s.y.iter().chain(s.z.iter().flatten()).all(|&v| v == 0.0));
    }

    #[test]
    fn constant_grows_like_exp() {
        let s = GraphicalState::<f64>::sample(2.0, 41, |_| 0.7, &[]).unwrap();
        let dt = 0.3 * s.spacing().powi(2);
        let next = graphical_rescaled_step(&s, dt, &[0.7 * (1.0 + dt)], &[0.7 * (1.0 + dt)]).unwrap();
        for v in &next.y {
            assert!((v - 0.7 * (1.0 + dt)).abs() < 1e-15);
        }
    }

    #[test]
    fn steep_graph_is_rejected() {
        let s = GraphicalState::<f64>::sample(1.0, 41, |x| 20.0 * x, &[]).unwrap();
        let dt = 0.1 * s.spacing().powi(2);
        assert!(matches!(
            graphical_rescaled_step(&s, dt, &[-20.0], &[20.0]),
            Err(Error::GraphicalRegimeLost { .. })
        ));
        assert!(graphical_rescaled_step(&s, 1.0, &[-20.0], &[20.0]).is_err());
    }
}
