use crate::error::Result;
use crate::linalg::CyclicTridiagonal;
use crate::scalar::Real;

use super::Curve;

/// Periodic C² cubic interpolant through the vertices of a closed curve,
/// parameterised by cumulative chord length. Arc length along the
/// interpolant is integrated per segment with 3-point Gauss–Legendre.
#[derive(Debug, Clone)]
pub struct PeriodicSpline<S> {
    dim: usize,
    n: usize,
    h: Vec<S>,
    pts: Vec<S>,
    second: Vec<S>,
    cum_arc: Vec<S>,
}

fn gauss3<S: Real>() -> ([S; 3], [S; 3]) {
    let x = S::lit(0.6).sqrt();
    (
        [-x, S::zero(), x],
        [S::lit(5.0 / 9.0), S::lit(8.0 / 9.0), S::lit(5.0 / 9.0)],
    )
}

impl<S: Real> PeriodicSpline<S> {
    pub fn through(curve: &Curve<S>) -> Result<Self> {
        let n = curve.len();
        let dim = curve.dim();
        let h = curve.edge_lengths();
        let six = S::lit(6.0);
        let sub: Vec<S> = (0..n).map(|i| h[(i + n - 1) % n]).collect();
        let sup: Vec<S> = h.clone();
        let diag: Vec<S> = (0..n).map(|i| S::two() * (h[(i + n - 1) % n] + h[i])).collect();
        let solver = CyclicTridiagonal::new(sub, diag, sup, "periodic spline")?;

        let mut second = vec![S::zero(); n * dim];
        let mut rhs = vec![S::zero(); n];
        for k in 0..dim {
            for (i, r) in rhs.iter_mut().enumerate() {
                let ip = (i + 1) % n;
                let im = (i + n - 1) % n;
                let fwd = (curve.point(ip)[k] - curve.point(i)[k]) / h[i];
                let bwd = (curve.point(i)[k] - curve.point(im)[k]) / h[im];
                *r = six * (fwd - bwd);
            }
            let m = solver.solve(&rhs);
            for i in 0..n {
                second[i * dim + k] = m[i];
            }
        }

        let mut spline = Self {
            dim,
            n,
            h,
            pts: curve.coords().to_vec(),
            second,
            cum_arc: Vec::new(),
        };
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(S::zero());
        let mut acc = S::zero();
        for i in 0..n {
            acc = acc + spline.arc_partial(i, spline.h[i]);
            cum.push(acc);
        }
        spline.cum_arc = cum;
        Ok(spline)
    }

    pub fn total_arc_length(&self) -> S {
        self.cum_arc[self.n]
    }

    /// Writes the interpolant at offset `s ∈ [0, h_seg]` of segment `seg`.
    pub fn eval_into(&self, seg: usize, s: S, out: &mut [S]) {
        let j = (seg + 1) % self.n;
        let h = self.h[seg];
        let b = s / h;
        let a = S::one() - b;
        let c6 = h * h / S::lit(6.0);
        let ca = (a * a * a - a) * c6;
        let cb = (b * b * b - b) * c6;
        for k in 0..self.dim {
            out[k] = a * self.pts[seg * self.dim + k]
                + b * self.pts[j * self.dim + k]
                + ca * self.second[seg * self.dim + k]
                + cb * self.second[j * self.dim + k];
        }
    }

    fn speed(&self, seg: usize, s: S) -> S {
        let j = (seg + 1) % self.n;
        let h = self.h[seg];
        let b = s / h;
        let a = S::one() - b;
        let three = S::lit(3.0);
        let ca = -(three * a * a - S::one()) * h / S::lit(6.0);
        let cb = (three * b * b - S::one()) * h / S::lit(6.0);
        let mut acc = S::zero();
        for k in 0..self.dim {
            let d = (self.pts[j * self.dim + k] - self.pts[seg * self.dim + k]) / h
                + ca * self.second[seg * self.dim + k]
                + cb * self.second[j * self.dim + k];
            acc = acc + d * d;
        }
        acc.sqrt()
    }

    /// Arc length of segment `seg` from its start to offset `s`.
    fn arc_partial(&self, seg: usize, s: S) -> S {
        let (x, w) = gauss3::<S>();
        let half = s * S::half();
        (0..3)
            .map(|q| w[q] * self.speed(seg, half + half * x[q]))
            .sum::<S>()
            * half
    }

    /// Locates arc-length position `sigma` as `(segment, offset)`.
    pub fn locate(&self, sigma: S, hint: usize) -> (usize, S) {
        let total = self.total_arc_length();
        let mut sigma = sigma % total;
        if sigma < S::zero() {
            sigma = sigma + total;
        }
        let mut seg = hint.min(self.n - 1);
        while seg + 1 < self.n && self.cum_arc[seg + 1] <= sigma {
            seg += 1;
        }
        while seg > 0 && self.cum_arc[seg] > sigma {
            seg -= 1;
        }
        let target = sigma - self.cum_arc[seg];
        let seg_len = self.cum_arc[seg + 1] - self.cum_arc[seg];
        let h = self.h[seg];
        let mut s = (h * target / seg_len).max(S::zero()).min(h);
        let tol = h * S::epsilon() * S::lit(16.0);
        for _ in 0..12 {
            let f = self.arc_partial(seg, s) - target;
            let step = f / self.speed(seg, s);
            s = (s - step).max(S::zero()).min(h);
            if step.abs() <= tol {
                break;
            }
        }
        (seg, s)
    }

    pub fn point_at_arclength(&self, sigma: S) -> Vec<S> {
        let (seg, s) = self.locate(sigma, 0);
        let mut out = vec![S::zero(); self.dim];
        self.eval_into(seg, s, &mut out);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::circle;
    use super::*;

    #[test]
    fn interpolates_vertices() {
        let c = circle(40, 1.0);
        let sp = PeriodicSpline::through(&c).unwrap();
        let mut out = [0.0; 2];
        for i in 0..40 {
            sp.eval_into(i, 0.0, &mut out);
            assert!((out[0] - c.point(i)[0]).abs() < 1e-14);
            assert!((out[1] - c.point(i)[1]).abs() < 1e-14);
        }
    }

    #[test]
    fn midpoints_lie_near_circle() {
        let c = circle(64, 1.0);
        let sp = PeriodicSpline::through(&c).unwrap();
        let mut out = [0.0; 2];
        for i in 0..64 {
            let h = c.edge_lengths()[i];
            sp.eval_into(i, 0.5 * h, &mut out);
            let r = (out[0] * out[0] + out[1] * out[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-6, "r = {r}");
        }
        assert!((sp.total_arc_length() - std::f64::consts::TAU).abs() < 1e-6);
    }

    #[test]
    fn locate_inverts_arc_length() {
        let c = circle(50, 1.0);
        let sp = PeriodicSpline::through(&c).unwrap();
        for k in 0..37 {
            let sigma = sp.total_arc_length() * k as f64 / 37.0;
            let (seg, s) = sp.locate(sigma, 0);
            let back = sp.cum_arc[seg] + sp.arc_partial(seg, s);
            assert!((back - sigma).abs() < 1e-13);
        }
    }
}
