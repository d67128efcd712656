use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::Real;

/// Rule for `(1/sqrt(2π)) ∫ f(x) e^{-x²/2} dx`.
#[derive(Debug, Clone)]
pub struct GaussianQuadrature<S> {
    pub nodes: Vec<S>,
    /// Weights with the Gaussian density folded in.
    pub weights: Vec<S>,
    /// Node spacing for the trapezoid rule, `None` for Gauss-Hermite.
    pub spacing: Option<S>,
}

impl<S: Real> GaussianQuadrature<S> {
    /// Composite trapezoid on `[-half_width, half_width]`.
    pub fn trapezoid(half_width: S, order: usize) -> Result<Self> {
        if order < 3 || !(half_width > S::zero()) {
            return Err(Error::InvalidParameter(format!(
                "trapezoid needs >= 3 nodes and a positive width (got {order}, {half_width})"
            )));
        }
        let h = S::two() * half_width / S::from_usize_lossy(order - 1);
        let norm = S::one() / (S::two() * S::PI()).sqrt();
        let nodes: Vec<S> = (0..order)
            .map(|i| -half_width + S::from_usize_lossy(i) * h)
            .collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let end = if i == 0 || i + 1 == order { S::half() } else { S::one() };
                end * h * norm * (-x * x * S::half()).exp()
            })
            .collect();
        Ok(Self {
            nodes,
            weights,
            spacing: Some(h),
        })
    }

    /// 4001-node trapezoid on `[-10, 10]`.
    pub fn standard() -> Self {
        Self::trapezoid(S::lit(10.0), 4001).expect("fixed parameters are valid")
    }

    /// Gauss-Hermite rule for the probabilists' weight via the eigenvalues of
    /// the Jacobi matrix (off-diagonal `sqrt(k)`).
    pub fn gauss_hermite(order: usize) -> Result<Self> {
        if order == 0 || order > 100 {
            return Err(Error::InvalidParameter(format!("Gauss-Hermite order {order} outside 1..=100")));
        }
        let mut j = vec![vec![S::zero(); order]; order];
        for k in 1..order {
            let b = S::from_usize_lossy(k).sqrt();
            j[k - 1][k] = b;
            j[k][k - 1] = b;
        }
        let (values, vectors) = symmetric_eigen(&j);
        let mut pairs: Vec<(S, S)> = values
            .into_iter()
            .zip(vectors)
            .map(|(x, v)| (x, v[0] * v[0]))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
            spacing: None,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn integrate(&self, f: impl Fn(S) -> S) -> S {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `f` sampled on the nodes.
    pub fn sample(&self, f: impl Fn(S) -> S) -> Vec<S> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }
}

/// `⟨f, g⟩` for node samples.
pub fn inner_product<S: Real>(quad: &GaussianQuadrature<S>, f: &[S], g: &[S]) -> S {
    assert_eq!(f.len(), quad.order());
    assert_eq!(g.len(), quad.order());
    quad.weights.iter().zip(f).zip(g).map(|((&w, &a), &b)| w * a * b).sum()
}

pub fn norm<S: Real>(quad: &GaussianQuadrature<S>, f: &[S]) -> S {
    inner_product(quad, f, f).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments() {
        for q in [GaussianQuadrature::<f64>::standard(), GaussianQuadrature::gauss_hermite(40).unwrap()] {
            assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-12);
            assert!(q.integrate(|x| x).abs() < 1e-12);
            assert!((q.integrate(|x| x * x) - 1.0).abs() < 1e-10);
            assert!((q.integrate(|x| x.powi(4)) - 3.0).abs() < 1e-10);
            assert!((q.integrate(|x| x.powi(8)) - 105.0).abs() < 1e-8);
        }
    }

    #[test]
    fn small_gauss_hermite_nodes() {
        let q = GaussianQuadrature::<f64>::gauss_hermite(2).unwrap();
        assert!((q.nodes[0] + 1.0).abs() < 1e-14 && (q.nodes[1] - 1.0).abs() < 1e-14);
        assert!((q.weights[0] - 0.5).abs() < 1e-14);
    }
}
