//! Convex-projection machinery for the xy-plane.

mod branches;
mod minpoints;
mod report;

pub use branches::{branch_split, Branch, BranchDecomposition};
pub use minpoints::{track_min_points, MinPointTrack, TIE_TOLERANCE};
pub use report::{polygon_is_simple, projection_report, ProjectionReport, CONVEXITY_BAND};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Analysis window half-width `δ / (20 H)`.
pub fn linear_scale<S: Real>(delta: S, h: S) -> Result<S> {
    if !(delta > S::zero() && h > S::zero()) {
        return Err(Error::InvalidParameter(format!("delta = {delta}, H = {h} must be positive")));
    }
    Ok(delta / (S::lit(20.0) * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_scale_arithmetic() {
        assert_eq!(linear_scale(1.0, 0.05).unwrap(), 1.0);
        assert!((linear_scale(0.2, 0.01).unwrap() - 1.0f64).abs() < 1e-15);
        assert!(linear_scale(0.0, 1.0).is_err());
    }
}
