//! Numerical laboratory for curve shortening flow of closed curves in R^n.
//!
//! Everything numerical is generic over [`scalar::Real`] (`f32` or `f64`);
//! the `f64` aliases below are what the CLI and the tests use.

// `!(x > 0)` rejects NaN as well; index loops mirror the stencils.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod barrier;
pub mod curve;
pub mod error;
pub mod flow;
pub mod io;
pub mod projection;
pub mod scenario;
mod linalg;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Curve = curve::Curve<f64>;
pub type CircleFit = curve::CircleFit<f64>;
