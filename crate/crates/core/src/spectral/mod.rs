//! Gaussian-weighted analysis around a line: quadrature, the shifted
//! Ornstein-Uhlenbeck operator, mode splitting and the cut-off.

mod evolution;
mod modes;
mod quadrature;

pub use evolution::{graphical_mode_run, mode_evolution, mode_evolution_fn, sample_graphical, ModeEvolution};
pub use modes::{
    apply_shifted_ou, cutoff, cutoff_profile, hermite_phi, mode_split, mode_split_fn, ModeSplit, PARSEVAL_SLACK,
};
pub use quadrature::{inner_product, norm, GaussianQuadrature};
