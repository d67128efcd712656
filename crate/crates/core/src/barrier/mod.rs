//! Explicit subsolution for the branch gap and the comparison check.

mod certificate;
mod field;
mod residual;
mod track;

pub use certificate::{
    barrier_report, choose_epsilon, comparison_certificate, BarrierReport, BarrierSettings, ComparisonCertificate,
    FrameSlack, EPSILON_MARGIN,
};
pub use field::{barrier_eval, f_of_t, BarrierField};
pub use residual::{subsolution_residual, SpaceTimeGrid, SubsolutionReport};
pub use track::{build_extrema_track, ExtremaTrack};
