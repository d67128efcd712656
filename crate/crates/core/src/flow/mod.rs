//! Time stepping for the flow and its Huisken rescaling.

mod graphical;
mod rescaled;
mod step;
mod trajectory;
mod type_one;

pub use graphical::{graphical_rescaled_step, GraphicalState, GRAPHICAL_SLOPE_LIMIT};
pub use rescaled::{
    evolve_rescaled, gaussian_length, huisken_functional, rescale, rescale_about, rescaled_frames,
    step_rescaled, RescaledState,
};
pub use step::{step_csf, Scheme, EXPLICIT_CEILING};
pub use trajectory::{
    estimate_extinction, evolve, FlowControls, Frame, StopReason, Trajectory, CERTIFY_DIAMETER_FRAC,
};
pub use type_one::{type_i_report, TypeIReport, TypeIVerdict};

