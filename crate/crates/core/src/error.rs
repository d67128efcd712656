use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("degenerate curve: total length {length:e} below {min:e}")]
    DegenerateCurve { length: f64, min: f64 },

    #[error("spacing ratio {ratio:.4} exceeds {limit}; resample the curve to equal arc length first")]
    NonUniformSpacing { ratio: f64, limit: f64 },

    #[error("horizontal speed {speed:e} below floor at vertex {vertex}")]
    HorizontalSpeedFloor { vertex: usize, speed: f64 },

    #[error("vertex cloud has no 2-plane (rank deficient)")]
    NoTwoPlane,

    #[error("time step {dt:e} exceeds explicit stability ceiling {ceiling:e}")]
    StepTooLarge { dt: f64, ceiling: f64 },

    #[error("singular linear system in {0}")]
    SingularSystem(&'static str),

    #[error("no extinction detected: {0}")]
    NoExtinction(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("graphical regime lost: |y_x| = {slope:.3} > {limit}")]
    GraphicalRegimeLost { slope: f64, limit: f64 },

    #[error("projection is not convex and injective")]
    NotConvexProjection,

    #[error("branch is not a graph over the x-axis: {0}")]
    NotGraphical(String),

    #[error("numerical consistency: {0}")]
    Consistency(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
