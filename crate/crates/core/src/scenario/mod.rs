//! Scenario constructors and the end-to-end pipeline.

mod analysis;
mod constructors;
mod run;
mod spec;

pub use analysis::{
    analyze_trajectory, branch_modes, huisken_monotonicity, persistence_bands, AnalysisOptions, Check, DiagnosticsRow,
    Metrics, Monotonicity, PersistenceBands, RunAnalysis, Verdict, AREA_SPLIT_TOL, CIRCULARITY_RMS, FLOOR_BAND,
    HUISKEN_RELATIVE_SLACK, PERSISTENCE_START, SLOPE_BAND,
};
pub use constructors::{
    make_circle, make_ellipse, make_figure_eight, make_wave_perturbation, random_fourier_curve, MIN_SCENARIO_POINTS,
};
pub use run::{run_scenario, write_analysis, ScenarioSummary};
pub use spec::{Analysis, ScenarioKind, ScenarioSpec, WaveBase};
