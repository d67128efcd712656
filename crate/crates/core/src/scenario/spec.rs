use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Error, Result};
use crate::flow::FlowControls;
use crate::io::read_curve;

use super::constructors::{
    make_circle, make_ellipse, make_figure_eight, make_wave_perturbation, random_fourier_curve, MIN_SCENARIO_POINTS,
};

fn one() -> f64 {
    1.0
}

fn default_points() -> usize {
    256
}

fn default_degree() -> usize {
    5
}

fn default_dim() -> usize {
    3
}

/// Base curve for a wave perturbation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WaveBase {
    #[default]
    /// Planar figure-eight `(cos u, 0, sin 2u)`.
    FigureEight,
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    RandomFourier {
        seed: u64,
        #[serde(default = "default_dim")]
        ambient_dim: usize,
        #[serde(default = "default_degree")]
        degree: usize,
    },
    File {
        input_path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    FigureEightEps {
        epsilon: f64,
    },
    WavePerturb {
        epsilon: f64,
        #[serde(default)]
        base: WaveBase,
    },
    FromFile {
        input_path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Convexity,
    TypeI,
    Circularity,
    Barrier,
    AreaFloor,
    Huisken,
    Spectral,
}

impl Analysis {
    pub const ALL: [Analysis; 7] = [
        Analysis::Convexity,
        Analysis::TypeI,
        Analysis::Circularity,
        Analysis::Barrier,
        Analysis::AreaFloor,
        Analysis::Huisken,
        Analysis::Spectral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Convexity => "convexity",
            Analysis::TypeI => "type_i",
            Analysis::Circularity => "circularity",
            Analysis::Barrier => "barrier",
            Analysis::AreaFloor => "area_floor",
            Analysis::Huisken => "huisken",
            Analysis::Spectral => "spectral",
        }
    }
}

fn all_analyses() -> BTreeSet<Analysis> {
    Analysis::ALL.into_iter().collect()
}

/// A scenario description as read from JSON, e.g.
/// `{"kind": "figure_eight_eps", "epsilon": 0.5, "n_points": 512}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default)]
    pub controls: FlowControls,
    #[serde(default = "all_analyses")]
    pub analyses: BTreeSet<Analysis>,
    /// Cut-off scale for the mode analysis; chosen from the run when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    /// Fixed barrier amplitude instead of the automatic choice.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier_epsilon: Option<f64>,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind) -> Self {
        Self {
            kind,
            n_points: default_points(),
            controls: FlowControls::default(),
            analyses: all_analyses(),
            rho: None,
            barrier_epsilon: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < MIN_SCENARIO_POINTS {
            return Err(Error::InvalidParameter(format!(
                "n_points = {} is below {MIN_SCENARIO_POINTS}",
                self.n_points
            )));
        }
        match &self.kind {
            ScenarioKind::FigureEightEps { epsilon } | ScenarioKind::WavePerturb { epsilon, .. } if !(*epsilon > 0.0) => {
                Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")))
            }
            ScenarioKind::WavePerturb {
                base: WaveBase::RandomFourier { ambient_dim, .. },
                ..
            } if *ambient_dim < 3 => Err(Error::InvalidParameter(format!(
                "wave bases need ambient_dim >= 3, got {ambient_dim}"
            ))),
            _ => Ok(()),
        }
    }

    /// The initial curve. Relative file paths resolve against `base_dir`.
    pub fn build_curve(&self, base_dir: &Path) -> Result<Curve<f64>> {
        self.validate()?;
        let n = self.n_points;
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) };
        match &self.kind {
            ScenarioKind::Circle { radius } => make_circle(n, *radius),
            ScenarioKind::Ellipse { a, b } => make_ellipse(n, *a, *b),
            ScenarioKind::FigureEightEps { epsilon } => make_figure_eight(*epsilon, n),
            ScenarioKind::FromFile { input_path } => read_curve(&resolve(input_path)),
            ScenarioKind::WavePerturb { epsilon, base } => {
                let base = match base {
                    WaveBase::FigureEight => Curve::from_fn(n, |u: f64| vec![u.cos(), 0.0, (2.0 * u).sin()])?,
                    WaveBase::Circle { radius } => make_circle(n, *radius)?,
                    WaveBase::RandomFourier {
                        seed,
                        ambient_dim,
                        degree,
                    } => random_fourier_curve(*seed, *ambient_dim, *degree, n)?,
                    WaveBase::File { input_path } => read_curve(&resolve(input_path))?,
                };
                make_wave_perturbation(&base, *epsilon)
            }
        }
    }
}
