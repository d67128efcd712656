use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use csf_lab::barrier::{barrier_report, BarrierSettings};
use csf_lab::curve::{fit_circle, resample_equal_arclength};
use csf_lab::flow::{evolve, huisken_functional, rescaled_frames, FlowControls, StopReason, Trajectory};
use csf_lab::io::{read_curve, read_trajectory, write_json, write_modes_csv, write_trajectory};
use csf_lab::projection::projection_report;
use csf_lab::scenario::{
    analyze_trajectory, huisken_monotonicity, run_scenario, write_analysis, Analysis, AnalysisOptions,
    Check, ScenarioKind, ScenarioSpec, Verdict, WaveBase, HUISKEN_RELATIVE_SLACK,
};
use csf_lab::spectral::{
    apply_shifted_ou, cutoff, hermite_phi, inner_product, mode_evolution_fn, mode_split_fn, GaussianQuadrature,
};

#[derive(Parser)]
#[command(name = "csf-lab", version, about = "Curve shortening flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct Common {
    /// Redistribute the input to this many vertices first.
    #[arg(long)]
    n_points: Option<usize>,
    #[arg(long, default_value_t = 0.2)]
    dt_cfl: f64,
    #[arg(long, default_value_t = 10)]
    resample_every: usize,
    #[arg(long, default_value_t = 1e-3)]
    stop_diameter_frac: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Curve JSON, trajectory directory or scenario JSON, depending on the command.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Format of the verdict summary printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl Common {
    fn controls(&self) -> FlowControls {
        FlowControls {
            dt_cfl: self.dt_cfl,
            resample_every: self.resample_every,
            stop_diameter_frac: self.stop_diameter_frac,
            ..Default::default()
        }
    }

    fn input(&self) -> anyhow::Result<&Path> {
        self.input.as_deref().context("--input is required for this command")
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Circle,
    Ellipse,
    FigureEightEps,
    WavePerturb,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a curve JSON file and write a trajectory directory.
    Evolve(Common),
    /// Rescale a trajectory directory about its extinction point.
    Rescale(Common),
    /// Run every diagnostic on a trajectory directory, or report on a single curve JSON.
    Analyze(Common),
    /// Barrier construction and comparison certificate for a trajectory directory.
    Barrier(Common),
    /// Mode series of a trajectory directory, or the built-in spectral checks without --input.
    Spectral {
        #[command(flatten)]
        common: Common,
        /// Cut-off scale; chosen from the run when absent.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Run a scenario from a JSON spec (--input) or from --kind.
    Scenario {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
    },
}

#[derive(Serialize)]
struct Outcome {
    checks: BTreeMap<String, Check>,
    passes: bool,
}

impl Outcome {
    fn new(checks: BTreeMap<String, Check>) -> Self {
        let passes = checks
            .values()
            .all(|c| matches!(c.verdict, Verdict::Pass | Verdict::NotApplicable));
        Self { checks, passes }
    }

    fn single(name: &str, pass: bool, detail: String) -> Self {
        let verdict = if pass { Verdict::Pass } else { Verdict::Fail };
        Self::new(BTreeMap::from([(name.to_string(), Check { verdict, detail })]))
    }

    fn print(&self, format: Format) -> anyhow::Result<()> {
        match format {
            Format::Json => writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(self)?)?,
            Format::Csv => {
                let mut w = csv::Writer::from_writer(std::io::stdout());
                w.write_record(["check", "verdict", "detail"])?;
                for (name, c) in &self.checks {
                    let v = serde_json::to_value(c.verdict)?;
                    w.write_record([name.as_str(), v.as_str().unwrap_or(""), c.detail.as_str()])?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

fn stop_check(traj: &Trajectory<f64>) -> Check {
    Check {
        verdict: if traj.stopped_reason == StopReason::ExtinctionThreshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        detail: format!("{:?} after {} steps, T = {:?}", traj.stopped_reason, traj.steps(), traj.t_estimate),
    }
}

fn cmd_evolve(c: &Common) -> anyhow::Result<Outcome> {
    let mut curve = read_curve(c.input()?)?;
    if let Some(n) = c.n_points {
        curve = resample_equal_arclength(&curve, n)?;
    }
    let traj = evolve(&curve, &c.controls())?;
    write_trajectory(&c.out, &traj, None)?;
    let analysis = analyze_trajectory(&traj, &BTreeSet::from([Analysis::TypeI]), &AnalysisOptions::default());
    write_analysis(&c.out, &traj, &analysis, None)?;
    let mut checks = analysis.checks;
    checks.insert("stop".into(), stop_check(&traj));
    Ok(Outcome::new(checks))
}

fn cmd_rescale(c: &Common) -> anyhow::Result<Outcome> {
    let (traj, _) = read_trajectory(c.input()?)?;
    let states = rescaled_frames(&traj, &traj.extinction_point, traj.last_certifiable())?;
    fs::create_dir_all(&c.out)?;
    let mut w = csv::Writer::from_path(c.out.join("rescaled.csv"))?;
    let first = &states.first().context("no frame before the extinction time")?.curve;
    let mut header = vec!["tau".to_string(), "huisken".to_string()];
    for i in 0..first.len() {
        for k in 0..first.dim() {
            header.push(format!("p{i}_{k}"));
        }
    }
    w.write_record(&header)?;
    let mut hs = Vec::with_capacity(states.len());
    for s in &states {
        let h = huisken_functional(&s.curve);
        hs.push(h);
        let mut row = vec![format!("{:?}", s.tau), format!("{h:?}")];
        row.extend(s.curve.coords().iter().map(|v| format!("{v:?}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    let m = huisken_monotonicity(&hs, HUISKEN_RELATIVE_SLACK);
    Ok(Outcome::single(
        "huisken",
        m.holds,
        format!("{} frames, worst relative step {:.3e}", hs.len(), m.worst_relative_increase),
    ))
}

fn cmd_analyze(c: &Common) -> anyhow::Result<Outcome> {
    let input = c.input()?;
    if input.is_dir() {
        let (traj, _) = read_trajectory(input)?;
        let all: BTreeSet<Analysis> = Analysis::ALL.into_iter().collect();
        let opts = AnalysisOptions {
            rho: None,
            barrier_epsilon: c.epsilon,
        };
        let analysis = analyze_trajectory(&traj, &all, &opts);
        write_analysis(&c.out, &traj, &analysis, None)?;
        return Ok(Outcome::new(analysis.checks));
    }
    let curve = read_curve(input)?;
    let report = projection_report(&curve);
    let fit = fit_circle(&curve)?;
    fs::create_dir_all(&c.out)?;
    write_json(
        &c.out.join("curve_report.json"),
        &serde_json::json!({ "projection": report, "circle_fit": fit }),
    )?;
    Ok(Outcome::single(
        "convexity",
        report.passes(),
        format!(
            "convex {}, injective {}, M {:?}, delta {:.4}",
            report.is_convex, report.is_injective, report.slope_constant_m, report.horizontal_floor_delta
        ),
    ))
}

fn cmd_barrier(c: &Common) -> anyhow::Result<Outcome> {
    let (traj, _) = read_trajectory(c.input()?)?;
    let settings = BarrierSettings {
        epsilon: c.epsilon,
        ..Default::default()
    };
    let rep = barrier_report(&traj, &settings)?;
    fs::create_dir_all(&c.out)?;
    write_json(&c.out.join("barrier_report.json"), &rep)?;
    Ok(Outcome::single(
        "barrier",
        rep.passes(),
        format!(
            "epsilon {:.4}, min slack {:.3e}, residual {:.3e}, one-sided ok {}",
            rep.epsilon, rep.min_slack, rep.max_residual_offcenter, rep.onesided_ok_at_zero
        ),
    ))
}

fn spectral_self_checks() -> anyhow::Result<Outcome> {
    let q = GaussianQuadrature::<f64>::standard();
    let h = q.spacing.unwrap_or(0.0);
    let mut checks = BTreeMap::new();
    let mut put = |name: &str, pass: bool, detail: String| {
        let verdict = if pass { Verdict::Pass } else { Verdict::Fail };
        checks.insert(name.to_string(), Check { verdict, detail });
    };

    let phi: Vec<Vec<f64>> = (1..=3).map(|i| q.sample(|x| hermite_phi(i, x))).collect();
    let mut ortho: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((inner_product(&q, &phi[i], &phi[j]) - want).abs());
        }
    }
    put("orthonormality", ortho <= 1e-10, format!("max deviation {ortho:.2e}"));

    let mut eig: f64 = 0.0;
    for (i, f) in phi.iter().enumerate() {
        let lf = apply_shifted_ou(f, q.nodes[0], h);
        let lambda = 1.0 - i as f64;
        eig = eig.max(lf.iter().zip(f).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max));
    }
    put("eigen_relations", eig <= 5.0 * h * h, format!("max residual {eig:.2e} vs {:.2e}", 5.0 * h * h));

    let s = mode_split_fn(&q, |x| x * x + 0.3 * x + 2.0)?;
    let gap = (s.c_minus1.powi(2) + s.c_0.powi(2) + s.tail_norm.powi(2) - s.total_norm.powi(2)).abs();
    put("parseval", gap <= 1e-10, format!("gap {gap:.2e}"));

    let taus: Vec<f64> = (0..21).map(|i| 0.05 * i as f64).collect();
    let grow = mode_evolution_fn(&q, &taus, |_, t| t.exp(), 3.0)?.growth_minus1.unwrap_or(f64::NAN);
    let drift = mode_evolution_fn(&q, &taus, |x, _| x, 3.0)?.max_drift_0;
    let decay = mode_evolution_fn(&q, &taus, |x, t| (-t).exp() * hermite_phi(3, x), 4.0)?
        .tail_log_slope
        .unwrap_or(f64::NAN);
    put(
        "mode_rates",
        (grow - 1.0).abs() <= 2e-2 && drift <= 1e-6 && (decay + 1.0).abs() <= 2e-2,
        format!("growth {grow:.5}, neutral drift {drift:.1e}, tail slope {decay:.5}"),
    );

    let mut worst = f64::NEG_INFINITY;
    for rho in [3.0, 4.0, 5.0] {
        let d = q.sample(|x| x * cutoff(x / rho) - x);
        let n = inner_product(&q, &d, &d).sqrt();
        worst = worst.max(n / (10.0 * (-rho * rho / 4.0f64).exp()));
    }
    put("cutoff_tail", worst <= 1.0, format!("largest ratio to the bound {worst:.3e}"));
    Ok(Outcome::new(checks))
}

fn cmd_spectral(c: &Common, rho: Option<f64>) -> anyhow::Result<Outcome> {
    let Some(input) = &c.input else {
        return spectral_self_checks();
    };
    let (traj, _) = read_trajectory(input)?;
    let analysis = analyze_trajectory(
        &traj,
        &BTreeSet::from([Analysis::Spectral]),
        &AnalysisOptions {
            rho,
            barrier_epsilon: None,
        },
    );
    if let Some(modes) = &analysis.modes {
        fs::create_dir_all(&c.out)?;
        write_modes_csv(&c.out.join("modes.csv"), modes)?;
    }
    Ok(Outcome::new(analysis.checks))
}

fn cmd_scenario(c: &Common, kind: Option<Kind>, radius: f64, a: f64, b: f64) -> anyhow::Result<Outcome> {
    let (mut spec, base_dir) = match (&c.input, kind) {
        (Some(path), _) => {
            let spec: ScenarioSpec = serde_json::from_slice(&fs::read(path)?)
                .with_context(|| format!("reading scenario {}", path.display()))?;
            (spec, path.parent().unwrap_or(Path::new(".")).to_path_buf())
        }
        (None, Some(k)) => {
            let eps = c.epsilon.unwrap_or(0.5);
            let kind = match k {
                Kind::Circle => ScenarioKind::Circle { radius },
                Kind::Ellipse => ScenarioKind::Ellipse { a, b },
                Kind::FigureEightEps => ScenarioKind::FigureEightEps { epsilon: eps },
                Kind::WavePerturb => ScenarioKind::WavePerturb {
                    epsilon: eps,
                    base: WaveBase::FigureEight,
                },
            };
            let mut spec = ScenarioSpec::new(kind);
            spec.controls = c.controls();
            (spec, PathBuf::from("."))
        }
        (None, None) => bail!("give a scenario JSON with --input or a --kind"),
    };
    if let Some(n) = c.n_points {
        spec.n_points = n;
    }
    let summary = run_scenario(&spec, &base_dir, &c.out)?;
    Ok(Outcome::new(summary.checks))
}

fn run(cli: Cli) -> anyhow::Result<(Outcome, Format)> {
    Ok(match &cli.command {
        Command::Evolve(c) => (cmd_evolve(c)?, c.format),
        Command::Rescale(c) => (cmd_rescale(c)?, c.format),
        Command::Analyze(c) => (cmd_analyze(c)?, c.format),
        Command::Barrier(c) => (cmd_barrier(c)?, c.format),
        Command::Spectral { common, rho } => (cmd_spectral(common, *rho)?, common.format),
        Command::Scenario {
            common,
            kind,
            radius,
            a,
            b,
        } => (cmd_scenario(common, *kind, *radius, *a, *b)?, common.format),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok((outcome, format)) => {
            if let Err(e) = outcome.print(format) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if outcome.passes {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
