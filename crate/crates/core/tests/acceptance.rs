//! End-to-end acceptance criteria. Runs without the libtest harness so every
//! criterion prints a single PASS/FAIL line even when everything passes.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use csf_lab::barrier::{f_of_t, subsolution_residual, BarrierField, ExtremaTrack, SpaceTimeGrid};
use csf_lab::curve::fit_circle;
use csf_lab::flow::{evolve, type_i_report, FlowControls, Trajectory, TypeIVerdict};
use csf_lab::projection::projection_report;
use csf_lab::scenario::{
    analyze_trajectory, make_circle, make_ellipse, make_figure_eight, make_wave_perturbation, random_fourier_curve,
    Analysis, AnalysisOptions, RunAnalysis,
};
use csf_lab::spectral::{
    apply_shifted_ou, cutoff, hermite_phi, inner_product, mode_evolution_fn, mode_split, norm, GaussianQuadrature,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self {
            pass,
            detail: detail.into(),
        }
    }
}

struct Run {
    label: String,
    traj: Trajectory<f64>,
    analysis: RunAnalysis,
    elapsed: Duration,
}

fn run(label: &str, curve: csf_lab::Curve) -> Run {
    let start = Instant::now();
    let traj = evolve(&curve, &FlowControls::default()).expect("evolution failed");
    let all: BTreeSet<Analysis> = Analysis::ALL.into_iter().collect();
    let analysis = analyze_trajectory(&traj, &all, &AnalysisOptions::default());
    Run {
        label: label.into(),
        traj,
        analysis,
        elapsed: start.elapsed(),
    }
}

const EPSILONS: [f64; 3] = [0.25, 0.5, 1.0];

fn circle_law(circle: &Run) -> Outcome {
    let traj = &circle.traj;
    let mut worst_r: f64 = 0.0;
    for f in traj.frames.iter().filter(|f| f.t <= 0.45) {
        let r = fit_circle(&f.curve).map(|c| c.radius).unwrap_or(f64::NAN);
        worst_r = worst_r.max((r - (1.0 - 2.0 * f.t).sqrt()).abs());
    }
    let covers = traj.frames.iter().any(|f| f.t >= 0.45);
    let t_ext = traj.t_estimate.unwrap_or(f64::NAN);
    let (worst_ratio, frames) = match type_i_report(traj) {
        Ok(rep) => (
            rep.ratio_series.iter().map(|&(_, r)| (r - 0.5).abs()).fold(0.0, f64::max),
            rep.ratio_series.len(),
        ),
        Err(_) => (f64::NAN, 0),
    };
    Outcome::new(
        covers && worst_r <= 1e-3 && (t_ext - 0.5).abs() <= 1e-3 && worst_ratio <= 1e-3 && frames > 0,
        format!(
            "max |r - sqrt(1-2t)| = {worst_r:.2e}, T = {t_ext:.6}, max |ratio - 1/2| = {worst_ratio:.2e} over {frames} frames, {:.1}s",
            circle.elapsed.as_secs_f64()
        ),
    )
}

fn roundness(ellipse: &Run) -> Outcome {
    let m = &ellipse.analysis.metrics;
    let rms = m.circle_fit_rms.unwrap_or(f64::NAN);
    let axis = m.axis_ratio.unwrap_or(f64::NAN);
    Outcome::new(
        rms <= 0.02 && (axis - 1.0).abs() <= 0.02,
        format!("circle-fit rms {rms:.2e}, axis ratio {axis:.4}, {:.1}s", ellipse.elapsed.as_secs_f64()),
    )
}

fn figure_eight_convergence(runs: &[Run]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        let bad = r.traj.frames.iter().filter(|f| !projection_report(&f.curve).passes()).count();
        let (verdict, terminal) = match type_i_report(&r.traj) {
            Ok(rep) => (rep.verdict, rep.terminal_ratio),
            Err(_) => (TypeIVerdict::Inconclusive, f64::NAN),
        };
        let m = &r.analysis.metrics;
        let rms = m.circle_fit_rms.unwrap_or(f64::NAN);
        let mult = m.multiplicity.unwrap_or(0);
        let bands = m.persistence.is_some_and(|p| p.holds);
        let (mr, dr) = m.persistence.map_or((f64::NAN, f64::NAN), |p| (p.worst_m_ratio, p.worst_delta_ratio));
        let ok = bad == 0
            && verdict == TypeIVerdict::TypeIBounded
            && (0.4..=0.6).contains(&terminal)
            && rms <= 0.05
            && mult == 1
            && bands;
        pass &= ok;
        parts.push(format!(
            "{}: {bad} non-convex frames, {verdict:?} terminal {terminal:.3}, rms {rms:.1e} x{mult}, M {mr:.4} delta {dr:.4}, {:.1}s",
            r.label,
            r.elapsed.as_secs_f64()
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn barrier_suite(circle: &Run, eights: &[Run]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();

    // analytic circle track: x_max = -x_min = sqrt(2(T - t))
    let t_ext = 0.5;
    let nodes = 20001;
    let t: Vec<f64> = (0..nodes).map(|i| 0.45 * i as f64 / (nodes - 1) as f64).collect();
    let hi: Vec<f64> = t.iter().map(|&s| (2.0 * (t_ext - s)).sqrt()).collect();
    let lo: Vec<f64> = hi.iter().map(|v| -v).collect();
    let track = ExtremaTrack::from_samples(t.clone(), hi, lo).unwrap();
    let f = f_of_t(&track, t_ext).unwrap();
    let c = std::f64::consts::PI.powi(2) / 8.0 - 0.5;
    let worst_f = (1..nodes)
        .map(|j| {
            let want = c * (t_ext / (t_ext - t[j])).ln();
            ((f[j] - want) / want).abs()
        })
        .fold(0.0, f64::max);
    let ok_f = f[0] == 0.0 && worst_f <= 1e-4;
    pass &= ok_f;
    parts.push(format!("f rel err {worst_f:.1e}"));

    let field = BarrierField::new(track, t_ext, 1.0).unwrap();
    let grid = SpaceTimeGrid::spanning(&field, 200, 200, 0.45).unwrap();
    let coarse = subsolution_residual(&field, &grid).unwrap();
    let fine = subsolution_residual(&field, &grid.refined()).unwrap();
    let ok_res = coarse.max_residual_offcenter <= 1e-2
        && fine.max_residual_offcenter <= coarse.max_residual_offcenter / 2.0 + 1e-12;
    let ok_side = coarse.onesided_ok_at_zero
        && fine.onesided_ok_at_zero
        && coarse.worst_onesided_error <= 5.0 * grid.h
        && fine.worst_onesided_error <= 5.0 * grid.refined().h;
    pass &= ok_res && ok_side;
    parts.push(format!(
        "residual {:.2e} -> {:.2e} (signed max {:.1e} -> {:.1e}), one-sided err {:.1e} (5h = {:.1e})",
        coarse.max_residual_offcenter,
        fine.max_residual_offcenter,
        coarse.raw_max,
        fine.raw_max,
        coarse.worst_onesided_error,
        5.0 * grid.h
    ));

    for r in std::iter::once(circle).chain(eights) {
        match &r.analysis.barrier {
            Some(b) => {
                let ok = b.holds && b.min_slack >= 0.0;
                pass &= ok;
                parts.push(format!("{}: eps {:.3}, min_slack {:.1e}", r.label, b.epsilon, b.min_slack));
            }
            None => {
                pass = false;
                parts.push(format!("{}: no barrier report", r.label));
            }
        }
    }
    Outcome::new(pass, parts.join("; "))
}

fn area_floor(eights: &[Run]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in eights {
        let m = &r.analysis.metrics;
        let span = m.tau_span.unwrap_or(0.0);
        let d0 = m.area_delta0.unwrap_or(f64::NAN);
        let err = m.area_split_error.unwrap_or(f64::NAN);
        let ok = span >= 2.0 && d0 > 0.0 && err <= 1e-6;
        pass &= ok;
        parts.push(format!("{}: tau span {span:.2}, delta0 {d0:.3e}, split err {err:.1e}", r.label));
    }
    Outcome::new(pass, parts.join("; "))
}

fn monotonicity(runs: &[&Run]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in runs {
        match r.analysis.metrics.huisken {
            Some(m) => {
                pass &= m.holds;
                parts.push(format!("{}: worst step {:+.1e}", r.label, m.worst_relative_increase));
            }
            None => {
                pass = false;
                parts.push(format!("{}: not evaluated", r.label));
            }
        }
    }
    Outcome::new(pass, parts.join("; "))
}

fn spectral_suite() -> Outcome {
    let start = Instant::now();
    let q = GaussianQuadrature::<f64>::standard();
    let h = q.nodes[1] - q.nodes[0];
    let phi: Vec<Vec<f64>> = (1..=6).map(|i| q.sample(|x| hermite_phi(i, x))).collect();

    let mut ortho: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            let want = if i == j { 1.0 } else { 0.0 };
            ortho = ortho.max((inner_product(&q, &phi[i], &phi[j]) - want).abs());
        }
    }

    // -L φ_i = λ_i φ_i with λ = -1, 0, 1
    let mut eigen: f64 = 0.0;
    for (i, lambda) in [(0usize, -1.0), (1, 0.0), (2, 1.0)] {
        let l = apply_shifted_ou(&phi[i], q.nodes[0], h);
        for (lv, p) in l.iter().zip(&phi[i]) {
            eigen = eigen.max((-lv - lambda * p).abs());
        }
    }

    let a = [0.7, -1.3, 0.4, 2.1, -0.9, 0.35];
    let f: Vec<f64> = (0..q.order())
        .map(|k| a.iter().zip(&phi).map(|(c, p)| c * p[k]).sum())
        .collect();
    let split = mode_split(&q, &f).unwrap();
    let tail_want = a[2..].iter().map(|c| c * c).sum::<f64>().sqrt();
    let parseval = (split.c_minus1 - a[0])
        .abs()
        .max((split.c_0 - a[1]).abs())
        .max((split.tail_norm - tail_want).abs())
        .max((split.c_minus1.powi(2) + split.c_0.powi(2) + split.tail_norm.powi(2) - split.total_norm.powi(2)).abs());

    let tau: Vec<f64> = (0..=40).map(|k| 0.05 * k as f64).collect();
    let ev = mode_evolution_fn(
        &q,
        &tau,
        |x, t| 0.8 * t.exp() * hermite_phi(1, x) + 0.5 * hermite_phi(2, x) + 1.2 * (-t).exp() * hermite_phi(3, x),
        5.0,
    )
    .unwrap();
    let g = ev.growth_minus1.unwrap_or(f64::NAN);
    let drift = ev.max_drift_0 / ev.splits[0].c_0.abs();
    let tail = ev.tail_log_slope.unwrap_or(f64::NAN);
    let rates = (g - 1.0).abs().max(drift).max((tail + 1.0).abs());

    let mut cut_ok = true;
    let mut cut = Vec::new();
    for rho in [3.0, 4.0, 5.0] {
        let d: Vec<f64> = q.nodes.iter().map(|&x| cutoff(x / rho) * x - x).collect();
        let e = norm(&q, &d);
        let bound = 10.0 * (-rho * rho / 4.0f64).exp();
        cut_ok &= e <= bound;
        cut.push(format!("{e:.1e}/{bound:.1e}"));
    }
    let elapsed = start.elapsed();
    Outcome::new(
        ortho <= 1e-10 && eigen <= 5.0 * h * h && parseval <= 1e-10 && rates <= 2e-2 && cut_ok && elapsed.as_secs() <= 10,
        format!(
            "orthonormality {ortho:.1e}, eigen {eigen:.1e} (5h^2 = {:.1e}), Parseval {parseval:.1e}, rates {{{g:.4}, {drift:.1e}, {tail:.4}}}, cutoff {}, {:.2}s",
            5.0 * h * h,
            cut.join(" "),
            elapsed.as_secs_f64()
        ),
    )
}

fn wave_property() -> Outcome {
    let start = Instant::now();
    let check = |seed: u64| -> csf_lab::Result<(usize, usize)> {
        let base: csf_lab::Curve = random_fourier_curve(seed, 3, 5, 256)?;
        let wave = make_wave_perturbation(&base, 0.2)?;
        let traj = evolve(&wave, &FlowControls::default())?;
        let mut bad = usize::from(!projection_report(&wave).passes());
        bad += traj.frames.iter().filter(|f| !projection_report(&f.curve).passes()).count();
        Ok((bad, traj.frames.len()))
    };
    let results: Vec<_> = (0..20u64).map(|seed| (seed, check(seed).map_err(|e| e.to_string()))).collect();
    let mut pass = true;
    let mut frames = 0;
    let mut failures = Vec::new();
    for (seed, r) in results {
        match r {
            Ok((0, n)) => frames += n,
            Ok((bad, _)) => {
                pass = false;
                failures.push(format!("seed {seed}: {bad} failing frames"));
            }
            Err(e) => {
                pass = false;
                failures.push(format!("seed {seed}: {e}"));
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs() <= 600;
    Outcome::new(
        pass,
        format!(
            "20 bases, {frames} frames checked{}{}, {:.1}s",
            if failures.is_empty() { "" } else { "; " },
            failures.join("; "),
            elapsed.as_secs_f64()
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let circle = run("circle", make_circle(256, 1.0).unwrap());
    let ellipse = run("ellipse", make_ellipse(256, 2.0, 1.0).unwrap());
    let eights: Vec<Run> = EPSILONS
        .iter()
        .map(|&e| run(&format!("eps={e}"), make_figure_eight(e, 512).unwrap()))
        .collect();

    let eight_time: f64 = eights.iter().map(|r| r.elapsed.as_secs_f64()).sum();
    let mut criteria: Vec<(&str, Outcome)> = vec![
        ("circle exact solution", {
            let mut o = circle_law(&circle);
            o.pass &= circle.elapsed.as_secs() <= 30;
            o
        }),
        ("planar roundness of a 2:1 ellipse", {
            let mut o = roundness(&ellipse);
            o.pass &= ellipse.elapsed.as_secs() <= 120;
            o
        }),
        ("perturbed figure-eight convergence", {
            let mut o = figure_eight_convergence(&eights);
            o.pass &= eight_time <= 600.0;
            o
        }),
    ];
    criteria.push(("barrier suite", barrier_suite(&circle, &eights)));
    criteria.push(("area floor", area_floor(&eights)));
    let convex: Vec<&Run> = std::iter::once(&circle).chain(Some(&ellipse)).chain(&eights).collect();
    criteria.push(("huisken monotonicity", monotonicity(&convex)));
    criteria.push(("spectral suite", spectral_suite()));
    criteria.push(("wave perturbation keeps a convex projection", wave_property()));

    let mut failed = 0;
    for (i, (name, o)) in criteria.iter().enumerate() {
        println!("{} [{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
