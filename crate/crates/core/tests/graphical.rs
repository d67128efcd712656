use csf_lab::flow::{evolve_rescaled, graphical_rescaled_step, GraphicalState, RescaledState};
use csf_lab::projection::branch_split;
use csf_lab::scenario::make_ellipse;

fn upper(state: &RescaledState<f64>) -> impl Fn(f64) -> f64 {
    let d = branch_split(&state.curve, 3).unwrap();
    move |x| d.upper_branch.y_at(x)
}

/// The upper arc of a wide ellipse under the parametric rescaled flow against
/// the graphical equation on `[-2, 2]` fed with the parametric boundary values.
#[test]
fn graphical_and_parametric_rescaled_flow_agree() {
    let span = 0.5;
    let start = make_ellipse::<f64>(512, 4.0, 1.5).unwrap();
    let states = evolve_rescaled(&start, 0.0, span, 0.2, 10, 1).unwrap();

    let (r, m) = (2.0, 81);
    let y0 = upper(&states[0]);
    let mut g = GraphicalState::sample(r, m, &y0, &[]).unwrap();
    let h = g.spacing();
    for w in states.windows(2) {
        let dtau = w[1].tau - w[0].tau;
        let y1 = upper(&w[1]);
        g = graphical_rescaled_step(&g, dtau, &[y1(-r)], &[y1(r)]).unwrap();
    }

    let end = upper(states.last().unwrap());
    let mut sup: f64 = 0.0;
    for (x, y) in g.x.iter().zip(&g.y) {
        if x.abs() <= 1.0 {
            sup = sup.max((y - end(*x)).abs());
        }
    }
    // the arc moved by an O(1) amount, so agreement is not trivial
    assert!((end(0.0) - y0(0.0)).abs() > 0.3);
    assert!(sup <= 5.0 * h * h, "sup diff {sup:e} vs 5h^2 = {:e}", 5.0 * h * h);
}
