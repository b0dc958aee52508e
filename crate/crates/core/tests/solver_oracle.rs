//! Event heights pinned to an independent high-order integration (eighth-order
//! explicit pair at rtol 1e-13 with Brent refinement).

use approx::assert_abs_diff_eq;
use imcf_soliton::model::{validate_params, Equation, Params};
use imcf_soliton::solver::{
    extract_even_events, extract_events, solve, solve_arclength, solve_even, solve_profile, Method, SolveOptions,
};

const TOL: f64 = 1e-8;

// (n, lambda, mu) -> y1, y2, r1, r(0)
const AXIS_ORACLE: [((i64, f64, f64), [f64; 4]); 5] = [
    ((2, 0.7, -1.0), [1.170340980696, 2.990598108660, 1.658158417934, 1.427041360359]),
    ((3, 0.45, -2.0), [2.987234055144, 5.443465025530, 3.324453141329, 2.799740855155]),
    ((3, 0.45, -1.0), [1.493617027573, 2.721732512765, 1.662226570665, 1.399870427577]),
    ((2, 0.625, -1.0), [0.626668889681, 2.169234981852, 1.384202032671, 1.287531797000]),
    ((2, 0.9, -0.5), [2.048788666217, 3.356355081595, 1.319211183750, 0.869940310016]),
];

// n = 2: lambda -> y2 for r1 = 0.5, 1, 2
const EVEN_ORACLE: [(f64, [f64; 3]); 3] = [
    (0.6, [0.5829503632536684, 1.1659007265073256, 2.3318014530146707]),
    (0.7, [0.6106901873009335, 1.2213803746016647, 2.442760749203736]),
    (0.8, [0.628889377463935, 1.2577787549277855, 2.515557509855741]),
];

fn params(c: (i64, f64, f64)) -> Params {
    validate_params(c.0, c.1, c.2, false).unwrap()
}

#[test]
fn chart_switch_events_match_oracle() {
    for (case, [y1, y2, r1, r0]) in AXIS_ORACLE {
        let p = params(case);
        let o = SolveOptions::for_params(&p);
        let profile = solve_profile(&p, &o).unwrap();
        let e = extract_events(&profile, &p, o.tols.event_tol).unwrap();
        assert_abs_diff_eq!(e.y1, y1, epsilon = TOL);
        assert_abs_diff_eq!(e.y2, y2, epsilon = TOL);
        assert_abs_diff_eq!(e.r1, r1, epsilon = TOL);
        assert_abs_diff_eq!(profile.radius_at(0.0).unwrap(), r0, epsilon = TOL);
        assert_abs_diff_eq!(e.kappa0, p.kappa0(), epsilon = 1e-15);
    }
}

#[test]
fn arclength_events_match_oracle() {
    for (case, [y1, y2, r1, _]) in AXIS_ORACLE {
        let p = params(case);
        let o = SolveOptions::for_params(&p);
        let profile = solve_arclength(&p, &o).unwrap();
        let e = extract_events(&profile, &p, o.tols.event_tol).unwrap();
        assert_abs_diff_eq!(e.y1, y1, epsilon = 1e-7);
        assert_abs_diff_eq!(e.y2, y2, epsilon = 1e-7);
        assert_abs_diff_eq!(e.r1, r1, epsilon = 1e-7);
    }
}

#[test]
fn even_inflections_match_oracle() {
    for (lambda, y2s) in EVEN_ORACLE {
        let eq = Equation::validate(2, lambda, false).unwrap();
        for (r1, y2) in [0.5, 1.0, 2.0].into_iter().zip(y2s) {
            let o = SolveOptions::for_even(r1);
            let profile = solve_even(&eq, r1, &o).unwrap();
            let e = extract_even_events(&profile, o.tols.event_tol).unwrap();
            assert_eq!(e.y1, 0.0);
            assert_abs_diff_eq!(e.r1, r1, epsilon = 1e-15);
            assert_abs_diff_eq!(e.y2, y2, epsilon = TOL);
        }
    }
}

#[test]
fn scaling_in_mu_is_homothetic() {
    // the equation is invariant under (r, y) -> (c r, c y), so events scale with |mu|
    let solve_events = |mu: f64| {
        let p = params((3, 0.45, mu));
        let o = SolveOptions::for_params(&p);
        extract_events(&solve_profile(&p, &o).unwrap(), &p, o.tols.event_tol).unwrap()
    };
    let (a, b) = (solve_events(-1.0), solve_events(-2.0));
    assert_abs_diff_eq!(b.y1, 2.0 * a.y1, epsilon = 2.0 * TOL);
    assert_abs_diff_eq!(b.y2, 2.0 * a.y2, epsilon = 2.0 * TOL);
    assert_abs_diff_eq!(b.r1, 2.0 * a.r1, epsilon = 2.0 * TOL);
}

#[test]
fn solve_dispatches_on_method() {
    let p = params((2, 0.7, -1.0));
    let o = SolveOptions::for_params(&p);
    let chart = solve(&p, &SolveOptions { method: Method::ChartSwitch, ..o }).unwrap();
    let both = solve(&p, &SolveOptions { method: Method::Both, ..o }).unwrap();
    let arc = solve(&p, &SolveOptions { method: Method::ArcLength, ..o }).unwrap();
    assert_eq!(chart, both);
    assert_ne!(chart.method, arc.method);
}

#[test]
fn start_is_on_the_axis() {
    let p = params((2, 0.7, -1.0));
    let o = SolveOptions::for_params(&p);
    let profile = solve_profile(&p, &o).unwrap();
    let first = profile.samples[0];
    assert_abs_diff_eq!(first.r, o.h0, epsilon = 1e-20);
    assert_abs_diff_eq!(first.y, -1.0, epsilon = 1e-11);
    assert!(profile.samples.windows(2).all(|w| w[1].y > w[0].y));
    assert!(profile.y_max >= o.y_max * (1.0 - 1e-12));
}

#[test]
fn invalid_inputs_are_rejected_before_solving() {
    assert_eq!(validate_params(2, 0.5, -1.0, false).unwrap_err().code(), "LAMBDA_OUT_OF_RANGE");
    assert_eq!(validate_params(2, 1.0, -1.0, true).unwrap_err().code(), "LAMBDA_OUT_OF_RANGE");
    assert_eq!(validate_params(2, 0.7, 0.0, false).unwrap_err().code(), "MU_NONNEGATIVE");
    assert_eq!(validate_params(1, 0.7, -1.0, false).unwrap_err().code(), "DIMENSION_TOO_SMALL");
    let p = params((2, 0.7, -1.0));
    let bad = SolveOptions { h0: 0.5, ..SolveOptions::for_params(&p) };
    assert_eq!(solve_profile(&p, &bad).unwrap_err().code(), "H0_OUT_OF_RANGE");
}
