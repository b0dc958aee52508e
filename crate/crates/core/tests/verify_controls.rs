//! Negative controls: every check passes on a clean profile and fails on a
//! profile corrupted in the one way it is meant to catch.

use imcf_soliton::model::{validate_params, CheckStatus, Profile, VerificationReport};
use imcf_soliton::solver::{extract_events, solve_profile, Method, SolveOptions};
use imcf_soliton::verify::{cross_validate, property_suite, residual_check, DEFAULT_GRID};

const TOL: f64 = 1e-10;

fn clean() -> Profile {
    let p = validate_params(2, 0.625, -0.5, false).unwrap();
    solve_profile(&p, &SolveOptions::for_params(&p)).unwrap()
}

fn events(profile: &Profile) -> (f64, f64) {
    let p = validate_params(2, 0.625, -0.5, false).unwrap();
    let e = extract_events(profile, &p, TOL).unwrap();
    (e.y1, e.y2)
}

fn status(report: &VerificationReport, name: &str) -> CheckStatus {
    report.get(name).unwrap_or_else(|| panic!("missing check {name}")).status
}

fn assert_fails(profile: &Profile, name: &str) {
    let report = property_suite(profile, TOL);
    assert_eq!(status(&report, name), CheckStatus::Fail, "{name} not caught: {:?}", report.get(name));
    assert!(!report.overall());
}

fn index_near(profile: &Profile, y: f64) -> usize {
    profile.samples.partition_point(|s| s.y < y)
}

#[test]
fn clean_profile_passes_everything() {
    let report = property_suite(&clean(), TOL);
    for c in &report.checks {
        assert_eq!(c.status, CheckStatus::Pass, "{c:?}");
    }
    assert_eq!(report.checks.len(), 13);
}

#[test]
fn radius_positive_control() {
    let mut p = clean();
    let k = p.samples.len() / 2;
    p.samples[k].r = -p.samples[k].r;
    assert_fails(&p, "radius_positive");
}

#[test]
fn support_positive_control() {
    let mut p = clean();
    let k = index_near(&p, 5.0);
    p.samples[k].r_y = 2.0 * p.samples[k].r / p.samples[k].y;
    assert_fails(&p, "support_positive");
}

#[test]
fn support_margin_control() {
    let mut p = clean();
    let (_, y2) = events(&p);
    let k = index_near(&p, 2.0 * y2);
    p.samples[k].r_y = 2.0 * p.samples[k].r / p.samples[k].y;
    assert_fails(&p, "support_margin_window");
}

#[test]
fn event_y1_control() {
    let mut p = clean();
    let (y1, _) = events(&p);
    p.samples.truncate(index_near(&p, 0.5 * y1));
    assert_fails(&p, "event_y1");
}

#[test]
fn event_y2_control() {
    let mut p = clean();
    let (y1, y2) = events(&p);
    p.samples.truncate(index_near(&p, 0.5 * (y1 + y2)));
    assert_fails(&p, "event_y2");
}

#[test]
fn sign_r_y_control() {
    let mut p = clean();
    let k = index_near(&p, 10.0);
    p.samples[k].r_y = -p.samples[k].r_y;
    assert_fails(&p, "sign_r_y");
}

#[test]
fn sign_r_yy_control() {
    let mut p = clean();
    let (_, y2) = events(&p);
    let k = index_near(&p, 0.5 * y2);
    p.samples[k].r_yy = -p.samples[k].r_yy;
    assert_fails(&p, "sign_r_yy");
}

#[test]
fn support_monotone_control() {
    let mut p = clean();
    let (y1, _) = events(&p);
    let k = index_near(&p, 0.5 * y1);
    // raise r_y so the support dips at one interior sample
    p.samples[k].r_y += 0.01 / p.samples[k].y;
    assert_fails(&p, "support_monotone");
}

#[test]
fn y1_bound_control() {
    let mut p = clean();
    for s in &mut p.samples {
        s.r *= 1e-3;
        s.r_y *= 1e-3;
        s.r_yy *= 1e-3;
    }
    assert_fails(&p, "y1_bound");
}

#[test]
fn tail_slope_control() {
    let mut p = clean();
    let n = p.samples.len();
    for s in &mut p.samples[n - 3..] {
        s.r_y = -1e-3;
    }
    assert_fails(&p, "tail_slope");
}

#[test]
fn tail_radius_control() {
    let mut p = clean();
    let (_, y2) = events(&p);
    let r2 = p.radius_at(y2).unwrap();
    p.samples.last_mut().unwrap().r = r2;
    assert_fails(&p, "tail_radius");
}

#[test]
fn tail_exponent_control() {
    let mut p = clean();
    let y_end = p.y_max;
    for s in p.samples.iter_mut().filter(|s| s.y > 0.05 * y_end) {
        let f = s.y.sqrt();
        // r * sqrt(y): the fitted exponent drops by one half
        s.r_yy = s.r_yy * f + s.r_y / f - 0.25 * s.r / (f * s.y);
        s.r_y = s.r_y * f + 0.5 * s.r / f;
        s.r *= f;
    }
    assert_fails(&p, "tail_exponent");
}

#[test]
fn start_curvature_control() {
    let mut p = clean();
    p.samples[0].r_yy *= 1.01;
    assert_fails(&p, "start_curvature");
}

#[test]
fn residual_controls() {
    let mut p = clean();
    let clean_summary = residual_check(&p, DEFAULT_GRID).unwrap();
    assert!(clean_summary.max_ode_residual <= 1e-4);
    assert!(clean_summary.max_soliton_residual <= 1e-4);

    let k = index_near(&p, 1.0);
    let y_bad = p.samples[k].y;
    p.samples[k].r += 1e-4;
    let s = residual_check(&p, DEFAULT_GRID).unwrap();
    assert!(s.max_ode_residual >= 1e-1, "{s:?}");
    assert!(s.max_soliton_residual >= 1e-1, "{s:?}");
    assert!((s.worst_y - y_bad).abs() < 0.1, "{s:?}");

    // a tent: slope jumps with continuous radius
    let mut p = clean();
    let y0 = 3.0;
    for s in &mut p.samples {
        s.r += 1e-2 * (0.2 - (s.y - y0).abs()).max(0.0);
    }
    let s = residual_check(&p, DEFAULT_GRID).unwrap();
    assert!(s.max_ode_residual >= 1e-1, "{s:?}");
    assert!((s.worst_y - y0).abs() < 0.3, "{s:?}");
}

#[test]
fn cross_method_control() {
    let solve_mu = |mu: f64| {
        let p = validate_params(2, 0.7, mu, false).unwrap();
        solve_profile(&p, &SolveOptions { method: Method::ChartSwitch, ..SolveOptions::for_params(&p) }).unwrap()
    };
    let d = cross_validate(&solve_mu(-1.0), &solve_mu(-1.1)).unwrap();
    assert!(d.sup_distance >= 1e-3, "{d:?}");
    let same = cross_validate(&solve_mu(-1.0), &solve_mu(-1.0)).unwrap();
    assert_eq!(same.sup_distance, 0.0);
}

#[test]
fn outside_window_is_not_applicable() {
    let p = validate_params(2, 1.5, -1.0, true).unwrap();
    let profile = solve_profile(&p, &SolveOptions::for_params(&p)).unwrap();
    let report = property_suite(&profile, TOL);
    for name in ["sign_r_y", "sign_r_yy", "support_margin_window", "y1_bound", "tail_slope"] {
        assert_eq!(status(&report, name), CheckStatus::NotApplicable, "{name}");
    }
}

#[test]
fn reports_are_reproducible() {
    let p = clean();
    assert_eq!(property_suite(&p, TOL), property_suite(&p, TOL));
    assert_eq!(residual_check(&p, DEFAULT_GRID).unwrap(), residual_check(&p, DEFAULT_GRID).unwrap());
}
