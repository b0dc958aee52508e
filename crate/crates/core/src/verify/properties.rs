use std::f64::consts::FRAC_PI_2;

use crate::error::Error;
use crate::model::{Check, Profile, Start, VerificationReport};
use crate::solver::{locate_y1, locate_y2, tail_fit};

/// Tail smallness threshold for `|y r_y|` at the end of the profile.
pub const TAIL_SLOPE_MAX: f64 = 1e-2;
/// Required decay factor of `r` between `y2` and the end of the profile.
pub const TAIL_RADIUS_RATIO: f64 = 0.1;
/// Relative tolerance of the fitted tail exponent.
pub const TAIL_EXPONENT_REL: f64 = 0.1;
/// Tolerance on the even-solution start slope `r_y(0)`.
pub const EVEN_SLOPE_TOL: f64 = 1e-10;
/// Tolerance on the even-solution start curvature `r_yy(0)`.
pub const EVEN_CURVATURE_TOL: f64 = 1e-8;
/// Relative tolerance on the axis-start curvature `y_rr -> 1/(n lambda |mu|)`.
pub const START_CURVATURE_REL: f64 = 1e-4;
/// Window of the support margin, as a multiple of `y2`.
pub const MARGIN_WINDOW_Y2: f64 = 10.0;

/// Runs every structural check on a profile.
///
/// Events are located here so that a missing event shows up as a failed
/// check rather than an error. Checks whose hypotheses do not hold (lambda
/// outside the window, or slow-decay tails above the window midpoint) are
/// reported as not applicable.
pub fn property_suite(profile: &Profile, event_tol: f64) -> VerificationReport {
    let mut report = VerificationReport::default();
    let eq = profile.equation;
    let in_window = eq.in_window();
    let (lo, hi) = eq.window();
    let slow_tail = eq.lambda > 0.5 * (lo + hi);
    let outside = format!("lambda = {} outside the window ({lo}, {hi})", eq.lambda);

    let min_r = profile.samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    report.push(Check::new("radius_positive", min_r > 0.0, min_r, 0.0, "minimum radius over samples"));
    let min_support = profile.min_support().unwrap_or(f64::NAN);
    report.push(Check::new(
        "support_positive",
        min_support > 0.0,
        min_support,
        0.0,
        "minimum of r - y r_y over samples",
    ));

    // events
    let (y1, r1) = match profile.start {
        Start::Even { r1 } => (Ok(0.0), r1),
        Start::Axis { .. } => {
            let y1 = locate_y1(profile, event_tol);
            let r1 = y1.as_ref().ok().and_then(|&y| profile.radius_at(y)).unwrap_or(f64::NAN);
            (y1, r1)
        }
    };
    let y1 = match y1 {
        Ok(y1) => {
            report.push(Check::new("event_y1", true, y1, f64::NAN, format!("maximum radius r1 = {r1}")));
            Some(y1)
        }
        Err(e) => {
            report.push(Check::failed("event_y1", format!("{}: {e}", e.code())));
            None
        }
    };
    let y2 = y1.map(|y1| locate_y2(profile, y1, event_tol));
    let y2 = match (y1, y2) {
        (Some(y1), Some(Ok(y2))) => {
            let ordered = y2 > y1 && (y1 > 0.0 || matches!(profile.start, Start::Even { .. }));
            let check = Check::new("event_y2", ordered, y2, y1, "inflection height, must exceed y1 (> 0)");
            report.push(if in_window || ordered { check } else { Check::not_applicable("event_y2", outside.clone()) });
            Some(y2)
        }
        (Some(_), Some(Err(e))) => {
            let detail = match &e {
                Error::EventNotFound { .. } => format!("y2 ABSENT ({})", e.code()),
                _ => format!("{}: {e}", e.code()),
            };
            report.push(if in_window {
                Check::failed("event_y2", detail)
            } else {
                Check::not_applicable("event_y2", format!("{detail}; {outside}"))
            });
            None
        }
        _ => {
            report.push(Check::failed("event_y2", "requires y1"));
            None
        }
    };

    let theorem = |report: &mut VerificationReport, name: &str, build: &dyn Fn() -> Check| {
        if in_window {
            report.push(build());
        } else {
            report.push(Check::not_applicable(name, outside.clone()));
        }
    };

    // sign structure
    match (y1, y2) {
        (Some(y1), Some(y2)) => {
            theorem(&mut report, "sign_r_y", &|| {
                let bad = profile
                    .samples
                    .iter()
                    .filter(|s| (s.y < y1 - event_tol && !(s.r_y > 0.0)) || (s.y > y1 + event_tol && !(s.r_y < 0.0)))
                    .count();
                Check::new("sign_r_y", bad == 0, bad as f64, 0.0, "samples violating r_y > 0 before y1, < 0 after")
            });
            theorem(&mut report, "sign_r_yy", &|| {
                let bad = profile
                    .samples
                    .iter()
                    .filter(|s| (s.y < y2 - event_tol && !(s.r_yy < 0.0)) || (s.y > y2 + event_tol && !(s.r_yy > 0.0)))
                    .count();
                Check::new("sign_r_yy", bad == 0, bad as f64, 0.0, "samples violating r_yy < 0 before y2, > 0 after")
            });
            theorem(&mut report, "support_margin_window", &|| {
                let top = profile.y_max.min(MARGIN_WINDOW_Y2 * y2);
                let m = profile
                    .samples
                    .iter()
                    .filter(|s| s.y >= 0.0 && s.y <= top)
                    .map(|s| s.support())
                    .fold(f64::INFINITY, f64::min);
                Check::new("support_margin_window", m > 0.0, m, 0.0, format!("min r - y r_y on [0, {top}]"))
            });
        }
        _ => {
            for name in ["sign_r_y", "sign_r_yy", "support_margin_window"] {
                theorem(&mut report, name, &|| Check::failed(name, "events unavailable"));
            }
        }
    }

    match (y1, &profile.start) {
        (Some(y1), Start::Axis { .. }) if y1 > 0.0 => {
            theorem(&mut report, "support_monotone", &|| support_monotone(profile, y1, r1));
        }
        (_, Start::Even { .. }) => {
            report.push(Check::not_applicable("support_monotone", "even solution: (0, y1) is empty"));
        }
        _ => theorem(&mut report, "support_monotone", &|| Check::failed("support_monotone", "requires y1 > 0")),
    }

    match y1 {
        Some(y1) if r1.is_finite() => theorem(&mut report, "y1_bound", &|| {
            let bound = FRAC_PI_2 * r1 / eq.c4();
            Check::new("y1_bound", y1 <= bound, y1, bound, "y1 <= (pi/2) r1 / (1/lambda - (n-1))")
        }),
        _ => theorem(&mut report, "y1_bound", &|| Check::failed("y1_bound", "requires y1")),
    }

    // tail
    let tail_na = if !in_window {
        Some(outside.clone())
    } else if slow_tail {
        Some(format!("slow decay: lambda = {} above the window midpoint {}", eq.lambda, 0.5 * (lo + hi)))
    } else {
        None
    };
    for check in tail_checks(profile, y2) {
        match &tail_na {
            Some(why) => report.push(Check::not_applicable(&check.check, why.clone())),
            None => report.push(check),
        }
    }

    report.push(start_curvature(profile));
    report
}

fn support_monotone(profile: &Profile, y1: f64, r1: f64) -> Check {
    let inner: Vec<_> = profile.samples.iter().filter(|s| s.y > 0.0 && s.y < y1).collect();
    let Some(r0) = profile.radius_at(0.0) else {
        return Check::failed("support_monotone", "profile does not contain y = 0");
    };
    let slack = 1e-9 * r1.max(1.0);
    let mut worst_drop = 0.0f64;
    let mut out_of_bounds = 0usize;
    for w in inner.windows(2) {
        worst_drop = worst_drop.max(w[0].support() - w[1].support());
    }
    for s in &inner {
        let p = s.support();
        if p < r0 - slack || p > r1 + slack {
            out_of_bounds += 1;
        }
    }
    let pass = worst_drop <= slack && out_of_bounds == 0;
    Check::new(
        "support_monotone",
        pass,
        worst_drop,
        slack,
        format!("largest decrease of r - y r_y on (0, y1); {out_of_bounds} samples outside [r(0), r1] = [{r0}, {r1}]"),
    )
}

fn tail_checks(profile: &Profile, y2: Option<f64>) -> Vec<Check> {
    let Some((_, y_end)) = profile.y_range() else {
        return ["tail_slope", "tail_radius", "tail_exponent"]
            .iter()
            .map(|n| Check::failed(n, "empty profile"))
            .collect();
    };
    let slope_at = |y: f64| profile.state_at(y).map_or(f64::NAN, |s| (y * s[1]).abs());
    let (end, half) = (slope_at(y_end), slope_at(0.5 * y_end));
    let slope = Check::new(
        "tail_slope",
        end <= TAIL_SLOPE_MAX && end < half,
        end,
        TAIL_SLOPE_MAX,
        format!("|y r_y| at y = {y_end}; {half} at half height"),
    );
    let Some(y2) = y2 else {
        return vec![slope, Check::failed("tail_radius", "requires y2"), Check::failed("tail_exponent", "requires y2")];
    };
    let ratio = match (profile.radius_at(y_end), profile.radius_at(y2)) {
        (Some(a), Some(b)) => a / b,
        _ => f64::NAN,
    };
    let radius =
        Check::new("tail_radius", ratio < TAIL_RADIUS_RATIO, ratio, TAIL_RADIUS_RATIO, format!("r({y_end}) / r(y2)"));
    let exponent = match tail_fit(profile, y2) {
        Ok(fit) => {
            let rel = (fit.alpha_fit - fit.alpha_pred).abs() / fit.alpha_pred;
            Check::new(
                "tail_exponent",
                rel <= TAIL_EXPONENT_REL,
                rel,
                TAIL_EXPONENT_REL,
                format!("fitted {} vs predicted {} (rms {:e})", fit.alpha_fit, fit.alpha_pred, fit.rms),
            )
        }
        Err(e) => Check::failed("tail_exponent", format!("{}: {e}", e.code())),
    };
    vec![slope, radius, exponent]
}

fn start_curvature(profile: &Profile) -> Check {
    let eq = profile.equation;
    let Some(first) = profile.samples.first() else {
        return Check::failed("start_curvature", "empty profile");
    };
    match profile.start {
        Start::Even { r1 } => {
            let expect = eq.curvature_at_extremum(r1);
            let err = (first.r_yy - expect).abs();
            Check::new(
                "start_curvature",
                first.r_y.abs() <= EVEN_SLOPE_TOL && err <= EVEN_CURVATURE_TOL,
                err,
                EVEN_CURVATURE_TOL,
                format!("r_y(0) = {}, r_yy(0) = {} vs {expect}", first.r_y, first.r_yy),
            )
        }
        Start::Axis { mu } => {
            let kappa0 = 1.0 / (f64::from(eq.n) * eq.lambda * mu.abs());
            // y_rr = -r_yy / r_y^3 at the first sample, which sits at r = h0
            let y_rr = -first.r_yy / first.r_y.powi(3);
            let rel = (y_rr - kappa0).abs() / kappa0;
            Check::new(
                "start_curvature",
                rel <= START_CURVATURE_REL,
                rel,
                START_CURVATURE_REL,
                format!("y_rr at r = {} vs 1/(n lambda |mu|) = {kappa0}", first.r),
            )
        }
    }
}
