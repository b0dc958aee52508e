use proptest::prelude::*;

use imcf_soliton::cli::{profile_csv, read_profile_csv, write_plot, write_profile_csv};
use imcf_soliton::error::Result;
use imcf_soliton::integrate::{integrate_adaptive, locate_event, DenseOutput, Scheme, Tolerances};
use imcf_soliton::model::{validate_params, Equation, Profile, ProfileMethod, Sample, SolveStats, Start, Termination};
use imcf_soliton::solver::{solve_profile, SolveOptions};
use imcf_soliton::verify::{property_suite, residual_check, DEFAULT_GRID};

fn window_lambda(n: i64, q: f64) -> f64 {
    let nf = n as f64;
    1.0 / nf + q * (1.0 / (nf - 1.0) - 1.0 / nf)
}

fn synthetic(samples: Vec<Sample>) -> Profile {
    Profile {
        equation: Equation { n: 2, lambda: 0.7 },
        start: Start::Axis { mu: -1.0 },
        y_max: samples.last().map_or(0.0, |s| s.y),
        samples,
        method: ProfileMethod::ChartSwitch,
        switch_y: None,
        stats: SolveStats {
            rel: 1e-10,
            abs: 1e-12,
            accepted_steps: 0,
            rejected_steps: 0,
            rhs_evals: 0,
            termination: Termination::ReachedYMax,
        },
    }
}

proptest! {
    #[test]
    fn window_midpoint_is_accepted(n in 2i64..10) {
        let mid = window_lambda(n, 0.5);
        prop_assert!(1.0 / (n as f64) < 1.0 / ((n - 1) as f64));
        prop_assert!(validate_params(n, mid, -1.0, false).is_ok());
    }

    #[test]
    fn events_lie_in_span_and_bracket_sign_changes(freq in 0.3f64..3.0, phase in 0.0f64..6.0, t_end in 1.0f64..12.0) {
        let rhs = |t: f64, _x: &[f64; 1]| -> Result<[f64; 1]> { Ok([freq * (freq * t + phase).cos()]) };
        let x0 = [phase.sin()];
        let traj = integrate_adaptive(rhs, 0.0, x0, t_end, &Tolerances::default(), Scheme::DormandPrince, None).unwrap();
        let roots = locate_event(&traj, |_, x| x[0], 1e-12).unwrap();
        let (lo, hi) = traj.t_range();
        for r in roots {
            prop_assert!(r >= lo && r <= hi);
            let (a, b) = ((r - 1e-9).max(lo), (r + 1e-9).min(hi));
            let (ga, gb) = (traj.eval(a).unwrap()[0], traj.eval(b).unwrap()[0]);
            prop_assert!(ga * gb <= 0.0 || ga.abs() < 1e-8 || gb.abs() < 1e-8, "{r}: {ga} {gb}");
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact(values in prop::collection::vec(
        (-1e3f64..1e3, 1e-300f64..1e300, -1e12f64..1e12, -1e300f64..1e300), 1..40)
    ) {
        let mut samples: Vec<Sample> = values.into_iter().map(|(y, r, r_y, r_yy)| Sample { y, r, r_y, r_yy }).collect();
        samples.sort_by(|a, b| a.y.total_cmp(&b.y));
        let p = synthetic(samples);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        write_profile_csv(&path, &p).unwrap();
        let back = read_profile_csv(&path).unwrap();
        prop_assert_eq!(back.len(), p.samples.len());
        for (a, b) in back.iter().zip(&p.samples) {
            prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
            prop_assert_eq!(a.r.to_bits(), b.r.to_bits());
            prop_assert_eq!(a.r_y.to_bits(), b.r_y.to_bits());
            prop_assert_eq!(a.r_yy.to_bits(), b.r_yy.to_bits());
        }
    }

    #[test]
    fn residuals_read_radii_only(seed_y in prop::collection::vec(-5.0f64..5.0, 60), seed_d in prop::collection::vec(-1e3f64..1e3, 60)) {
        let samples: Vec<Sample> = (0..60)
            .map(|k| {
                let y = -0.6 + 1.2 * k as f64 / 59.0;
                Sample { y, r: (1.0 - y * y).sqrt(), r_y: seed_y[k], r_yy: seed_d[k] }
            })
            .collect();
        let mut a = synthetic(samples);
        a.samples[0].r_y = 0.5;
        let mut b = a.clone();
        for s in &mut b.samples[1..] {
            s.r_y = -s.r_y;
            s.r_yy *= 3.0;
        }
        prop_assert_eq!(residual_check(&a, DEFAULT_GRID).unwrap(), residual_check(&b, DEFAULT_GRID).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn solved_profiles_keep_positive_radius_and_support(n in 2i64..=4, q in 0.1f64..0.9, mu in -3.0f64..-0.3) {
        let p = validate_params(n, window_lambda(n, q), mu, false).unwrap();
        let profile = solve_profile(&p, &SolveOptions::for_params(&p)).unwrap();
        for s in &profile.samples {
            prop_assert!(s.r > 0.0);
            prop_assert!(s.support() > 0.0, "support {} at y = {}", s.support(), s.y);
        }
        let report = property_suite(&profile, 1e-10);
        for name in ["sign_r_y", "sign_r_yy", "support_margin_window", "support_monotone", "y1_bound"] {
            prop_assert!(report.get(name).unwrap().passed(), "{:?}", report.get(name));
        }
        prop_assert_eq!(&report, &property_suite(&profile, 1e-10));
    }

    #[test]
    fn plot_emission_leaves_outputs_unchanged(q in 0.1f64..0.9, mu in -2.0f64..-0.5) {
        let p = validate_params(2, window_lambda(2, q), mu, false).unwrap();
        let profile = solve_profile(&p, &SolveOptions::for_params(&p)).unwrap();
        let before = profile_csv(&profile);
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("p.csv");
        write_profile_csv(&csv, &profile).unwrap();
        write_plot(&dir.path().join("p.gp"), &csv, &profile, 10.0).unwrap();
        prop_assert_eq!(std::fs::read_to_string(&csv).unwrap(), before.clone());
        prop_assert_eq!(profile_csv(&profile), before);
        prop_assert!(dir.path().join("p.svg").exists());
    }
}
