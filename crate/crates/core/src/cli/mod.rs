//! Command-line front end: argument and config-file parsing, command dispatch
//! and the output files.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 when a
//! solve or file operation fails (or any sweep row does), 3 for invalid
//! configuration. Failures print one `error code=... message=...` line on stderr.

mod config;
mod output;

use std::path::Path;

pub use config::{parse_config, parse_config_text, read_config_file, Command, Parsed, RunConfig};
pub use output::{
    gnuplot_script, profile_csv, profile_svg, read_profile_csv, report_json, write_plot, write_profile_csv,
    write_report_json, write_sweep_csv, PROFILE_HEADER,
};

use crate::error::{Error, Result};
use crate::model::{validate_params, Check, Equation, Events, Params, Profile, VerificationReport};
use crate::solver::{
    extract_even_events, extract_events, lattice, solve_arclength, solve_even, solve_profile, sweep, Method,
    SolveOptions,
};
use crate::verify::{cross_validate, property_suite, residual_check, DEFAULT_GRID};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SOLVE_ERROR: i32 = 2;
pub const EXIT_CONFIG_ERROR: i32 = 3;

/// Threshold of the residual checks added by VERIFY.
pub const RESIDUAL_MAX: f64 = 1e-4;
/// Threshold of the chart-switch vs arc-length distance with `--method both`.
pub const CROSS_METHOD_MAX: f64 = 1e-6;

/// Parses `argv` (without the program name) and runs it.
pub fn run_args(argv: &[String]) -> i32 {
    match parse_config(argv) {
        Ok(Parsed::Run(cfg)) => run(&cfg),
        Ok(Parsed::Display(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

pub fn run(cfg: &RunConfig) -> i32 {
    let result = match cfg.command {
        Command::Solve => run_solve(cfg),
        Command::Verify => run_verify(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::Even => run_even(cfg),
    };
    match result {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> i32 {
    eprintln!("error code={} message={}", e.code(), e);
    if e.is_config_error() {
        EXIT_CONFIG_ERROR
    } else {
        EXIT_SOLVE_ERROR
    }
}

fn params(cfg: &RunConfig) -> Result<Params> {
    validate_params(cfg.n[0], cfg.lambda[0], cfg.mu[0], cfg.allow_any_lambda)
}

/// Applies the optional overrides of `cfg` on top of `base`.
fn options(cfg: &RunConfig, base: SolveOptions) -> Result<SolveOptions> {
    let mut o = base;
    o.h0 = cfg.h0.unwrap_or(o.h0);
    o.slope_switch = cfg.slope_switch.unwrap_or(o.slope_switch);
    o.y_max = cfg.y_max.unwrap_or(o.y_max);
    o.r_floor = cfg.r_floor.unwrap_or(o.r_floor);
    o.tols.rel = cfg.rel.unwrap_or(o.tols.rel);
    o.tols.abs = cfg.abs.unwrap_or(o.tols.abs);
    o.tols.event_tol = cfg.event_tol.unwrap_or(o.tols.event_tol);
    o.method = cfg.method;
    o.validate()?;
    Ok(o)
}

fn out_path(cfg: &RunConfig) -> &Path {
    cfg.profile_csv.as_deref().expect("parse_config requires --out")
}

fn solve_primary(params: &Params, opts: &SolveOptions) -> Result<Profile> {
    match opts.method {
        Method::ArcLength => solve_arclength(params, opts),
        Method::ChartSwitch | Method::Both => solve_profile(params, opts),
    }
}

/// Writes the profile CSV and the optional plot files.
fn write_profile(cfg: &RunConfig, profile: &Profile) -> Result<()> {
    let csv = out_path(cfg);
    write_profile_csv(csv, profile)?;
    if let Some(plot) = &cfg.plot_script {
        let r_max = profile.samples.iter().map(|s| s.r).fold(0.0, f64::max);
        let y0 = profile.samples.first().map_or(0.0, |s| s.y);
        write_plot(plot, csv, profile, y0 + 10.0 * r_max.max(1.0))?;
    }
    Ok(())
}

fn summary(cfg: &RunConfig, profile: &Profile, events: &Result<Events>) {
    if cfg.quiet {
        return;
    }
    let eq = profile.equation;
    println!(
        "n={} lambda={} samples={} y_end={} steps={}",
        eq.n,
        eq.lambda,
        profile.samples.len(),
        profile.y_max,
        profile.stats.accepted_steps
    );
    match events {
        Ok(e) => println!("y1={:.12} y2={:.12} r1={:.12} kappa0={:.12}", e.y1, e.y2, e.r1, e.kappa0),
        Err(e) => println!("events unavailable: {} {e}", e.code()),
    }
}

fn run_solve(cfg: &RunConfig) -> Result<i32> {
    let params = params(cfg)?;
    let opts = options(cfg, SolveOptions::for_params(&params))?;
    let profile = solve_primary(&params, &opts)?;
    if opts.method == Method::Both {
        solve_arclength(&params, &opts)?;
    }
    write_profile(cfg, &profile)?;
    let events = extract_events(&profile, &params, opts.tols.event_tol);
    summary(cfg, &profile, &events);
    // outside the window a missing inflection is an expected outcome
    match events {
        Err(e) if params.equation.in_window() => Err(e),
        _ => Ok(EXIT_OK),
    }
}

fn residual_checks(report: &mut VerificationReport, profile: &Profile) {
    match residual_check(profile, DEFAULT_GRID) {
        Ok(s) => {
            let window = format!("window y in [{}, {}], {} points", s.window.0, s.window.1, s.grid_size);
            report.push(Check::new(
                "residual_ode",
                s.max_ode_residual <= RESIDUAL_MAX,
                s.max_ode_residual,
                RESIDUAL_MAX,
                format!("{window}; worst at y = {}", s.worst_y),
            ));
            report.push(Check::new(
                "residual_soliton",
                s.max_soliton_residual <= RESIDUAL_MAX,
                s.max_soliton_residual,
                RESIDUAL_MAX,
                window,
            ));
        }
        Err(e) => {
            for name in ["residual_ode", "residual_soliton"] {
                report.push(Check::failed(name, format!("{}: {e}", e.code())));
            }
        }
    }
}

fn finish_report(cfg: &RunConfig, report: &VerificationReport, events: Option<&Events>) -> Result<i32> {
    if let Some(path) = &cfg.report_json {
        write_report_json(path, report, events)?;
    }
    if !cfg.quiet {
        for c in &report.checks {
            let status = serde_json::to_value(c.status).expect("status serialises");
            println!("{:<22} {}", c.check, status.as_str().unwrap_or_default());
        }
    }
    Ok(if report.overall() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn run_verify(cfg: &RunConfig) -> Result<i32> {
    let params = params(cfg)?;
    let opts = options(cfg, SolveOptions::for_params(&params))?;
    let profile = solve_primary(&params, &opts)?;
    write_profile(cfg, &profile)?;
    let events = extract_events(&profile, &params, opts.tols.event_tol);
    summary(cfg, &profile, &events);

    let mut report = property_suite(&profile, opts.tols.event_tol);
    residual_checks(&mut report, &profile);
    if opts.method == Method::Both {
        let arc = solve_arclength(&params, &opts)?;
        report.push(match cross_validate(&profile, &arc) {
            Ok(cv) => Check::new(
                "cross_method",
                cv.sup_distance <= CROSS_METHOD_MAX,
                cv.sup_distance,
                CROSS_METHOD_MAX,
                format!("chart-switch vs arc-length on y in [{}, {}]", cv.overlap.0, cv.overlap.1),
            ),
            Err(e) => Check::failed("cross_method", format!("{}: {e}", e.code())),
        });
    }
    finish_report(cfg, &report, events.as_ref().ok())
}

fn run_even(cfg: &RunConfig) -> Result<i32> {
    let eq = Equation::validate(cfg.n[0], cfg.lambda[0], cfg.allow_any_lambda)?;
    let r1 = cfg.r1.expect("parse_config requires --r1");
    let opts = options(cfg, SolveOptions::for_even(r1))?;
    let profile = solve_even(&eq, r1, &opts)?;
    write_profile(cfg, &profile)?;
    let events = extract_even_events(&profile, opts.tols.event_tol);
    summary(cfg, &profile, &events);
    if cfg.report_json.is_none() {
        return events.map(|_| EXIT_OK);
    }
    let mut report = property_suite(&profile, opts.tols.event_tol);
    residual_checks(&mut report, &profile);
    finish_report(cfg, &report, events.as_ref().ok())
}

fn run_sweep(cfg: &RunConfig) -> Result<i32> {
    let grid = if cfg.lambda.is_empty() {
        lattice(&cfg.n, &cfg.lambda_fraction, &cfg.mu)
    } else {
        let mut g = Vec::new();
        for &n in &cfg.n {
            for &lambda in &cfg.lambda {
                for &mu in &cfg.mu {
                    g.push((n, lambda, mu));
                }
            }
        }
        g
    };
    // surface bad overrides once instead of as a status in every row
    let probe = Params::unchecked(2, 0.75, -1.0);
    options(cfg, SolveOptions::for_params(&probe))?;
    let table = sweep(&grid, cfg.allow_any_lambda, |p| {
        options(cfg, SolveOptions::for_params(p)).expect("overrides validated above")
    });
    write_sweep_csv(out_path(cfg), &table)?;
    if !cfg.quiet {
        let ok = table.rows.iter().filter(|r| r.status == "OK").count();
        println!("{ok}/{} rows OK", table.rows.len());
    }
    match table.rows.iter().find(|r| r.status != "OK") {
        None => Ok(EXIT_OK),
        Some(row) => {
            eprintln!(
                "error code={} message=sweep row n={} lambda={} mu={} failed",
                row.status, row.n, row.lambda, row.mu
            );
            Ok(EXIT_SOLVE_ERROR)
        }
    }
}
