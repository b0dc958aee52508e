//! Profile computation: the two-chart pipeline from the singular start, an
//! independent arc-length pipeline, even solutions, event extraction, tail
//! fits and parameter sweeps.

mod events;
mod sweep;

pub use events::{extract_even_events, extract_events, locate_y1, locate_y2, tail_fit, TailFit};
pub use sweep::{lattice, sweep, SweepRow, SweepTable};

use serde::Serialize;

use crate::dynamics::{denominator_guard, rhs_arclength, rhs_r_chart, rhs_y_chart, series_start, ArcBranch};
use crate::error::{Error, Result};
use crate::integrate::{integrate_adaptive, Scheme, Tolerances, Trajectory};
use crate::model::{ArcState, Equation, Params, Profile, ProfileMethod, Sample, SolveStats, Start, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ChartSwitch,
    ArcLength,
    /// Both pipelines; the chart-switch profile is primary.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Radius at which the series start hands over to the integrator.
    pub h0: f64,
    /// Value of `y_r` at which the `y(r)` chart is abandoned for `r(y)`.
    pub slope_switch: f64,
    pub y_max: f64,
    pub r_floor: f64,
    pub tols: Tolerances,
    pub method: Method,
}

impl SolveOptions {
    /// Defaults scaled by `L = max(1, |mu|)`: `h0 = 1e-6 L`, `y_max = 1e3 L`.
    pub fn for_params(params: &Params) -> Self {
        let scale = params.length_scale();
        SolveOptions {
            h0: 1e-6 * scale,
            slope_switch: 1.0,
            y_max: 1e3 * scale,
            r_floor: 1e-8,
            tols: Tolerances::default(),
            method: Method::ChartSwitch,
        }
    }

    /// Defaults for an even solution with maximum radius `r1`.
    pub fn for_even(r1: f64) -> Self {
        SolveOptions {
            h0: 1e-6,
            slope_switch: 1.0,
            y_max: 1e3 * r1.max(1.0),
            r_floor: 1e-8,
            tols: Tolerances::default(),
            method: Method::ChartSwitch,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.h0, self.slope_switch, self.y_max, self.r_floor].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Precondition("solve options must be finite".into()));
        }
        if !(self.h0 > 0.0) {
            return Err(Error::Precondition(format!("h0 = {} must be positive", self.h0)));
        }
        if !(0.5..=2.0).contains(&self.slope_switch) {
            return Err(Error::Precondition(format!("slope_switch = {} outside [0.5, 2]", self.slope_switch)));
        }
        if !(self.y_max > 0.0) {
            return Err(Error::Precondition(format!("y_max = {} must be positive", self.y_max)));
        }
        if !(self.r_floor > 0.0) {
            return Err(Error::Precondition(format!("r_floor = {} must be positive", self.r_floor)));
        }
        self.tols.validate()
    }
}

/// Runs the pipeline selected by `opts.method`; `Both` returns the chart-switch profile.
pub fn solve(params: &Params, opts: &SolveOptions) -> Result<Profile> {
    match opts.method {
        Method::ChartSwitch | Method::Both => solve_profile(params, opts),
        Method::ArcLength => solve_arclength(params, opts),
    }
}

/// First phase of [`solve_profile`]: `y(r)` from the series start at `r = h0`
/// until `y_r >= slope_switch`. State is `[y, y_r]` over `r`.
pub fn solve_start_chart(params: &Params, opts: &SolveOptions) -> Result<Trajectory<2>> {
    opts.validate()?;
    let start = series_start(params, opts.h0)?;
    let eq = params.equation;
    let rhs = |r: f64, x: &[f64; 2]| Ok([x[1], rhs_y_chart(r, x[0], x[1], &eq)?]);
    let switch = opts.slope_switch;
    let stop = move |_r: f64, x: &[f64; 2]| x[1] >= switch;
    // the slope blows up before r exceeds a few multiples of the start depth
    let r_end = 1e3 * params.length_scale();
    let traj =
        integrate_adaptive(rhs, start.t, [start.u, start.du], r_end, &opts.tols, Scheme::DormandPrince, Some(&stop))?;
    if !traj.stopped {
        return Err(Error::Precondition(format!("slope never reached {switch} before r = {r_end}")));
    }
    Ok(traj)
}

/// Profile from the singular start on the axis by the two-chart method.
///
/// The `y(r)` chart is integrated with the explicit scheme until the slope
/// passes `slope_switch`; the state is then inverted and `r(y)` is integrated
/// with the implicit scheme, which copes with the stiff tail, until `y_max`
/// or until `r <= r_floor`.
pub fn solve_profile(params: &Params, opts: &SolveOptions) -> Result<Profile> {
    let phase_a = solve_start_chart(params, opts)?;
    let eq = params.equation;
    let mut samples: Vec<Sample> = phase_a
        .nodes()
        .iter()
        .map(|nd| {
            let (r, y, y_r, y_rr) = (nd.t, nd.x[0], nd.x[1], nd.dx[1]);
            Sample { y, r, r_y: 1.0 / y_r, r_yy: -y_rr / y_r.powi(3) }
        })
        .collect();
    let switch = *samples.last().expect("trajectory has a node");
    let mut stats = stats_from(&opts.tols, &phase_a);
    stats.termination = Termination::ReachedYMax;

    if switch.y < opts.y_max {
        let (phase_b, termination) = integrate_r_chart(&eq, switch.y, [switch.r, switch.r_y], opts)?;
        samples.extend(r_chart_samples(&eq, &phase_b)?.into_iter().skip(1));
        stats.accepted_steps += phase_b.stats.accepted;
        stats.rejected_steps += phase_b.stats.rejected;
        stats.rhs_evals += phase_b.stats.rhs_evals;
        stats.termination = termination;
    }
    check_support(&samples)?;
    let y_max = samples.last().map_or(switch.y, |s| s.y);
    Ok(Profile {
        equation: eq,
        start: Start::Axis { mu: params.mu },
        samples,
        method: ProfileMethod::ChartSwitch,
        switch_y: Some(switch.y),
        y_max,
        stats,
    })
}

/// Profile from the singular start by integrating the arc-length system.
///
/// Near the axis the start-limit branch replaces `sin(theta)/r` by its limit.
/// The start point itself (`r = 0`) is not a graph point of `r(y)` with finite
/// slope and is omitted from the samples.
pub fn solve_arclength(params: &Params, opts: &SolveOptions) -> Result<Profile> {
    opts.validate()?;
    let eq = params.equation;
    let p = *params;
    let rhs = move |s: f64, x: &[f64; 3]| {
        let state = ArcState { s, r: x[0], y: x[1], theta: x[2] };
        rhs_arclength(&state, &p, ArcBranch::select(&state, &p))
    };
    let (y_max, r_floor) = (opts.y_max, opts.r_floor);
    // the radius floor only applies once the curve has turned upwards, away from the start
    let stop = move |_s: f64, x: &[f64; 3]| x[1] >= y_max || (x[0] <= r_floor && x[2] > 1.0);
    let s_end = 4.0 * (y_max + params.mu.abs()) + 10.0 * params.length_scale();
    let traj = integrate_adaptive(rhs, 0.0, [0.0, params.mu, 0.0], s_end, &opts.tols, Scheme::Radau, Some(&stop))?;

    let mut samples = Vec::with_capacity(traj.nodes().len());
    for nd in &traj.nodes()[1..] {
        let (r, y, theta) = (nd.x[0], nd.x[1], nd.x[2]);
        let (sin, cos) = theta.sin_cos();
        if !(r > 0.0 && sin > 0.0) {
            continue;
        }
        let r_y = cos / sin;
        let r_yy = rhs_r_chart(y, r, r_y, &eq)?;
        samples.push(Sample { y, r, r_y, r_yy });
    }
    check_support(&samples)?;
    let last = samples.last().copied().ok_or(Error::InterpolantGap)?;
    let mut stats = stats_from(&opts.tols, &traj);
    stats.termination = if last.y >= y_max { Termination::ReachedYMax } else { Termination::RadiusFloor };
    Ok(Profile {
        equation: eq,
        start: Start::Axis { mu: params.mu },
        samples,
        method: ProfileMethod::ArcLength,
        switch_y: None,
        y_max: last.y,
        stats,
    })
}

/// Even solution with maximum radius `r1` at `y = 0`, integrated for `y >= 0`.
///
/// Requires `lambda` strictly inside the window `(1/n, 1/(n-1))`.
pub fn solve_even(equation: &Equation, r1: f64, opts: &SolveOptions) -> Result<Profile> {
    opts.validate()?;
    if !r1.is_finite() {
        return Err(Error::NonfiniteInput { name: "r1" });
    }
    if !(r1 > 0.0) {
        return Err(Error::Precondition(format!("r1 = {r1} must be positive")));
    }
    let eq = Equation::validate(i64::from(equation.n), equation.lambda, false)?;
    let (traj, termination) = integrate_r_chart(&eq, 0.0, [r1, 0.0], opts)?;
    let samples = r_chart_samples(&eq, &traj)?;
    check_support(&samples)?;
    let mut stats = stats_from(&opts.tols, &traj);
    stats.termination = termination;
    Ok(Profile {
        equation: eq,
        start: Start::Even { r1 },
        y_max: traj.last().t,
        samples,
        method: ProfileMethod::ChartSwitch,
        switch_y: None,
        stats,
    })
}

/// Integrates the `r(y)` chart in the state `[r, q]` with `q = sqrt(1 + y^2) r_y`.
///
/// The support function `r - y r_y` decides the sign of `r_yy` in the tail,
/// where it is a small difference of large terms. Weighting the slope by
/// `sqrt(1 + y^2)` makes the absolute tolerance act on `y r_y` rather than on
/// `r_y`, which keeps the computed `r_yy` sign-correct far out.
fn integrate_r_chart(
    eq: &Equation,
    y0: f64,
    x0: [f64; 2],
    opts: &SolveOptions,
) -> Result<(Trajectory<2>, Termination)> {
    let eq = *eq;
    let rhs = move |y: f64, x: &[f64; 2]| {
        let w = y.hypot(1.0);
        let r_y = x[1] / w;
        let r_yy = rhs_r_chart(y, x[0], r_y, &eq)?;
        Ok([r_y, w * r_yy + y / w * r_y])
    };
    let floor = opts.r_floor;
    let stop = move |_y: f64, x: &[f64; 2]| x[0] <= floor;
    let q0 = [x0[0], y0.hypot(1.0) * x0[1]];
    let traj = integrate_adaptive(rhs, y0, q0, opts.y_max, &opts.tols, Scheme::Radau, Some(&stop))?;
    let termination = if traj.stopped { Termination::RadiusFloor } else { Termination::ReachedYMax };
    Ok((traj, termination))
}

fn r_chart_samples(eq: &Equation, traj: &Trajectory<2>) -> Result<Vec<Sample>> {
    traj.nodes()
        .iter()
        .map(|nd| {
            let (y, r) = (nd.t, nd.x[0]);
            let r_y = nd.x[1] / y.hypot(1.0);
            Ok(Sample { y, r, r_y, r_yy: rhs_r_chart(y, r, r_y, eq)? })
        })
        .collect()
}

fn stats_from<const N: usize>(tols: &Tolerances, traj: &Trajectory<N>) -> SolveStats {
    SolveStats {
        rel: tols.rel,
        abs: tols.abs,
        accepted_steps: traj.stats.accepted,
        rejected_steps: traj.stats.rejected,
        rhs_evals: traj.stats.rhs_evals,
        termination: if traj.stopped { Termination::RadiusFloor } else { Termination::ReachedYMax },
    }
}

fn check_support(samples: &[Sample]) -> Result<()> {
    for s in samples {
        let value = s.support();
        if !(value > denominator_guard(s.y, s.r)) {
            return Err(Error::SupportFunctionViolation { y: s.y, value });
        }
    }
    Ok(())
}
