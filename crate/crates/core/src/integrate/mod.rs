//! Adaptive one-step integration with dense output and bracketed event location.
//!
//! Two embedded schemes share one driver:
//!
//! * [`Scheme::DormandPrince`]: explicit Runge-Kutta 5(4) with PI step control.
//! * [`Scheme::Radau`]: three-stage Radau IIA (order 5), L-stable, for the stiff
//!   tail of the profile where the support function `r - y r_y` becomes small
//!   and the fast eigenvalue grows like `y / (lambda (r - y r_y)^2)`.
//!
//! Accepted steps are stored as nodes with values and derivatives. Between
//! nodes the solution is a Hermite polynomial matching both end values and
//! derivatives, corrected by the scheme's own midpoint value so that the
//! interpolant error stays at the level of the step error.

mod dopri;
mod event;
mod radau;
mod trajectory;

pub use event::{bisect_root, locate_event, DenseOutput};
pub use trajectory::{Node, Trajectory};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Width to which event abscissae are refined.
    pub event_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel: 1e-10, abs: 1e-12, max_step: f64::INFINITY, min_step: 1e-14, event_tol: 1e-10 }
    }
}

impl Tolerances {
    pub fn with_rel_abs(rel: f64, abs: f64) -> Self {
        Tolerances { rel, abs, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rel > 0.0
            && self.abs > 0.0
            && self.event_tol > 0.0
            && self.min_step > 0.0
            && self.min_step <= self.max_step;
        if ok {
            Ok(())
        } else {
            Err(Error::Precondition(format!("invalid tolerances {self:?}")))
        }
    }

    /// RMS norm of `v` scaled by `abs + rel * max(|a|, |b|)`.
    fn error_norm<const N: usize>(&self, v: &[f64; N], a: &[f64; N], b: &[f64; N]) -> f64 {
        let sum: f64 = (0..N)
            .map(|i| {
                let sc = self.abs + self.rel * a[i].abs().max(b[i].abs());
                (v[i] / sc).powi(2)
            })
            .sum();
        (sum / N as f64).sqrt()
    }
}

/// Predicate checked after every accepted step; `true` ends the integration.
pub type StopFn<'a, const N: usize> = &'a dyn Fn(f64, &[f64; N]) -> bool;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    DormandPrince,
    Radau,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IntegrateStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// Scaled error estimate of every accepted step.
    pub error_history: Vec<f64>,
}

/// Result of one trial step as judged by a scheme.
pub(crate) enum Trial<const N: usize> {
    Accepted { x: [f64; N], f: [f64; N], mid: [f64; N], err: f64, h_next: f64 },
    Rejected { h_next: f64 },
    RhsFailed { error: Error, h_next: f64 },
}

pub(crate) trait Stepper<const N: usize> {
    fn order(&self) -> i32;

    fn try_step<F>(&mut self, rhs: &mut F, t: f64, x: &[f64; N], f: &[f64; N], h: f64, evals: &mut usize) -> Trial<N>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>;
}

/// Integrates `x' = rhs(t, x)` from `t0` to `t_end`.
///
/// Stops early, after the first accepted step at which `stop` returns true.
/// Trial steps whose right-hand side fails are retried with a smaller step;
/// the failure is returned only once the step size underflows.
pub fn integrate_adaptive<const N: usize, F>(
    mut rhs: F,
    t0: f64,
    x0: [f64; N],
    t_end: f64,
    tols: &Tolerances,
    scheme: Scheme,
    stop: Option<StopFn<N>>,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    tols.validate()?;
    if !(t_end > t0) {
        return Err(Error::Precondition(format!("t_end = {t_end} must exceed t0 = {t0}")));
    }
    match scheme {
        Scheme::DormandPrince => drive(&mut rhs, t0, x0, t_end, tols, stop, dopri::DormandPrince::new(*tols)),
        Scheme::Radau => drive(&mut rhs, t0, x0, t_end, tols, stop, radau::RadauIIA::new(*tols)),
    }
}

fn drive<const N: usize, F, S>(
    rhs: &mut F,
    t0: f64,
    x0: [f64; N],
    t_end: f64,
    tols: &Tolerances,
    stop: Option<StopFn<N>>,
    mut stepper: S,
) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    S: Stepper<N>,
{
    let mut stats = IntegrateStats::default();
    let f0 = rhs(t0, &x0).map_err(|e| Error::RhsFailure { t: t0, source: Box::new(e) })?;
    stats.rhs_evals += 1;
    let mut traj = Trajectory::new(Node { t: t0, x: x0, dx: f0 });

    let (mut t, mut x, mut f) = (t0, x0, f0);
    let mut h = initial_step(rhs, t0, &x0, &f0, t_end, tols, stepper.order(), &mut stats.rhs_evals);
    let mut last_failure: Option<Error> = None;

    while t < t_end {
        h = h.min(tols.max_step);
        let remaining = t_end - t;
        // avoid leaving a sliver shorter than the minimum step
        if h >= remaining || remaining - h < tols.min_step {
            h = remaining;
        }
        let floor = tols.min_step.max(16.0 * f64::EPSILON * t.abs());
        if h < floor {
            traj.stats = stats;
            return Err(match last_failure {
                Some(source) => Error::RhsFailure { t, source: Box::new(source) },
                None => Error::StepUnderflow { t, h, min_step: floor },
            });
        }
        match stepper.try_step(rhs, t, &x, &f, h, &mut stats.rhs_evals) {
            Trial::Accepted { x: xn, f: fnew, mid, err, h_next } => {
                let tn = if h == remaining { t_end } else { t + h };
                traj.push(Node { t: tn, x: xn, dx: fnew }, mid);
                stats.accepted += 1;
                stats.error_history.push(err);
                last_failure = None;
                t = tn;
                x = xn;
                f = fnew;
                h = h_next;
                if stop.is_some_and(|p| p(t, &x)) {
                    traj.stopped = true;
                    break;
                }
            }
            Trial::Rejected { h_next } => {
                stats.rejected += 1;
                h = h_next;
            }
            Trial::RhsFailed { error, h_next } => {
                stats.rejected += 1;
                last_failure = Some(error);
                h = h_next;
            }
        }
    }
    traj.stats = stats;
    Ok(traj)
}

/// Starting step from the local Lipschitz estimate of Hairer, Norsett and Wanner.
#[allow(clippy::too_many_arguments)]
fn initial_step<const N: usize, F>(
    rhs: &mut F,
    t0: f64,
    x0: &[f64; N],
    f0: &[f64; N],
    t_end: f64,
    tols: &Tolerances,
    order: i32,
    evals: &mut usize,
) -> f64
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let span = t_end - t0;
    let zero = [0.0; N];
    let d0 = tols.error_norm(x0, x0, &zero);
    let d1 = tols.error_norm(f0, x0, &zero);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span).min(tols.max_step);
    let mut x1 = *x0;
    for i in 0..N {
        x1[i] += h0 * f0[i];
    }
    *evals += 1;
    let h = match rhs(t0 + h0, &x1) {
        Ok(f1) => {
            let mut df = [0.0; N];
            for i in 0..N {
                df[i] = f1[i] - f0[i];
            }
            let d2 = tols.error_norm(&df, x0, &zero) / h0;
            let h1 = if d1.max(d2) <= 1e-15 {
                (h0 * 1e-3).max(1e-6)
            } else {
                (0.01 / d1.max(d2)).powf(1.0 / f64::from(order + 1))
            };
            (100.0 * h0).min(h1)
        }
        Err(_) => 0.1 * h0,
    };
    h.min(span).min(tols.max_step).max(tols.min_step)
}
