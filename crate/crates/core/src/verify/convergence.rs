use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::Tolerances;
use crate::model::{Params, Profile};
use crate::solver::{solve, SolveOptions};

/// Number of probe heights shared by every rung of a convergence study.
const PROBES: usize = 41;

/// Points of the comparison grid in [`cross_validate`].
pub const CROSS_GRID: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    /// `-d log(error) / d log(accepted steps)`: the order of the method as seen
    /// on the refinement ladder.
    pub observed_order: f64,
    /// `d log(error) / d log(rel)`, a tolerance-proportionality diagnostic.
    pub tolerance_slope: f64,
    /// Sup error at the probe heights for each compared rung.
    pub errors: Vec<f64>,
    /// Accepted steps for each compared rung.
    pub steps: Vec<usize>,
}

/// Solves `params` on every rung of `ladder` and measures convergence.
///
/// With `exact` given, every rung is compared against it; otherwise the
/// tightest rung is the reference and is excluded from the fit.
pub fn convergence_study(
    params: &Params,
    opts: &SolveOptions,
    ladder: &[Tolerances],
    exact: Option<&dyn Fn(f64) -> f64>,
) -> Result<ConvergenceStudy> {
    if ladder.len() < 3 {
        return Err(Error::Precondition(format!("ladder has {} rungs, at least 3 required", ladder.len())));
    }
    if ladder.windows(2).any(|w| !(w[1].rel < w[0].rel)) {
        return Err(Error::Precondition("ladder must strictly tighten".into()));
    }
    let profiles: Vec<Profile> =
        ladder.iter().map(|t| solve(params, &SolveOptions { tols: *t, ..*opts })).collect::<Result<_>>()?;

    let lo = profiles.iter().filter_map(|p| p.y_range()).map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let hi = profiles.iter().filter_map(|p| p.y_range()).map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = hi.min(lo + 20.0 * params.length_scale());
    if !(hi > lo) {
        return Err(Error::NoOverlap);
    }
    let margin = 0.05 * (hi - lo);
    let probes: Vec<f64> =
        (0..PROBES).map(|k| lo + margin + (hi - lo - 2.0 * margin) * k as f64 / (PROBES - 1) as f64).collect();

    let radii = |p: &Profile| -> Result<Vec<f64>> {
        probes.iter().map(|&y| p.radius_at(y).ok_or(Error::InterpolantGap)).collect()
    };
    let (compared, reference): (&[Profile], Vec<f64>) = match exact {
        Some(f) => (&profiles[..], probes.iter().map(|&y| f(y)).collect()),
        None => (&profiles[..profiles.len() - 1], radii(&profiles[profiles.len() - 1])?),
    };
    let mut errors = Vec::with_capacity(compared.len());
    let mut steps = Vec::with_capacity(compared.len());
    for p in compared {
        let r = radii(p)?;
        errors.push(r.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        steps.push(p.stats.accepted_steps);
    }
    let log_err: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    let log_steps: Vec<f64> = steps.iter().map(|&s| (s as f64).ln()).collect();
    let log_tol: Vec<f64> = ladder[..compared.len()].iter().map(|t| t.rel.ln()).collect();
    Ok(ConvergenceStudy {
        observed_order: -slope(&log_steps, &log_err),
        tolerance_slope: slope(&log_tol, &log_err),
        errors,
        steps,
    })
}

fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossValidation {
    pub sup_distance: f64,
    pub overlap: (f64, f64),
}

/// Sup distance between two profiles' radii over their common height range.
pub fn cross_validate(a: &Profile, b: &Profile) -> Result<CrossValidation> {
    let (ra, rb) = (a.y_range().ok_or(Error::NoOverlap)?, b.y_range().ok_or(Error::NoOverlap)?);
    let (lo, hi) = (ra.0.max(rb.0), ra.1.min(rb.1));
    if !(hi > lo) {
        return Err(Error::NoOverlap);
    }
    let mut sup = 0.0f64;
    for k in 0..CROSS_GRID {
        let y = (lo + (hi - lo) * k as f64 / (CROSS_GRID - 1) as f64).min(hi);
        let (Some(x), Some(z)) = (a.radius_at(y), b.radius_at(y)) else {
            return Err(Error::InterpolantGap);
        };
        sup = sup.max((x - z).abs());
    }
    Ok(CrossValidation { sup_distance: sup, overlap: (lo, hi) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_preconditions() {
        let p = Params::unchecked(2, 0.7, -1.0);
        let o = SolveOptions::for_params(&p);
        let one = [Tolerances::default()];
        assert_eq!(convergence_study(&p, &o, &one, None).unwrap_err().code(), "PRECONDITION");
        let loose = [1e-6, 1e-8, 1e-7].map(|t| Tolerances::with_rel_abs(t, t));
        assert_eq!(convergence_study(&p, &o, &loose, None).unwrap_err().code(), "PRECONDITION");
    }

    #[test]
    fn slope_of_a_line() {
        assert!((slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
