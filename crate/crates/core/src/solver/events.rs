use serde::Serialize;

use crate::dynamics::rhs_r_chart;
use crate::error::{Error, Result};
use crate::integrate::locate_event;
use crate::model::{Events, Params, Profile, Start};

/// Height of the maximum radius: the unique sign change of `r_y`.
pub fn locate_y1(profile: &Profile, event_tol: f64) -> Result<f64> {
    let roots = locate_event(profile, |_y, x: &[f64; 2]| x[1], event_tol)?;
    single("y1", roots)
}

/// Inflection height beyond `y1`: the unique sign change of the analytic `r_yy`.
pub fn locate_y2(profile: &Profile, y1: f64, event_tol: f64) -> Result<f64> {
    let eq = profile.equation;
    let g = |y: f64, x: &[f64; 2]| rhs_r_chart(y, x[0], x[1], &eq).unwrap_or(f64::NAN);
    let roots = locate_event(profile, g, event_tol)?;
    single("y2", roots.into_iter().filter(|&y| y > y1).collect())
}

fn single(event: &'static str, roots: Vec<f64>) -> Result<f64> {
    match roots.as_slice() {
        [] => Err(Error::EventNotFound { event }),
        [y] => Ok(*y),
        _ => Err(Error::MultipleEvents { event, count: roots.len() }),
    }
}

/// Events of a profile started on the axis.
pub fn extract_events(profile: &Profile, params: &Params, tol: f64) -> Result<Events> {
    let y1 = locate_y1(profile, tol)?;
    let y2 = locate_y2(profile, y1, tol)?;
    let r1 = profile.radius_at(y1).ok_or(Error::InterpolantGap)?;
    Ok(Events { y1, y2, r1, kappa0: params.kappa0() })
}

/// Events of an even solution: the maximum is the start point `y = 0`.
/// `kappa0` has no meaning here and is reported as NaN.
pub fn extract_even_events(profile: &Profile, tol: f64) -> Result<Events> {
    let Start::Even { r1 } = profile.start else {
        return Err(Error::Precondition("profile is not an even solution".into()));
    };
    let y2 = locate_y2(profile, 0.0, tol)?;
    Ok(Events { y1: 0.0, y2, r1, kappa0: f64::NAN })
}

/// Power-law fit `r ~ C y^(-alpha)` over the last decade of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub alpha_fit: f64,
    /// `(1 - lambda (n-1)) / (lambda (n-1))` from the leading-order balance.
    pub alpha_pred: f64,
    /// Root-mean-square residual of the log-log fit.
    pub rms: f64,
}

/// Fits the tail exponent on `[y_end/10, y_end]`.
///
/// Requires the profile to reach `100 max(1, y2)`.
pub fn tail_fit(profile: &Profile, y2: f64) -> Result<TailFit> {
    let (_, y_end) = profile.y_range().ok_or(Error::InterpolantGap)?;
    let required = 100.0 * y2.max(1.0);
    if y_end < required {
        return Err(Error::TailTooShort { reached: y_end, required });
    }
    const POINTS: usize = 64;
    let mut xs = Vec::with_capacity(POINTS);
    let mut ys = Vec::with_capacity(POINTS);
    let (a, b) = ((y_end / 10.0).ln(), y_end.ln());
    for k in 0..POINTS {
        let ly = a + (b - a) * k as f64 / (POINTS - 1) as f64;
        let r = profile.radius_at(ly.exp().min(y_end)).ok_or(Error::InterpolantGap)?;
        if !(r > 0.0) {
            return Err(Error::NonpositiveRadius { r });
        }
        xs.push(ly);
        ys.push(r.ln());
    }
    let n = POINTS as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let rms = (xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum::<f64>() / n).sqrt();
    Ok(TailFit { alpha_fit: -slope, alpha_pred: profile.equation.tail_exponent(), rms })
}
