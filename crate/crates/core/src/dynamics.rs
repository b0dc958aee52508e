//! Right-hand sides of the three formulations of the profile ODE, the
//! series start at the singular point, and the revolution-surface geometry
//! used for independent verification.
//!
//! The profile curve `(r, y)` rotated about the `y` axis in `R^n x R` is a
//! homothetic soliton when `lambda * H * <X, nu> = -1`. Written as a graph
//! `r(y)` this becomes
//!
//! ```text
//! r_yy / (1 + r_y^2) = (n-1)/r - (1 + r_y^2) / (lambda (r - y r_y))
//! ```
//!
//! and as a graph `y(r)`
//!
//! ```text
//! y_rr = -(n-1)/r (1 + y_r^2) y_r + (1 + y_r^2)^2 / (lambda (r y_r - y)).
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ArcState, Chart, ChartState, Equation, Params};

/// Relative size of the guard on the support-function denominators.
pub const DENOMINATOR_GUARD: f64 = 1e-12;
/// Radius (relative to `max(1, |mu|)`) below which the arc-length start-limit branch applies.
pub const ARC_LIMIT_RADIUS: f64 = 1e-4;
/// Largest admissible series-start offset, relative to `max(1, |mu|)`.
pub const SERIES_H0_MAX: f64 = 1e-2;

/// Smallest admissible magnitude of a support-function denominator at `(y, r)`.
pub fn denominator_guard(y: f64, r: f64) -> f64 {
    DENOMINATOR_GUARD * 1f64.max(y.abs()).max(r)
}

fn check_denominator(t: f64, value: f64, y: f64, r: f64) -> Result<()> {
    let g = denominator_guard(y, r);
    if value.abs() < g || !value.is_finite() {
        return Err(Error::SingularDenominator { t, value, guard: g });
    }
    Ok(())
}

/// `r_yy` from the `r(y)` chart.
pub fn rhs_r_chart(y: f64, r: f64, r_y: f64, eq: &Equation) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonpositiveRadius { r });
    }
    let support = r - y * r_y;
    check_denominator(y, support, y, r)?;
    let w2 = 1.0 + r_y * r_y;
    Ok(w2 * (eq.nm1() / r - w2 / (eq.lambda * support)))
}

/// `y_rr` from the `y(r)` chart. The axis `r = 0` is never evaluated here; see [`series_start`].
pub fn rhs_y_chart(r: f64, y: f64, y_r: f64, eq: &Equation) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::NonpositiveRadius { r });
    }
    let support = r * y_r - y;
    check_denominator(r, support, y, r)?;
    let w2 = 1.0 + y_r * y_r;
    Ok(-eq.nm1() / r * w2 * y_r + w2 * w2 / (eq.lambda * support))
}

/// Branch of the arc-length right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcBranch {
    Regular,
    /// Near the singular start `sin(theta)/r` is replaced by its limit `kappa0`.
    StartLimit,
}

impl ArcBranch {
    /// The branch appropriate for `state`.
    pub fn select(state: &ArcState, params: &Params) -> Self {
        if state.r < arc_limit_radius(params) {
            ArcBranch::StartLimit
        } else {
            ArcBranch::Regular
        }
    }
}

pub fn arc_limit_radius(params: &Params) -> f64 {
    ARC_LIMIT_RADIUS * params.length_scale()
}

/// `(dr/ds, dy/ds, dtheta/ds)` for the arc-length formulation.
pub fn rhs_arclength(state: &ArcState, params: &Params, branch: ArcBranch) -> Result<[f64; 3]> {
    let eq = &params.equation;
    let (sin, cos) = state.theta.sin_cos();
    let rotational = match branch {
        ArcBranch::Regular => {
            if !(state.r > 0.0) {
                return Err(Error::NonpositiveRadius { r: state.r });
            }
            sin / state.r
        }
        ArcBranch::StartLimit => {
            let threshold = arc_limit_radius(params);
            if state.r >= threshold {
                return Err(Error::LimitBranchMisuse { r: state.r, threshold });
            }
            params.kappa0()
        }
    };
    let denom = state.r * sin - state.y * cos;
    check_denominator(state.s, denom, state.y, state.r)?;
    let kappa = -eq.nm1() * rotational + 1.0 / (eq.lambda * denom);
    Ok([cos, sin, kappa])
}

/// `y(r)`-chart state at `r = h0` from the expansion `y = mu + kappa0 r^2 / 2`.
pub fn series_start(params: &Params, h0: f64) -> Result<ChartState> {
    let max = SERIES_H0_MAX * params.length_scale();
    if !(h0 > 0.0 && h0 <= max) {
        return Err(Error::H0OutOfRange { h0, max });
    }
    let k = params.kappa0();
    Ok(ChartState { chart: Chart::YOfR, t: h0, u: params.mu + 0.5 * k * h0 * h0, du: k * h0 })
}

/// Mean curvature, position-normal pairing, and soliton residual at a profile point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryAtPoint {
    /// Sum of principal curvatures.
    pub mean_curvature: f64,
    /// `<X, nu>` with the interior normal (negative on spheres about the origin).
    pub x_dot_nu: f64,
    /// `lambda H <X, nu> + 1`; zero on an exact soliton.
    pub residual: f64,
}

pub fn geometry_at(y: f64, r: f64, r_y: f64, r_yy: f64, eq: &Equation) -> Result<GeometryAtPoint> {
    if !(r > 0.0) {
        return Err(Error::NonpositiveRadius { r });
    }
    let w2 = 1.0 + r_y * r_y;
    let w = w2.sqrt();
    let mean_curvature = (eq.nm1() / r - r_yy / w2) / w;
    let x_dot_nu = -(r - y * r_y) / w;
    Ok(GeometryAtPoint { mean_curvature, x_dot_nu, residual: eq.lambda * mean_curvature * x_dot_nu + 1.0 })
}
