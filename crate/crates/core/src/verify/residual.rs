use serde::Serialize;

use crate::dynamics::geometry_at;
use crate::error::{Error, Result};
use crate::model::{Profile, Sample};

/// Default number of points of the uniform resampling grid.
pub const DEFAULT_GRID: usize = 1000;

/// Width of the residual window as a multiple of the maximum radius.
const WINDOW_RADII: f64 = 10.0;

/// Grid cells skipped at each end of the window.
const EDGE_CELLS: usize = 2;

const STENCIL: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSummary {
    /// Max imbalance of the `r(y)` equation from finite differences of `r`.
    pub max_ode_residual: f64,
    /// Max of `|lambda H <X, nu> + 1|` from the same derivatives.
    pub max_soliton_residual: f64,
    pub grid_size: usize,
    /// Height where the ODE residual is largest.
    pub worst_y: f64,
    pub window: (f64, f64),
}

/// Residuals of a profile recomputed from its radii alone.
///
/// The radii are interpolated by local degree-5 Lagrange polynomials through
/// the sample values (stored slopes and curvatures are never read), resampled
/// on a uniform grid and differentiated with 5-point central differences. The
/// window starts where the profile becomes a graph of slope at most one and
/// extends over ten maximal radii, where the curve has structure; the far tail
/// is checked by the tail diagnostics instead.
pub fn residual_check(profile: &Profile, grid_size: usize) -> Result<ResidualSummary> {
    if grid_size < 2 * EDGE_CELLS + 5 {
        return Err(Error::Precondition(format!("grid size {grid_size} too small")));
    }
    let samples = &profile.samples;
    let start = samples.iter().position(|s| s.r_y <= 1.0).unwrap_or(samples.len());
    let body = &samples[start.min(samples.len())..];
    if body.len() < STENCIL {
        return Err(Error::ProfileTooShort { samples: body.len(), required: STENCIL });
    }
    let r_max = body.iter().map(|s| s.r).fold(0.0, f64::max);
    let lo = body[0].y;
    let hi = body[body.len() - 1].y.min(lo + WINDOW_RADII * r_max);
    let inside = body.iter().filter(|s| s.y <= hi).count();
    if inside < STENCIL {
        return Err(Error::ProfileTooShort { samples: inside, required: STENCIL });
    }

    let h = (hi - lo) / (grid_size - 1) as f64;
    let radii: Vec<f64> = (0..grid_size).map(|k| lagrange_radius(body, lo + h * k as f64)).collect();
    let eq = profile.equation;
    let mut summary =
        ResidualSummary { max_ode_residual: 0.0, max_soliton_residual: 0.0, grid_size, worst_y: lo, window: (lo, hi) };
    for k in EDGE_CELLS..grid_size - EDGE_CELLS {
        let y = lo + h * k as f64;
        let r = radii[k];
        let (m2, m1, p1, p2) = (radii[k - 2], radii[k - 1], radii[k + 1], radii[k + 2]);
        let r_y = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let r_yy = (-m2 + 16.0 * m1 - 30.0 * r + 16.0 * p1 - p2) / (12.0 * h * h);
        let w2 = 1.0 + r_y * r_y;
        let support = r - y * r_y;
        let ode = (r_yy / w2 - eq.nm1() / r + w2 / (eq.lambda * support)).abs();
        let soliton = geometry_at(y, r, r_y, r_yy, &eq).map_or(f64::INFINITY, |g| g.residual.abs());
        let ode = if ode.is_finite() { ode } else { f64::INFINITY };
        if ode > summary.max_ode_residual {
            summary.max_ode_residual = ode;
            summary.worst_y = y;
        }
        summary.max_soliton_residual = summary.max_soliton_residual.max(soliton);
    }
    Ok(summary)
}

/// Degree-5 Lagrange interpolation of `r` through the six samples around `y`.
fn lagrange_radius(samples: &[Sample], y: f64) -> f64 {
    let k = samples.partition_point(|s| s.y <= y);
    let i = k.clamp(1, samples.len() - 1) - 1;
    let first = i.saturating_sub(STENCIL / 2 - 1).min(samples.len() - STENCIL);
    let nodes = &samples[first..first + STENCIL];
    let mut total = 0.0;
    for (j, sj) in nodes.iter().enumerate() {
        if y == sj.y {
            return sj.r;
        }
        let mut w = 1.0;
        for (m, sm) in nodes.iter().enumerate() {
            if m != j {
                w *= (y - sm.y) / (sj.y - sm.y);
            }
        }
        total += w * sj.r;
    }
    total
}
