use rayon::prelude::*;
use serde::Serialize;

use super::{extract_events, solve_profile, tail_fit, SolveOptions};
use crate::error::Result;
use crate::model::{validate_params, Params};
use crate::verify::residual_check;

/// One sweep result; numeric fields are NaN when the row failed before computing them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: i64,
    pub lambda: f64,
    pub mu: f64,
    pub y1: f64,
    pub y2: f64,
    pub r1: f64,
    pub alpha_fit: f64,
    pub residual_max: f64,
    /// `OK` or the error code that stopped the row.
    pub status: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.status == "OK")
    }
}

/// Grid points `n x lambda x mu` with `lambda = 1/n + q (1/(n-1) - 1/n)` for each fraction `q`.
pub fn lattice(ns: &[i64], fractions: &[f64], mus: &[f64]) -> Vec<(i64, f64, f64)> {
    let mut grid = Vec::with_capacity(ns.len() * fractions.len() * mus.len());
    for &n in ns {
        for &q in fractions {
            let nf = n as f64;
            let lambda = 1.0 / nf + q * (1.0 / (nf - 1.0) - 1.0 / nf);
            for &mu in mus {
                grid.push((n, lambda, mu));
            }
        }
    }
    grid
}

/// Solves every grid point independently; rows keep grid order and a failing
/// row records its error code instead of aborting the sweep.
pub fn sweep<F>(grid: &[(i64, f64, f64)], allow_any_lambda: bool, configure: F) -> SweepTable
where
    F: Fn(&Params) -> SolveOptions + Sync,
{
    let rows = grid
        .par_iter()
        .map(|&(n, lambda, mu)| {
            let mut row = SweepRow {
                n,
                lambda,
                mu,
                y1: f64::NAN,
                y2: f64::NAN,
                r1: f64::NAN,
                alpha_fit: f64::NAN,
                residual_max: f64::NAN,
                status: "OK".into(),
            };
            if let Err(e) = fill_row(&mut row, allow_any_lambda, &configure) {
                row.status = e.code().to_string();
            }
            row
        })
        .collect();
    SweepTable { rows }
}

fn fill_row<F>(row: &mut SweepRow, allow_any_lambda: bool, configure: &F) -> Result<()>
where
    F: Fn(&Params) -> SolveOptions,
{
    let params = validate_params(row.n, row.lambda, row.mu, allow_any_lambda)?;
    let opts = configure(&params);
    let profile = solve_profile(&params, &opts)?;
    let events = extract_events(&profile, &params, opts.tols.event_tol)?;
    row.y1 = events.y1;
    row.y2 = events.y2;
    row.r1 = events.r1;
    let residuals = residual_check(&profile, crate::verify::DEFAULT_GRID)?;
    row.residual_max = residuals.max_ode_residual.max(residuals.max_soliton_residual);
    row.alpha_fit = tail_fit(&profile, events.y2)?.alpha_fit;
    Ok(())
}
