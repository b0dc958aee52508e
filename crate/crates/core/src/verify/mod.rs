//! Checks of solved profiles that do not trust the solver: residuals from
//! resampled radii, the structural property suite, convergence under
//! tolerance refinement, and agreement between independent pipelines.

mod convergence;
mod properties;
mod residual;

pub use convergence::{convergence_study, cross_validate, ConvergenceStudy, CrossValidation, CROSS_GRID};
pub use properties::{
    property_suite, EVEN_CURVATURE_TOL, EVEN_SLOPE_TOL, MARGIN_WINDOW_Y2, START_CURVATURE_REL, TAIL_EXPONENT_REL,
    TAIL_RADIUS_RATIO, TAIL_SLOPE_MAX,
};
pub use residual::{residual_check, ResidualSummary, DEFAULT_GRID};
