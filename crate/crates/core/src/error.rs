//! Error type shared by every module.
//!
//! Each variant maps onto a stable, machine-readable code (see [`Error::code`])
//! that the command line front end prints on the diagnostic stream.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension n = {n} is below 2")]
    DimensionTooSmall { n: i64 },

    #[error("lambda = {lambda} outside the admissible range ({lower}, {upper})")]
    LambdaOutOfRange { lambda: f64, lower: f64, upper: f64 },

    #[error("mu = {mu} must be negative")]
    MuNonnegative { mu: f64 },

    #[error("non-finite value for `{name}`")]
    NonfiniteInput { name: &'static str },

    #[error("denominator {value:e} below guard {guard:e} at t = {t}")]
    SingularDenominator { t: f64, value: f64, guard: f64 },

    #[error("radius {r:e} is not positive")]
    NonpositiveRadius { r: f64 },

    #[error("start-limit branch requested at r = {r:e}, above threshold {threshold:e}")]
    LimitBranchMisuse { r: f64, threshold: f64 },

    #[error("series start offset h0 = {h0:e} outside (0, {max:e}]")]
    H0OutOfRange { h0: f64, max: f64 },

    #[error("step size {h:e} fell below the minimum {min_step:e} at t = {t}")]
    StepUnderflow { t: f64, h: f64, min_step: f64 },

    #[error("right-hand side failed at t = {t}: {source}")]
    RhsFailure { t: f64, source: Box<Error> },

    #[error("trajectory has no interval to interpolate on")]
    InterpolantGap,

    #[error("support function r - y*r_y = {value:e} at y = {y} is not positive")]
    SupportFunctionViolation { y: f64, value: f64 },

    #[error("event `{event}` not found")]
    EventNotFound { event: &'static str },

    #[error("event `{event}` has {count} sign changes, expected one")]
    MultipleEvents { event: &'static str, count: usize },

    #[error("tail reaches y = {reached}, at least {required} needed")]
    TailTooShort { reached: f64, required: f64 },

    #[error("profile has {samples} samples, {required} needed")]
    ProfileTooShort { samples: usize, required: usize },

    #[error("profiles do not overlap in y")]
    NoOverlap,

    #[error("invalid argument: {0}")]
    Precondition(String),

    #[error("unknown configuration key `{key}`")]
    UnknownKey { key: String },

    #[error("value `{value}` for `{key}` has the wrong type")]
    TypeMismatch { key: String, value: String },

    #[error("missing required setting `{key}`")]
    MissingRequired { key: String },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable upper-case code for diagnostics and sweep status columns.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionTooSmall { .. } => "DIMENSION_TOO_SMALL",
            Error::LambdaOutOfRange { .. } => "LAMBDA_OUT_OF_RANGE",
            Error::MuNonnegative { .. } => "MU_NONNEGATIVE",
            Error::NonfiniteInput { .. } => "NONFINITE_INPUT",
            Error::SingularDenominator { .. } => "SINGULAR_DENOMINATOR",
            Error::NonpositiveRadius { .. } => "NONPOSITIVE_RADIUS",
            Error::LimitBranchMisuse { .. } => "LIMIT_BRANCH_MISUSE",
            Error::H0OutOfRange { .. } => "H0_OUT_OF_RANGE",
            Error::StepUnderflow { .. } => "STEP_UNDERFLOW",
            Error::RhsFailure { .. } => "RHS_ERROR",
            Error::InterpolantGap => "INTERPOLANT_GAP",
            Error::SupportFunctionViolation { .. } => "SUPPORT_FUNCTION_VIOLATION",
            Error::EventNotFound { .. } => "EVENT_NOT_FOUND",
            Error::MultipleEvents { .. } => "MULTIPLE_EVENTS",
            Error::TailTooShort { .. } => "TAIL_TOO_SHORT",
            Error::ProfileTooShort { .. } => "PROFILE_TOO_SHORT",
            Error::NoOverlap => "NO_OVERLAP",
            Error::Precondition(_) => "PRECONDITION",
            Error::UnknownKey { .. } => "UNKNOWN_KEY",
            Error::TypeMismatch { .. } => "TYPE_MISMATCH",
            Error::MissingRequired { .. } => "MISSING_REQUIRED",
            Error::Io { .. } => "IO_ERROR",
        }
    }

    /// True for errors caused by invalid user input rather than a failed computation.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::DimensionTooSmall { .. }
                | Error::LambdaOutOfRange { .. }
                | Error::MuNonnegative { .. }
                | Error::NonfiniteInput { .. }
                | Error::H0OutOfRange { .. }
                | Error::Precondition(_)
                | Error::UnknownKey { .. }
                | Error::TypeMismatch { .. }
                | Error::MissingRequired { .. }
        )
    }
}
