use serde::Serialize;

use crate::error::{Error, Result};

/// Coefficients of the profile ODE: dimension `n` of the rotating factor and speed `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equation {
    pub n: u32,
    pub lambda: f64,
}

impl Equation {
    /// Validates `(n, lambda)`.
    ///
    /// The open window `(1/n, 1/(n-1))` is required unless `allow_any_lambda`
    /// is set, in which case any `lambda > 1/n` other than the cylinder value
    /// `1/(n-1)` is accepted.
    pub fn validate(n: i64, lambda: f64, allow_any_lambda: bool) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(Error::NonfiniteInput { name: "lambda" });
        }
        if n < 2 {
            return Err(Error::DimensionTooSmall { n });
        }
        let n = u32::try_from(n).map_err(|_| Error::Precondition(format!("n = {n} too large")))?;
        let eq = Equation { n, lambda };
        let (lower, upper) = eq.window();
        let inside = lambda > lower && lambda < upper;
        let extended = allow_any_lambda && lambda > upper;
        if !(inside || extended) {
            let upper = if allow_any_lambda { f64::INFINITY } else { upper };
            return Err(Error::LambdaOutOfRange { lambda, lower, upper });
        }
        Ok(eq)
    }

    /// The theorem window `(1/n, 1/(n-1))` for this dimension.
    pub fn window(&self) -> (f64, f64) {
        let n = f64::from(self.n);
        (1.0 / n, 1.0 / (n - 1.0))
    }

    pub fn in_window(&self) -> bool {
        let (lo, hi) = self.window();
        self.lambda > lo && self.lambda < hi
    }

    /// `n - 1` as a float, the coefficient of the rotational curvature term.
    pub fn nm1(&self) -> f64 {
        f64::from(self.n) - 1.0
    }

    /// `1/lambda - (n-1)`, positive inside the window.
    pub fn c4(&self) -> f64 {
        1.0 / self.lambda - self.nm1()
    }

    /// Second derivative `r_yy = (n - 1 - 1/lambda)/r` at a point where `r_y = 0`.
    pub fn curvature_at_extremum(&self, r: f64) -> f64 {
        (self.nm1() - 1.0 / self.lambda) / r
    }

    /// Tail exponent `alpha` of `r ~ C y^(-alpha)` from the leading-order balance.
    pub fn tail_exponent(&self) -> f64 {
        let ln = self.lambda * self.nm1();
        (1.0 - ln) / ln
    }
}

/// A validated problem instance `(n, lambda, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    pub equation: Equation,
    pub mu: f64,
    pub allow_any_lambda: bool,
}

impl Params {
    /// Builds parameters without the lambda-window check.
    ///
    /// Intended for analytic fixtures at the window endpoints (the sphere at
    /// `lambda = 1/n`, the cylinder at `lambda = 1/(n-1)`), which exercise the
    /// integrators but lie outside the existence theory.
    pub fn unchecked(n: u32, lambda: f64, mu: f64) -> Self {
        Params { equation: Equation { n, lambda }, mu, allow_any_lambda: true }
    }

    pub fn n(&self) -> u32 {
        self.equation.n
    }

    pub fn lambda(&self) -> f64 {
        self.equation.lambda
    }

    /// Limiting second derivative `y_rr(0) = 1/(n lambda |mu|)` at the singular start.
    pub fn kappa0(&self) -> f64 {
        1.0 / (f64::from(self.equation.n) * self.equation.lambda * self.mu.abs())
    }

    /// Natural length scale `max(1, |mu|)` used by defaults and guards.
    pub fn length_scale(&self) -> f64 {
        self.mu.abs().max(1.0)
    }
}

/// Validates a raw `(n, lambda, mu)` triple.
pub fn validate_params(n: i64, lambda: f64, mu: f64, allow_any_lambda: bool) -> Result<Params> {
    if !mu.is_finite() {
        return Err(Error::NonfiniteInput { name: "mu" });
    }
    let equation = Equation::validate(n, lambda, allow_any_lambda)?;
    if mu >= 0.0 {
        return Err(Error::MuNonnegative { mu });
    }
    Ok(Params { equation, mu, allow_any_lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn accepts_interior_lambda() {
        let p = validate_params(2, 0.7, -1.0, false).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.lambda(), 0.7);
    }

    #[test]
    fn rejects_lower_endpoint() {
        let err = validate_params(2, 0.5, -1.0, false).unwrap_err();
        assert_eq!(err.code(), "LAMBDA_OUT_OF_RANGE");
        let err = validate_params(2, 0.5, -1.0, true).unwrap_err();
        assert_eq!(err.code(), "LAMBDA_OUT_OF_RANGE");
    }

    #[test]
    fn extended_range_needs_flag() {
        assert!(validate_params(3, 0.6, -1.0, true).is_ok());
        assert_eq!(validate_params(3, 0.6, -1.0, false).unwrap_err().code(), "LAMBDA_OUT_OF_RANGE");
        // cylinder value stays excluded
        assert_eq!(validate_params(3, 0.5, -1.0, true).unwrap_err().code(), "LAMBDA_OUT_OF_RANGE");
    }

    #[test]
    fn error_codes() {
        assert_eq!(validate_params(1, 0.7, -1.0, false).unwrap_err().code(), "DIMENSION_TOO_SMALL");
        assert_eq!(validate_params(2, 0.7, 0.0, false).unwrap_err().code(), "MU_NONNEGATIVE");
        assert_eq!(validate_params(2, f64::NAN, -1.0, false).unwrap_err().code(), "NONFINITE_INPUT");
        assert_eq!(validate_params(2, 0.7, f64::NEG_INFINITY, false).unwrap_err().code(), "NONFINITE_INPUT");
    }

    #[test]
    fn window_midpoints_accepted() {
        for n in 2..=10 {
            let (lo, hi) = Equation { n, lambda: 0.0 }.window();
            assert!(lo < hi);
            assert!(validate_params(i64::from(n), 0.5 * (lo + hi), -1.0, false).is_ok());
        }
    }

    #[test]
    fn tail_exponent_limits() {
        assert!((Equation { n: 2, lambda: 0.7 }.tail_exponent() - 3.0 / 7.0).abs() < 1e-15);
        assert!(Equation { n: 2, lambda: 1.0 - 1e-9 }.tail_exponent() < 1e-8);
        assert!((Equation { n: 2, lambda: 0.5 + 1e-9 }.tail_exponent() - 1.0).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn validation_is_total(n in -3i64..12, lambda in -1.0f64..2.0, mu in -5.0f64..5.0, allow: bool) {
            match validate_params(n, lambda, mu, allow) {
                Ok(p) => {
                    prop_assert!(p.n() >= 2);
                    prop_assert!(p.mu < 0.0);
                    let (lo, hi) = p.equation.window();
                    prop_assert!(p.lambda() > lo);
                    if !allow {
                        prop_assert!(p.lambda() < hi);
                    }
                }
                Err(e) => prop_assert!(matches!(
                    e.code(),
                    "DIMENSION_TOO_SMALL" | "LAMBDA_OUT_OF_RANGE" | "MU_NONNEGATIVE"
                )),
            }
        }
    }
}
