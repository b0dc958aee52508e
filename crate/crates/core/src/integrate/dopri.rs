use super::{Stepper, Tolerances, Trial};
use crate::error::Result;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// Difference between the fifth- and fourth-order weights.
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Continuous-extension weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

/// Dormand-Prince 5(4) with first-same-as-last stages and PI step control.
pub(crate) struct DormandPrince {
    tols: Tolerances,
    err_old: f64,
    last_rejected: bool,
}

impl DormandPrince {
    pub(crate) fn new(tols: Tolerances) -> Self {
        DormandPrince { tols, err_old: 1e-4, last_rejected: false }
    }
}

impl<const N: usize> Stepper<N> for DormandPrince {
    fn order(&self) -> i32 {
        5
    }

    fn try_step<F>(&mut self, rhs: &mut F, t: f64, x: &[f64; N], f: &[f64; N], h: f64, evals: &mut usize) -> Trial<N>
    where
        F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    {
        let mut k = [[0.0; N]; 7];
        k[0] = *f;
        let mut xs = *x;
        for s in 1..7 {
            for i in 0..N {
                let mut acc = 0.0;
                for j in 0..s {
                    acc += A[s][j] * k[j][i];
                }
                xs[i] = x[i] + h * acc;
            }
            *evals += 1;
            match rhs(t + C[s] * h, &xs) {
                Ok(v) => k[s] = v,
                Err(error) => {
                    self.last_rejected = true;
                    return Trial::RhsFailed { error, h_next: 0.25 * h };
                }
            }
        }
        // the last stage is evaluated at the fifth-order solution
        let x_new = xs;
        let mut err_vec = [0.0; N];
        for i in 0..N {
            err_vec[i] = h * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
        }
        let err = self.tols.error_norm(&err_vec, x, &x_new);
        if !err.is_finite() {
            self.last_rejected = true;
            return Trial::Rejected { h_next: MIN_FACTOR * h };
        }
        if err > 1.0 {
            self.last_rejected = true;
            let factor = (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            return Trial::Rejected { h_next: h * factor };
        }

        let mut factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-ALPHA) * self.err_old.powf(BETA)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        if self.last_rejected {
            factor = factor.min(1.0);
        }
        self.last_rejected = false;
        self.err_old = err.max(1e-4);

        let mid = midpoint(x, &x_new, &k, h);
        Trial::Accepted { x: x_new, f: k[6], mid, err, h_next: h * factor }
    }
}

/// Continuous extension evaluated at the half step.
fn midpoint<const N: usize>(x: &[f64; N], x_new: &[f64; N], k: &[[f64; N]; 7], h: f64) -> [f64; N] {
    let theta = 0.5;
    let mut out = [0.0; N];
    for i in 0..N {
        let rc2 = x_new[i] - x[i];
        let rc3 = h * k[0][i] - rc2;
        let rc4 = rc2 - h * k[6][i] - rc3;
        let rc5 = h * (0..7).map(|s| D[s] * k[s][i]).sum::<f64>();
        let theta1 = 1.0 - theta;
        out[i] = x[i] + theta * (rc2 + theta1 * (rc3 + theta * (rc4 + theta1 * rc5)));
    }
    out
}
