use super::Trajectory;
use crate::error::{Error, Result};
use crate::model::Profile;

/// Anything that can be evaluated between a set of ordered knots.
pub trait DenseOutput<const N: usize> {
    /// Ordered abscissae at which the interpolant is exact.
    fn knots(&self) -> Vec<f64>;

    fn eval(&self, t: f64) -> Option<[f64; N]>;
}

impl<const N: usize> DenseOutput<N> for Trajectory<N> {
    fn knots(&self) -> Vec<f64> {
        self.nodes().iter().map(|n| n.t).collect()
    }

    fn eval(&self, t: f64) -> Option<[f64; N]> {
        self.interpolate(t)
    }
}

/// A profile evaluates to `[r, r_y]` as a function of `y`.
impl DenseOutput<2> for Profile {
    fn knots(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.y).collect()
    }

    fn eval(&self, y: f64) -> Option<[f64; 2]> {
        self.state_at(y)
    }
}

/// Bisects a bracketed sign change of `f` on `[a, b]` down to width `tol`.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    if f(b) == 0.0 {
        return b;
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Roots of `g(t, x(t))` located from sign changes between consecutive knots.
///
/// Each bracket is refined by bisection on the dense interpolant to width
/// `tol`. Returns an empty list when `g` never changes sign at the knots; an
/// even number of roots inside a single interval is not detected.
pub fn locate_event<const N: usize, D, G>(dense: &D, g: G, tol: f64) -> Result<Vec<f64>>
where
    D: DenseOutput<N>,
    G: Fn(f64, &[f64; N]) -> f64,
{
    let knots = dense.knots();
    if knots.len() < 2 {
        return Err(Error::InterpolantGap);
    }
    let value = |t: f64| dense.eval(t).map(|x| g(t, &x)).ok_or(Error::InterpolantGap);
    let mut roots = Vec::new();
    let mut prev_t = knots[0];
    let mut prev_g = value(prev_t)?;
    if prev_g == 0.0 {
        roots.push(prev_t);
    }
    for &t in &knots[1..] {
        let gt = value(t)?;
        if gt == 0.0 {
            roots.push(t);
        } else if prev_g != 0.0 && (gt < 0.0) != (prev_g < 0.0) {
            let f = |s: f64| value(s).unwrap_or(f64::NAN);
            roots.push(bisect_root(f, prev_t, t, tol));
        }
        prev_t = t;
        prev_g = gt;
    }
    Ok(roots)
}
