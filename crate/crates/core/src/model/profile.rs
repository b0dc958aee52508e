use serde::Serialize;

use super::params::Equation;

/// Which coordinate chart a [`ChartState`] lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chart {
    /// `y` as a graph over `r`; valid from the axis up to the slope blow-up.
    YOfR,
    /// `r` as a graph over `y`; valid after the blow-up.
    ROfY,
}

/// State in one of the two graph charts: independent variable `t`, dependent `u`, slope `du`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartState {
    pub chart: Chart,
    pub t: f64,
    pub u: f64,
    pub du: f64,
}

/// Arc-length parametrised curve point; `theta` is the tangent angle from the `r` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcState {
    pub s: f64,
    pub r: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub y: f64,
    pub r: f64,
    pub r_y: f64,
    pub r_yy: f64,
}

impl Sample {
    /// Support function `r - y r_y`.
    pub fn support(&self) -> f64 {
        self.r - self.y * self.r_y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProfileMethod {
    ChartSwitch,
    ArcLength,
}

/// How the curve was started.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Start {
    /// Singular start on the axis: `r(mu) = 0`, `r_y(mu) = +inf`.
    Axis { mu: f64 },
    /// Even solution started at its maximum `r(0) = r1`, `r_y(0) = 0`.
    Even { r1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Termination {
    ReachedYMax,
    RadiusFloor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveStats {
    pub rel: f64,
    pub abs: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
    pub termination: Termination,
}

/// Dense, ordered sampling of a solved profile curve `(r(y), y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    pub equation: Equation,
    pub start: Start,
    pub samples: Vec<Sample>,
    pub method: ProfileMethod,
    /// Height at which the integration changed from the `y(r)` to the `r(y)` chart.
    pub switch_y: Option<f64>,
    /// Last height reached.
    pub y_max: f64,
    pub stats: SolveStats,
}

/// Structural points of a solved profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Events {
    /// Height of the maximum radius, where `r_y` changes sign.
    pub y1: f64,
    /// Inflection height, where `r_yy` changes sign.
    pub y2: f64,
    /// Maximum radius `r(y1)`.
    pub r1: f64,
    /// Limiting second derivative of `y(r)` at the singular start.
    pub kappa0: f64,
}

impl Profile {
    pub fn y_range(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.y, self.samples.last()?.y))
    }

    pub fn mu(&self) -> Option<f64> {
        match self.start {
            Start::Axis { mu } => Some(mu),
            Start::Even { .. } => None,
        }
    }

    /// Interpolated `(r, r_y)` at height `y`, or `None` outside the sampled range.
    ///
    /// Intervals are interpolated by quintic Hermite polynomials built from
    /// `(r, r_y, r_yy)` at both ends. Where both ends are steep (`|r_y| > 1`
    /// with one sign, as near the singular start) the curve is interpolated as
    /// `y(r)` instead and inverted by bisection, since `r(y)` has unbounded
    /// derivatives there.
    pub fn state_at(&self, y: f64) -> Option<[f64; 2]> {
        let (lo, hi) = self.y_range()?;
        if !(lo..=hi).contains(&y) {
            return None;
        }
        let i = self.interval_index(y);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        if y == a.y {
            return Some([a.r, a.r_y]);
        }
        if y == b.y {
            return Some([b.r, b.r_y]);
        }
        let steep = a.r_y.abs() > 1.0 && b.r_y.abs() > 1.0 && (a.r_y > 0.0) == (b.r_y > 0.0);
        if steep {
            Some(inverse_chart_state(a, b, y))
        } else {
            let h = b.y - a.y;
            let theta = (y - a.y) / h;
            let (r, r_y) = quintic_hermite(h, [a.r, a.r_y, a.r_yy], [b.r, b.r_y, b.r_yy], theta);
            Some([r, r_y])
        }
    }

    pub fn radius_at(&self, y: f64) -> Option<f64> {
        self.state_at(y).map(|s| s[0])
    }

    /// Index `i` with `samples[i].y <= y <= samples[i + 1].y`.
    fn interval_index(&self, y: f64) -> usize {
        let k = self.samples.partition_point(|s| s.y <= y);
        k.clamp(1, self.samples.len() - 1) - 1
    }

    /// Sample with the largest radius.
    pub fn max_radius_sample(&self) -> Option<&Sample> {
        self.samples.iter().max_by(|a, b| a.r.total_cmp(&b.r))
    }

    pub fn min_support(&self) -> Option<f64> {
        self.samples.iter().map(Sample::support).min_by(f64::total_cmp)
    }
}

/// Value and first derivative of the quintic Hermite interpolant on an interval
/// of width `h`, given `[f, f', f'']` at both ends and local coordinate `theta`.
pub(crate) fn quintic_hermite(h: f64, left: [f64; 3], right: [f64; 3], theta: f64) -> (f64, f64) {
    let t = theta;
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h20 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h21 = 0.5 * (t3 - 2.0 * t4 + t5);
    let h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;

    let d00 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let d10 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let d20 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let d21 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    let d11 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let d01 = -d00;

    let [f0, g0, s0] = left;
    let [f1, g1, s1] = right;
    let value = f0 * h00 + h * g0 * h10 + h * h * s0 * h20 + h * h * s1 * h21 + h * g1 * h11 + f1 * h01;
    let slope = (f0 * d00 + f1 * d01) / h + g0 * d10 + g1 * d11 + h * (s0 * d20 + s1 * d21);
    (value, slope)
}

/// Interpolates a steep interval as `y(r)` and inverts it at height `y`.
fn inverse_chart_state(a: &Sample, b: &Sample, y: f64) -> [f64; 2] {
    // y_r = 1/r_y and y_rr = -r_yy / r_y^3 under the inversion; `h` is negative
    // where the radius decreases
    let left = [a.y, 1.0 / a.r_y, -a.r_yy / a.r_y.powi(3)];
    let right = [b.y, 1.0 / b.r_y, -b.r_yy / b.r_y.powi(3)];
    let h = b.r - a.r;
    let eval = |theta: f64| quintic_hermite(h, left, right, theta);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eval(mid).0 < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let (_, y_r) = eval(theta);
    [a.r + theta * h, 1.0 / y_r]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats() -> SolveStats {
        SolveStats {
            rel: 0.0,
            abs: 0.0,
            accepted_steps: 0,
            rejected_steps: 0,
            rhs_evals: 0,
            termination: Termination::ReachedYMax,
        }
    }

    fn sphere_profile(ys: &[f64]) -> Profile {
        let samples = ys
            .iter()
            .map(|&y| {
                let r = (1.0 - y * y).sqrt();
                Sample { y, r, r_y: -y / r, r_yy: -1.0 / r.powi(3) }
            })
            .collect();
        Profile {
            equation: Equation { n: 2, lambda: 0.5 },
            start: Start::Axis { mu: -1.0 },
            samples,
            method: ProfileMethod::ChartSwitch,
            switch_y: None,
            y_max: ys[ys.len() - 1],
            stats: stats(),
        }
    }

    #[test]
    fn quintic_reproduces_quintic_polynomials() {
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) + 0.25 * x.powi(5);
        let dp = |x: f64| -2.0 + 1.5 * x * x + 1.25 * x.powi(4);
        let ddp = |x: f64| 3.0 * x + 5.0 * x.powi(3);
        let (a, b) = (0.3, 1.7);
        for k in 0..=10 {
            let x = a + (b - a) * k as f64 / 10.0;
            let (v, d) = quintic_hermite(b - a, [p(a), dp(a), ddp(a)], [p(b), dp(b), ddp(b)], (x - a) / (b - a));
            assert!((v - p(x)).abs() < 1e-13);
            assert!((d - dp(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_interpolation_including_steep_start() {
        let mut ys: Vec<f64> = (0..200).map(|k| -1.0 + 1e-10 * 1.12f64.powi(k)).filter(|&y| y < -0.5).collect();
        ys.extend((0..=100).map(|k| -0.5 + k as f64 * 0.01));
        let prof = sphere_profile(&ys);
        for k in 1..400 {
            let y = -1.0 + 1e-9 + (1.9 - 1e-9) * k as f64 / 400.0;
            if y > *ys.last().unwrap() {
                break;
            }
            let r = prof.radius_at(y).unwrap();
            assert!((r - (1.0 - y * y).sqrt()).abs() < 1e-9, "y={y} r={r}");
        }
        assert!(prof.radius_at(-2.0).is_none());
    }
}
