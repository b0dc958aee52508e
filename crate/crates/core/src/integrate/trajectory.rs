use super::IntegrateStats;

/// Accepted integration point with state and derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node<const N: usize> {
    pub t: f64,
    pub x: [f64; N],
    pub dx: [f64; N],
}

/// Accepted nodes of an integration together with a dense interpolant.
///
/// On each interval the interpolant is the cubic Hermite polynomial through
/// both end values and derivatives plus a quartic bubble `c theta^2 (1-theta)^2`
/// fixed by the scheme's own midpoint value.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    nodes: Vec<Node<N>>,
    midpoints: Vec<[f64; N]>,
    /// True when the stop predicate ended the integration before `t_end`.
    pub stopped: bool,
    pub stats: IntegrateStats,
}

impl<const N: usize> Trajectory<N> {
    pub(crate) fn new(first: Node<N>) -> Self {
        Trajectory { nodes: vec![first], midpoints: Vec::new(), stopped: false, stats: IntegrateStats::default() }
    }

    pub(crate) fn push(&mut self, node: Node<N>, mid: [f64; N]) {
        self.nodes.push(node);
        self.midpoints.push(mid);
    }

    pub fn nodes(&self) -> &[Node<N>] {
        &self.nodes
    }

    pub fn first(&self) -> &Node<N> {
        &self.nodes[0]
    }

    pub fn last(&self) -> &Node<N> {
        &self.nodes[self.nodes.len() - 1]
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.first().t, self.last().t)
    }

    /// Interpolated state at `t`, or `None` outside the integrated range.
    pub fn interpolate(&self, t: f64) -> Option<[f64; N]> {
        let (lo, hi) = self.t_range();
        if !(lo..=hi).contains(&t) {
            return None;
        }
        if self.nodes.len() == 1 {
            return Some(self.nodes[0].x);
        }
        let k = self.nodes.partition_point(|nd| nd.t <= t);
        let i = k.clamp(1, self.nodes.len() - 1) - 1;
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let h = b.t - a.t;
        let th = (t - a.t) / h;
        let mut out = [0.0; N];
        #[allow(clippy::needless_range_loop)]
        for j in 0..N {
            let herm = |s: f64| {
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * a.x[j]
                    + (s3 - 2.0 * s2 + s) * h * a.dx[j]
                    + (-2.0 * s3 + 3.0 * s2) * b.x[j]
                    + (s3 - s2) * h * b.dx[j]
            };
            let bubble = 16.0 * (self.midpoints[i][j] - herm(0.5));
            out[j] = herm(th) + bubble * th * th * (1.0 - th) * (1.0 - th);
        }
        Some(out)
    }
}
