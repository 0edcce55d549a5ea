//! Gauss–Legendre rules and composite panel integration.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Integral of `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// The shared 16-point rule.
pub fn gl16() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

/// Composite integral over `panels` equal subintervals of [a, b].
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let rule = gl16();
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|j| {
            let lo = a + j as f64 * h;
            rule.integrate(lo, lo + h, &mut f)
        })
        .sum()
}

/// Breakpoints of [0, 1] refined geometrically (ratio 1/2) toward both ends,
/// `levels` panels per side.
pub fn endpoint_graded_breaks(levels: usize) -> Vec<f64> {
    let mut left: Vec<f64> = (1..=levels).map(|k| 0.5f64.powi(k as i32)).collect();
    left.reverse();
    let mut breaks = Vec::with_capacity(2 * levels + 2);
    breaks.push(0.0);
    breaks.extend(left.iter().copied());
    breaks.extend(left.iter().rev().skip(1).map(|s| 1.0 - s));
    breaks.push(1.0);
    breaks
}

/// Integral over [0, 1] with panels from [`endpoint_graded_breaks`].
pub fn graded<F: FnMut(f64) -> f64>(levels: usize, mut f: F) -> f64 {
    let rule = gl16();
    endpoint_graded_breaks(levels)
        .windows(2)
        .map(|w| rule.integrate(w[0], w[1], &mut f))
        .sum()
}
