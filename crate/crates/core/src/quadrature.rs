//! Gauss–Legendre and Gauss–Chebyshev rules.

use std::f64::consts::PI;

/// Nodes and weights of a one-dimensional rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Sum of `w_k f(x_k)` in node order.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss–Legendre rule with `m` nodes on [-1, 1], ascending.
pub fn gauss_legendre(m: usize) -> Rule {
    assert!(m >= 1, "Gauss-Legendre needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_m(x) and P_m'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Gauss–Legendre on `[a, b]` split into `panels` equal pieces.
pub fn composite_legendre(a: f64, b: f64, panels: usize, m: usize) -> Rule {
    let edges: Vec<f64> = (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
    panel_legendre(&edges, m)
}

/// Gauss–Legendre on consecutive intervals given by `edges`.
pub fn panel_legendre(edges: &[f64], m: usize) -> Rule {
    let base = gauss_legendre(m);
    let mut nodes = Vec::with_capacity(m * edges.len().saturating_sub(1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    Rule { nodes, weights }
}

/// Panel edges on `[0, r]` with first width `first` growing by `ratio`.
pub fn graded_edges(r: f64, first: f64, ratio: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut h = first;
    while *edges.last().unwrap() < r {
        let next = edges.last().unwrap() + h;
        edges.push(next);
        h *= ratio;
    }
    edges
}

/// Gauss–Chebyshev rule of the first kind: `int f(x)/sqrt(1-x^2) dx`.
pub fn chebyshev_first(m: usize) -> Rule {
    let mf = m as f64;
    let nodes = (1..=m).map(|k| ((2 * k - 1) as f64 * PI / (2.0 * mf)).cos()).collect();
    Rule {
        nodes,
        weights: vec![PI / mf; m],
    }
}

/// Gauss–Chebyshev rule of the second kind: `int f(x) sqrt(1-x^2) dx`.
pub fn chebyshev_second(m: usize) -> Rule {
    let step = PI / (m as f64 + 1.0);
    let (nodes, weights) = (1..=m)
        .map(|k| {
            let t = k as f64 * step;
            (t.cos(), step * t.sin().powi(2))
        })
        .unzip();
    Rule { nodes, weights }
}
