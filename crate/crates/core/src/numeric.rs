//! Low-level numerical helpers: Gauss–Legendre rules and reproducible
//! summation.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{ensure, Result};

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise summation in a fixed order. The result depends only on the
/// input order, never on thread scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
///
/// Newton iteration on the three-term Legendre recurrence, started from the
/// Tricomi-style cosine guess. O(n^2) work, fine for n in the low thousands.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    ensure(n >= 1, || "Gauss-Legendre rule needs at least one node".into())?;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A one-dimensional quadrature rule: parallel node and weight vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    /// Composite Gauss–Legendre rule on `[a, b]` split at `breakpoints`.
    ///
    /// `total_nodes` are shared between panels proportionally to their
    /// length, with at least `min_per_panel` nodes in each.
    pub fn composite(
        a: f64,
        b: f64,
        breakpoints: &[f64],
        total_nodes: usize,
        min_per_panel: usize,
    ) -> Result<Self> {
        ensure(a.is_finite() && b.is_finite() && a < b, || {
            format!("invalid interval [{a}, {b}]")
        })?;
        let mut edges = vec![a];
        let mut inner: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&x| x > a && x < b)
            .collect();
        inner.sort_by(f64::total_cmp);
        inner.dedup();
        edges.extend(inner);
        edges.push(b);

        let length = b - a;
        let mut nodes = Vec::with_capacity(total_nodes);
        let mut weights = Vec::with_capacity(total_nodes);
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let share = ((hi - lo) / length * total_nodes as f64).round() as usize;
            let count = share.max(min_per_panel).max(1);
            let (x, w) = gauss_legendre(count)?;
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Ok(Self { nodes, weights })
    }

    /// Plain Gauss–Legendre rule on `[a, b]`.
    pub fn gauss_legendre(a: f64, b: f64, n: usize) -> Result<Self> {
        Self::composite(a, b, &[], n, n)
    }

    /// Composite rule whose panels are given explicitly, `per_panel` nodes each.
    pub fn panels(edges: &[f64], per_panel: usize) -> Result<Self> {
        ensure(edges.len() >= 2, || "need at least one panel".into())?;
        let (x, w) = gauss_legendre(per_panel)?;
        let mut nodes = Vec::with_capacity(per_panel * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            ensure(hi > lo, || format!("panel edges must increase: {lo} >= {hi}"))?;
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(mid + half * xi);
                weights.push(half * wi);
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` with pairwise summation of the weighted samples.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .collect();
        pairwise_sum(&terms)
    }
}

/// `count` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let mut v: Vec<f64> = (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect();
            v[count - 1] = hi;
            v
        }
    }
}

/// `count` log-spaced points on `[lo, hi]` (both positive), endpoints exact.
pub fn logspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let mut v: Vec<f64> = linspace(lo.ln(), hi.ln(), count)
        .into_iter()
        .map(f64::exp)
        .collect();
    if let Some(first) = v.first_mut() {
        *first = lo;
    }
    if count > 1 {
        v[count - 1] = hi;
    }
    v
}
