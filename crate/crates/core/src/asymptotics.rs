//! The double-integral limit
//! `h int_c^inf [int_c^inf (uv)^{-1/4} e^{sqrt(uv) - (u+v)/2 - hv/p} dv]^p du -> (2 sqrt(2 pi))^p`
//! as `h -> 0+`.
//!
//! The inner integral is taken in `tau = sqrt(v)` on a window around the
//! peak of the exponent, written as `-(sqrt u - sqrt v)^2/2 - hv/p` so that
//! no large terms cancel. The outer integral runs over geometric panels up
//! to `hu = 40`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::numeric::{gauss_legendre, pairwise_sum, Rule1d};

/// Relative size below which an integrand counts as decayed.
pub const DECAY_TOLERANCE: f64 = 1e-16;

/// Outer truncation: `h u` at the cutoff.
pub const OUTER_CUTOFF: f64 = 40.0;

/// Half-width of the inner window in standard deviations of the peak.
const INNER_HALF_WIDTH: f64 = 9.0;
const INNER_PANELS: usize = 6;
const INNER_NODES_PER_PANEL: usize = 16;
const OUTER_RATIO: f64 = 1.5;
const OUTER_NODES_PER_PANEL: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma13Params {
    pub c: f64,
    pub p: f64,
    pub h: f64,
}

impl Lemma13Params {
    pub fn new(c: f64, p: f64, h: f64) -> Result<Self> {
        ensure_positive("c", c)?;
        ensure(p.is_finite() && p >= 1.0, || format!("p must be finite and >= 1, got {p}"))?;
        ensure_positive("h", h)?;
        Ok(Self { c, p, h })
    }
}

/// `(2 sqrt(2 pi))^p`.
pub fn lemma13_limit(p: f64) -> f64 {
    (2.0 * (2.0 * std::f64::consts::PI).sqrt()).powf(p)
}

/// `-(sqrt u - sqrt v)^2 / 2 - h v / p`, never positive.
#[inline]
pub fn stabilized_exponent(u: f64, v: f64, h: f64, p: f64) -> f64 {
    let d = u.sqrt() - v.sqrt();
    -0.5 * d * d - h * v / p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma13Value {
    pub params: Lemma13Params,
    pub value: f64,
    /// Largest exponent met during the evaluation (must be `<= 0`).
    pub max_exponent: f64,
    pub outer_cutoff: f64,
    pub outer_nodes: usize,
}

struct Inner {
    value: f64,
    max_exponent: f64,
    /// Integrand at the window edges relative to its largest sample.
    edge_ratio: f64,
}

fn inner_integral(u: f64, params: &Lemma13Params, gl: &(Vec<f64>, Vec<f64>)) -> Inner {
    let Lemma13Params { c, p, h } = *params;
    let sigma = u.sqrt();
    let stretch = 1.0 + 2.0 * h / p;
    let width = INNER_HALF_WIDTH / stretch.sqrt();
    let lo_bound = c.sqrt();
    let peak = (sigma / stretch).max(lo_bound);
    let lo = (peak - width).max(lo_bound);
    let hi = peak + width;

    let integrand = |tau: f64| -> (f64, f64) {
        let v = tau * tau;
        let e = stabilized_exponent(u, v, h, p);
        // (uv)^{-1/4} dv = 2 u^{-1/4} tau^{1/2} dtau
        (2.0 * u.powf(-0.25) * tau.sqrt() * e.exp(), e)
    };

    let step = (hi - lo) / INNER_PANELS as f64;
    let (x, w) = gl;
    let mut terms = Vec::with_capacity(INNER_PANELS * x.len());
    let mut max_exponent = f64::NEG_INFINITY;
    let mut largest: f64 = 0.0;
    for k in 0..INNER_PANELS {
        let a = lo + k as f64 * step;
        let half = 0.5 * step;
        let mid = a + half;
        for (xi, wi) in x.iter().zip(w) {
            let (f, e) = integrand(mid + half * xi);
            max_exponent = max_exponent.max(e);
            largest = largest.max(f);
            terms.push(half * wi * f);
        }
    }
    let upper_edge = integrand(hi).0;
    let lower_edge = if lo > lo_bound { integrand(lo).0 } else { 0.0 };
    Inner {
        value: pairwise_sum(&terms),
        max_exponent,
        edge_ratio: upper_edge.max(lower_edge) / largest,
    }
}

/// `h int_c^U [inner(u)]^p du` with `U = 40 (1 + 2h/p) / h`.
///
/// Fails with [`Error::Truncation`] if either integrand has not decayed
/// below [`DECAY_TOLERANCE`] of its maximum at a cutoff, and with
/// [`Error::SelfCheck`] if a positive exponent is ever produced.
pub fn lemma13_value(params: &Lemma13Params) -> Result<Lemma13Value> {
    let params = Lemma13Params::new(params.c, params.p, params.h)?;
    let Lemma13Params { c, p, h } = params;
    let cutoff = OUTER_CUTOFF * (1.0 + 2.0 * h / p) / h;
    ensure(cutoff > c, || {
        format!("h = {h} too large: outer cutoff {cutoff} does not exceed c = {c}")
    })?;

    let mut edges = vec![c];
    while *edges.last().unwrap() * OUTER_RATIO < cutoff {
        let next = edges.last().unwrap() * OUTER_RATIO;
        edges.push(next);
    }
    edges.push(cutoff);
    let outer = Rule1d::panels(&edges, OUTER_NODES_PER_PANEL)?;
    let gl = gauss_legendre(INNER_NODES_PER_PANEL)?;

    let inner: Vec<Inner> = outer
        .nodes
        .par_iter()
        .map(|&u| inner_integral(u, &params, &gl))
        .collect();

    let max_exponent = inner.iter().map(|i| i.max_exponent).fold(f64::NEG_INFINITY, f64::max);
    if max_exponent > 0.0 {
        return Err(Error::SelfCheck(format!("positive exponent {max_exponent}")));
    }
    if let Some(bad) = inner.iter().find(|i| !(i.edge_ratio <= DECAY_TOLERANCE)) {
        return Err(Error::Truncation(format!(
            "inner integrand at the window edge is {:e} of its maximum",
            bad.edge_ratio
        )));
    }

    let outer_values: Vec<f64> = inner.iter().map(|i| i.value.powf(p)).collect();
    let running_max = outer_values.iter().copied().fold(0.0, f64::max);
    let tail = inner_integral(cutoff, &params, &gl).value.powf(p);
    if !(tail <= DECAY_TOLERANCE * running_max) {
        return Err(Error::Truncation(format!(
            "outer integrand at u = {cutoff} is {:e} of its maximum",
            tail / running_max
        )));
    }

    let terms: Vec<f64> = outer_values
        .iter()
        .zip(&outer.weights)
        .map(|(f, w)| w * f)
        .collect();
    Ok(Lemma13Value {
        params,
        value: h * pairwise_sum(&terms),
        max_exponent,
        outer_cutoff: cutoff,
        outer_nodes: outer.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma13Extrapolation {
    pub c: f64,
    pub p: f64,
    pub hs: Vec<f64>,
    /// `lemma13_value` at each `h`.
    pub values: Vec<f64>,
    /// Polynomial extrapolation to `h = 0` through the first `k + 1` values.
    pub partial_estimates: Vec<f64>,
    pub estimate: f64,
    /// The raw values approach `(2 sqrt(2 pi))^p` monotonically.
    pub monotone: bool,
}

/// Value at 0 of the interpolating polynomial through `(x_i, y_i)` (Neville).
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut table = y.to_vec();
    for level in 1..x.len() {
        for i in 0..x.len() - level {
            let (xi, xj) = (x[i], x[i + level]);
            table[i] = (xj * table[i] - xi * table[i + 1]) / (xj - xi);
        }
    }
    table[0]
}

/// Evaluate at each `h` (at least three, strictly decreasing) and
/// extrapolate to `h = 0`.
pub fn lemma13_extrapolate(c: f64, p: f64, hs: &[f64]) -> Result<Lemma13Extrapolation> {
    ensure(hs.len() >= 3, || format!("need at least 3 values of h, got {}", hs.len()))?;
    for &h in hs {
        Lemma13Params::new(c, p, h)?;
    }
    ensure(hs.windows(2).all(|w| w[1] < w[0]), || {
        "h values must be strictly decreasing".into()
    })?;
    let values = hs
        .iter()
        .map(|&h| lemma13_value(&Lemma13Params { c, p, h }).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let partial_estimates: Vec<f64> = (1..=hs.len())
        .map(|k| neville_at_zero(&hs[..k], &values[..k]))
        .collect();
    let target = lemma13_limit(p);
    let monotone = values
        .windows(2)
        .all(|w| (w[1] - target).abs() <= (w[0] - target).abs());
    Ok(Lemma13Extrapolation {
        c,
        p,
        hs: hs.to_vec(),
        estimate: *partial_estimates.last().expect("at least three values"),
        values,
        partial_estimates,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_is_stable_and_nonpositive() {
        // sqrt(u) = 1e6, sqrt(v) = 1e6 + 0.5: the exponent is -1/8 exactly
        let (u, v) = (1e12, (1e6 + 0.5f64).powi(2));
        let stable = stabilized_exponent(u, v, 0.0, 1.0);
        assert!((stable + 0.125).abs() < 1e-9, "{stable}");
        assert!(stabilized_exponent(4.0, 9.0, 0.3, 2.0) <= 0.0);
    }

    #[test]
    fn neville_reproduces_polynomials() {
        let x = [0.5, 0.25, 0.125, 0.0625];
        let y: Vec<f64> = x.iter().map(|h| 3.0 - 2.0 * h + 5.0 * h * h - h * h * h).collect();
        assert!((neville_at_zero(&x, &y) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn value_near_limit() {
        let v = lemma13_value(&Lemma13Params::new(1.0, 2.0, 1e-4).unwrap()).unwrap();
        let target = 8.0 * std::f64::consts::PI;
        assert!(v.value > 0.0);
        assert!(((v.value - target) / target).abs() < 0.02, "{}", v.value);
        assert!(v.max_exponent <= 0.0);
    }

    #[test]
    fn positive_for_coarse_parameters() {
        for &(c, p, h) in &[(0.1, 1.0, 0.5), (5.0, 3.0, 0.05), (1.0, 1.5, 2.0)] {
            assert!(lemma13_value(&Lemma13Params::new(c, p, h).unwrap()).unwrap().value > 0.0);
        }
    }

    #[test]
    fn extrapolation_preconditions() {
        assert!(lemma13_extrapolate(1.0, 2.0, &[1e-2]).is_err());
        assert!(lemma13_extrapolate(1.0, 2.0, &[1e-2, 1e-3, 1e-2]).is_err());
        assert!(Lemma13Params::new(0.0, 2.0, 1e-2).is_err());
        assert!(Lemma13Params::new(1.0, 0.5, 1e-2).is_err());
    }
}
