//! Gaussian probability measures `dv_t` on `C^n` and polar-grid quadrature
//! against them.
//!
//! A [`QuadratureRule`] stores only the geometry of the grid (polar nodes and
//! Lebesgue area weights per complex coordinate). The Gaussian density is
//! applied at integration time, so one rule serves every measure whose scale
//! is at least the scale the rule was built for: a sharper Gaussian only
//! makes the truncation radius more generous.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::numeric::{pairwise_sum, pairwise_sum_complex, Rule1d};
use crate::special::ln_gamma;

/// Largest dimension served by grid quadrature.
pub const MAX_GRID_DIMENSION: usize = 2;

/// Additive margin in the truncation radius, absorbing polynomial growth of
/// the integrand up to degree ~20.
pub const TRUNCATION_MARGIN: f64 = 40.0;

pub const DEFAULT_RADIAL_NODES_1D: usize = 400;
pub const DEFAULT_ANGULAR_NODES_1D: usize = 256;
pub const DEFAULT_RADIAL_NODES_2D: usize = 48;
pub const DEFAULT_ANGULAR_NODES_2D: usize = 32;

/// The probability measure `dv_t(z) = (t/pi)^n e^{-t|z|^2} dv(z)` on `C^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianMeasure {
    dimension: usize,
    scale: f64,
}

impl GaussianMeasure {
    pub fn new(dimension: usize, scale: f64) -> Result<Self> {
        ensure(dimension >= 1, || "dimension must be at least 1".into())?;
        ensure_positive("scale", scale)?;
        Ok(Self { dimension, scale })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Density of `dv_t` with respect to Lebesgue measure on `C^n`.
    pub fn density(&self, z: &[Complex64]) -> f64 {
        let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        (self.scale / PI).powi(self.dimension as i32) * (-self.scale * r2).exp()
    }
}

/// A multi-index `m = (m_1, ..., m_n)` of nonnegative integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        ensure(!entries.is_empty(), || "multi-index needs at least one entry".into())?;
        Ok(Self(entries))
    }

    pub fn zero(dimension: usize) -> Self {
        Self(vec![0; dimension.max(1)])
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// `|m| = m_1 + ... + m_n`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `ln(m!) = ln(m_1! ... m_n!)`.
    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&k| ln_gamma(k as f64 + 1.0)).sum()
    }

    pub fn factorial(&self) -> f64 {
        self.ln_factorial().exp()
    }

    /// `z^m = z_1^{m_1} ... z_n^{m_n}`.
    pub fn monomial(&self, z: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(z)
            .map(|(&k, &zk)| zk.powu(k))
            .product()
    }

    /// Every multi-index of the given dimension with each entry `<= max_entry`,
    /// in lexicographic order.
    pub fn all_bounded(dimension: usize, max_entry: u32) -> Vec<Self> {
        let mut out = vec![Vec::new()];
        for _ in 0..dimension {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=max_entry).map(move |k| {
                        let mut next = prefix.clone();
                        next.push(k);
                        next
                    })
                })
                .collect();
        }
        out.into_iter().map(Self).collect()
    }

    /// Every multi-index of the given dimension with `|m| <= max_order`.
    pub fn all_up_to_order(dimension: usize, max_order: u32) -> Vec<Self> {
        Self::all_bounded(dimension, max_order)
            .into_iter()
            .filter(|m| m.order() <= max_order)
            .collect()
    }
}

/// Options for [`QuadratureRule`] construction beyond the defaults of
/// [`build_rule`].
#[derive(Debug, Clone)]
pub struct RuleBuilder {
    dimension: usize,
    scale: f64,
    tol: f64,
    radial_nodes: Option<usize>,
    angular_nodes: Option<usize>,
    shift: f64,
    radial_breakpoints: Vec<f64>,
}

impl RuleBuilder {
    pub fn new(dimension: usize, scale: f64, tol: f64) -> Self {
        Self {
            dimension,
            scale,
            tol,
            radial_nodes: None,
            angular_nodes: None,
            shift: 0.0,
            radial_breakpoints: Vec::new(),
        }
    }

    pub fn radial_nodes(mut self, n: usize) -> Self {
        self.radial_nodes = Some(n);
        self
    }

    pub fn angular_nodes(mut self, n: usize) -> Self {
        self.angular_nodes = Some(n);
        self
    }

    /// Extend the truncation radius by `shift`.
    ///
    /// Integrands carrying an exponential tilt such as `|e^{s<z,a>}|` peak at
    /// radius `s|a|/(2t)` instead of 0; the Gaussian tail bound must be
    /// measured from there.
    pub fn shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    /// Radii where the integrand has a jump; they become panel edges of the
    /// radial rule.
    pub fn radial_breakpoints(mut self, points: &[f64]) -> Self {
        self.radial_breakpoints = points.to_vec();
        self
    }

    pub fn build(self) -> Result<QuadratureRule> {
        ensure(
            (1..=MAX_GRID_DIMENSION).contains(&self.dimension),
            || {
                format!(
                    "grid quadrature supports n in 1..={MAX_GRID_DIMENSION}, got n = {}",
                    self.dimension
                )
            },
        )?;
        ensure_positive("scale", self.scale)?;
        ensure(self.tol > 0.0 && self.tol < 1.0, || {
            format!("tolerance must lie in (0, 1), got {}", self.tol)
        })?;
        ensure(self.shift.is_finite() && self.shift >= 0.0, || {
            format!("shift must be nonnegative, got {}", self.shift)
        })?;
        let (default_radial, default_angular) = if self.dimension == 1 {
            (DEFAULT_RADIAL_NODES_1D, DEFAULT_ANGULAR_NODES_1D)
        } else {
            (DEFAULT_RADIAL_NODES_2D, DEFAULT_ANGULAR_NODES_2D)
        };
        let radial_count = self.radial_nodes.unwrap_or(default_radial);
        let angular = self.angular_nodes.unwrap_or(default_angular);
        ensure(radial_count >= 1 && angular >= 1, || {
            "node counts must be positive".into()
        })?;

        let radius = truncation_radius(self.scale, self.tol) + self.shift;
        let radial = Rule1d::composite(
            0.0,
            radius,
            &self.radial_breakpoints,
            radial_count,
            radial_count.min(16),
        )?;

        let dtheta = 2.0 * PI / angular as f64;
        let mut coord_nodes = Vec::with_capacity(radial.len() * angular);
        let mut coord_area = Vec::with_capacity(radial.len() * angular);
        for (&r, &w) in radial.nodes.iter().zip(&radial.weights) {
            for l in 0..angular {
                coord_nodes.push(Complex64::from_polar(r, l as f64 * dtheta));
                coord_area.push(w * r * dtheta);
            }
        }

        let rule = QuadratureRule {
            dimension: self.dimension,
            scale: self.scale,
            tol: self.tol,
            radius,
            radial,
            angular,
            coord_nodes,
            coord_area,
        };
        let mass = rule.total_mass(&GaussianMeasure::new(self.dimension, self.scale)?)?;
        if (mass - 1.0).abs() > self.tol {
            return Err(Error::SelfCheck(format!(
                "rule integrates 1 to {mass} (tolerance {})",
                self.tol
            )));
        }
        Ok(rule)
    }
}

/// Truncation radius `R = sqrt((ln(1/tol) + 40) / t)`.
pub fn truncation_radius(scale: f64, tol: f64) -> f64 {
    (((1.0 / tol).ln() + TRUNCATION_MARGIN) / scale).sqrt()
}

/// Tensor polar grid for integration against `dv_t` on `C^n`, `n <= 2`.
///
/// Per complex coordinate: a Gauss–Legendre rule in the radius on `[0, R]`
/// times a uniform trapezoid rule in the angle. Node `i` of an `n = 2` grid
/// is `(c[i / m], c[i % m])` with `c` the per-coordinate nodes.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    dimension: usize,
    scale: f64,
    tol: f64,
    radius: f64,
    radial: Rule1d,
    angular: usize,
    coord_nodes: Vec<Complex64>,
    coord_area: Vec<f64>,
}

/// Rule with default node counts for `dv_t` on `C^n`.
pub fn build_rule(n: usize, t: f64, tol: f64) -> Result<QuadratureRule> {
    RuleBuilder::new(n, t, tol).build()
}

impl QuadratureRule {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Smallest measure scale this rule's truncation radius was sized for.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial.len()
    }

    pub fn angular_nodes(&self) -> usize {
        self.angular
    }

    /// Nodes per complex coordinate.
    pub fn coordinate_len(&self) -> usize {
        self.coord_nodes.len()
    }

    pub fn coordinate_nodes(&self) -> &[Complex64] {
        &self.coord_nodes
    }

    /// Total node count, `coordinate_len()^n`.
    pub fn len(&self) -> usize {
        self.coord_nodes.len().pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.coord_nodes.is_empty()
    }

    /// Write node `index` into `buf[..n]`.
    pub fn node(&self, index: usize, buf: &mut [Complex64]) {
        let m = self.coord_nodes.len();
        match self.dimension {
            1 => buf[0] = self.coord_nodes[index],
            _ => {
                buf[0] = self.coord_nodes[index / m];
                buf[1] = self.coord_nodes[index % m];
            }
        }
    }

    /// Check that integrating against `measure` with this rule is sound.
    pub fn check_measure(&self, measure: &GaussianMeasure) -> Result<()> {
        if measure.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: measure.dimension(),
            });
        }
        if measure.scale() < self.scale * (1.0 - 1e-12) {
            return Err(Error::RuleMismatch(format!(
                "rule sized for scale >= {} cannot integrate against dv_{}",
                self.scale,
                measure.scale()
            )));
        }
        Ok(())
    }

    /// Per-coordinate weights of `dA_t`: area weight times `(t/pi) e^{-t|c|^2}`.
    pub fn coordinate_weights(&self, scale: f64) -> Vec<f64> {
        self.coord_nodes
            .iter()
            .zip(&self.coord_area)
            .map(|(c, &a)| a * scale / PI * (-scale * c.norm_sqr()).exp())
            .collect()
    }

    fn total_mass(&self, measure: &GaussianMeasure) -> Result<f64> {
        self.check_measure(measure)?;
        let one = pairwise_sum(&self.coordinate_weights(measure.scale()));
        Ok(one.powi(self.dimension as i32))
    }

    /// `sum_i prod_k factors[k][i_k] * f_i` over the tensor grid, with a
    /// fixed summation order.
    pub(crate) fn contract(&self, factors: &[Vec<Complex64>], f: &[Complex64]) -> Complex64 {
        let m = self.coord_nodes.len();
        debug_assert_eq!(factors.len(), self.dimension);
        debug_assert_eq!(f.len(), self.len());
        match self.dimension {
            1 => {
                let terms: Vec<Complex64> =
                    factors[0].iter().zip(f).map(|(a, v)| a * v).collect();
                pairwise_sum_complex(&terms)
            }
            _ => {
                let rows: Vec<Complex64> = (0..m)
                    .into_par_iter()
                    .map(|i| {
                        let row = &f[i * m..(i + 1) * m];
                        let terms: Vec<Complex64> =
                            factors[1].iter().zip(row).map(|(a, v)| a * v).collect();
                        factors[0][i] * pairwise_sum_complex(&terms)
                    })
                    .collect();
                pairwise_sum_complex(&rows)
            }
        }
    }

    /// Real-valued variant of [`contract`](Self::contract).
    pub(crate) fn contract_real(&self, factors: &[Vec<f64>], f: &[f64]) -> f64 {
        let m = self.coord_nodes.len();
        match self.dimension {
            1 => {
                let terms: Vec<f64> = factors[0].iter().zip(f).map(|(a, v)| a * v).collect();
                pairwise_sum(&terms)
            }
            _ => {
                let rows: Vec<f64> = (0..m)
                    .into_par_iter()
                    .map(|i| {
                        let row = &f[i * m..(i + 1) * m];
                        let terms: Vec<f64> =
                            factors[1].iter().zip(row).map(|(a, v)| a * v).collect();
                        factors[0][i] * pairwise_sum(&terms)
                    })
                    .collect();
                pairwise_sum(&rows)
            }
        }
    }
}

/// Samples of a function on the nodes of a [`QuadratureRule`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dimension: usize,
    /// Truncation radius of the rule the samples belong to.
    radius: f64,
    values: Vec<Complex64>,
}

impl GridFunction {
    /// Sample `f` at every node of `rule`.
    pub fn sample<F>(rule: &QuadratureRule, f: F) -> Self
    where
        F: Fn(&[Complex64]) -> Complex64 + Sync,
    {
        let n = rule.dimension();
        let values = (0..rule.len())
            .into_par_iter()
            .map(|i| {
                let mut buf = [Complex64::new(0.0, 0.0); MAX_GRID_DIMENSION];
                rule.node(i, &mut buf);
                f(&buf[..n])
            })
            .collect();
        Self {
            dimension: n,
            radius: rule.radius(),
            values,
        }
    }

    /// Sample a real-valued `f`.
    pub fn sample_real<F>(rule: &QuadratureRule, f: F) -> Self
    where
        F: Fn(&[Complex64]) -> f64 + Sync,
    {
        Self::sample(rule, |z| Complex64::new(f(z), 0.0))
    }

    pub fn constant(rule: &QuadratureRule, value: Complex64) -> Self {
        Self {
            dimension: rule.dimension(),
            radius: rule.radius(),
            values: vec![value; rule.len()],
        }
    }

    pub fn from_values(rule: &QuadratureRule, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::RuleMismatch(format!(
                "{} samples for a rule with {} nodes",
                values.len(),
                rule.len()
            )));
        }
        Ok(Self {
            dimension: rule.dimension(),
            radius: rule.radius(),
            values,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise modulus `|f|`.
    pub fn abs(&self) -> Self {
        Self {
            dimension: self.dimension,
            radius: self.radius,
            values: self
                .values
                .iter()
                .map(|v| Complex64::new(v.norm(), 0.0))
                .collect(),
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self {
            dimension: self.dimension,
            radius: self.radius,
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            dimension: self.dimension,
            radius: self.radius,
            values: self.values.iter().copied().map(f).collect(),
        }
    }

    pub(crate) fn check_rule(&self, rule: &QuadratureRule) -> Result<()> {
        if self.dimension != rule.dimension() {
            return Err(Error::DimensionMismatch {
                expected: rule.dimension(),
                found: self.dimension,
            });
        }
        if self.values.len() != rule.len() || self.radius != rule.radius() {
            return Err(Error::RuleMismatch(format!(
                "function sampled on {} nodes within radius {}, rule has {} nodes within radius {}",
                self.values.len(),
                self.radius,
                rule.len(),
                rule.radius()
            )));
        }
        Ok(())
    }
}

/// Quadrature approximation of `int f dv_t`.
pub fn integrate(
    f: &GridFunction,
    measure: &GaussianMeasure,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    rule.check_measure(measure)?;
    f.check_rule(rule)?;
    let w: Vec<Complex64> = rule
        .coordinate_weights(measure.scale())
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    let factors = vec![w; rule.dimension()];
    Ok(rule.contract(&factors, f.values()))
}

/// `ln int |z^m|^p dv_t = sum_k [ln Gamma(p m_k / 2 + 1) - (p m_k / 2) ln t]`.
pub fn ln_gaussian_monomial_moment(m: &MultiIndex, p: f64, t: f64) -> Result<f64> {
    ensure_positive("p", p)?;
    ensure_positive("t", t)?;
    let ln_t = t.ln();
    Ok(m
        .entries()
        .iter()
        .map(|&mk| {
            let half = 0.5 * p * mk as f64;
            ln_gamma(half + 1.0) - half * ln_t
        })
        .sum())
}

/// Closed form of `int |z^m|^p dv_t`, evaluated in log space.
pub fn gaussian_monomial_moment(m: &MultiIndex, p: f64, t: f64) -> Result<f64> {
    Ok(ln_gaussian_monomial_moment(m, p, t)?.exp())
}

/// `(int |f|^p dv_s)^{1/p}` by quadrature.
pub fn lp_norm(f: &GridFunction, p: f64, s: f64, rule: &QuadratureRule) -> Result<f64> {
    ensure(p.is_finite() && p >= 1.0, || format!("p must be >= 1, got {p}"))?;
    let measure = GaussianMeasure::new(rule.dimension(), s)?;
    rule.check_measure(&measure)?;
    f.check_rule(rule)?;
    let weights = rule.coordinate_weights(s);
    let factors = vec![weights; rule.dimension()];
    let powered: Vec<f64> = f.values().iter().map(|v| v.norm().powf(p)).collect();
    let integral = rule.contract_real(&factors, &powered);
    Ok(integral.max(0.0).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalization_n1() {
        let rule = build_rule(1, 1.0, 1e-10).unwrap();
        let one = GridFunction::constant(&rule, c(1.0, 0.0));
        let mu = GaussianMeasure::new(1, 1.0).unwrap();
        let v = integrate(&one, &mu, &rule).unwrap();
        assert!((v.re - 1.0).abs() <= 1e-10 && v.im.abs() < 1e-15);
    }

    #[test]
    fn larger_scale_gives_smaller_radius() {
        let r1 = build_rule(1, 1.0, 1e-10).unwrap();
        let r2 = build_rule(1, 2.0, 1e-10).unwrap();
        assert!(r2.radius() < r1.radius());
    }

    #[test]
    fn lemma1_value_n2_first_order() {
        // int |z_1|^2 dv_1 on C^2 = 1! / 1^1 = 1
        let rule = build_rule(2, 1.0, 1e-8).unwrap();
        let f = GridFunction::sample_real(&rule, |z| z[0].norm_sqr());
        let mu = GaussianMeasure::new(2, 1.0).unwrap();
        let v = integrate(&f, &mu, &rule).unwrap();
        let m = MultiIndex::new(vec![1, 0]).unwrap();
        let want = gaussian_monomial_moment(&m, 2.0, 1.0).unwrap();
        assert_eq!(want, 1.0);
        assert!((v.re - want).abs() <= 1e-8);
    }

    #[test]
    fn integrate_examples() {
        let rule = RuleBuilder::new(1, 1.0, 1e-10).shift(1.0).build().unwrap();
        let mu = GaussianMeasure::new(1, 1.0).unwrap();
        let r2 = GridFunction::sample_real(&rule, |z| z[0].norm_sqr());
        assert_relative_eq!(integrate(&r2, &mu, &rule).unwrap().re, 1.0, max_relative = 1e-10);
        // |e^{2<z,a>}| with |a| = 1, t = 1 integrates to e^{4/4}
        let a = c(0.6, 0.8);
        let tilt = GridFunction::sample_real(&rule, |z| (2.0 * (z[0] * a.conj()).re).exp());
        assert_relative_eq!(
            integrate(&tilt, &mu, &rule).unwrap().re,
            std::f64::consts::E,
            max_relative = 1e-9
        );
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(matches!(build_rule(3, 1.0, 1e-8), Err(Error::InvalidParameter(_))));
        assert!(build_rule(1, 0.0, 1e-8).is_err());
        assert!(build_rule(1, -1.0, 1e-8).is_err());
        assert!(build_rule(1, 1.0, 0.0).is_err());
        assert!(build_rule(1, 1.0, 1.5).is_err());
    }

    #[test]
    fn integrate_checks_compatibility() {
        let rule = build_rule(1, 2.0, 1e-8).unwrap();
        let f = GridFunction::constant(&rule, c(1.0, 0.0));
        // measure flatter than the rule was sized for
        let flat = GaussianMeasure::new(1, 1.0).unwrap();
        assert!(matches!(integrate(&f, &flat, &rule), Err(Error::RuleMismatch(_))));
        let wrong_dim = GaussianMeasure::new(2, 2.0).unwrap();
        assert!(matches!(
            integrate(&f, &wrong_dim, &rule),
            Err(Error::DimensionMismatch { .. })
        ));
        let other = build_rule(1, 2.0, 1e-4).unwrap();
        let g = GridFunction::constant(&other, c(1.0, 0.0));
        let sharp = GaussianMeasure::new(1, 2.0).unwrap();
        assert!(integrate(&g, &sharp, &rule).is_err());
    }

    #[test]
    fn moment_examples() {
        let zero = MultiIndex::zero(3);
        assert_eq!(gaussian_monomial_moment(&zero, 3.7, 0.2).unwrap(), 1.0);
        let m2 = MultiIndex::new(vec![2]).unwrap();
        assert_relative_eq!(gaussian_monomial_moment(&m2, 2.0, 2.0).unwrap(), 0.5, max_relative = 1e-14);
        let m1 = MultiIndex::new(vec![1]).unwrap();
        assert_relative_eq!(gaussian_monomial_moment(&m1, 4.0, 1.0).unwrap(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn moment_large_order_stays_finite_in_log_space() {
        let m = MultiIndex::new(vec![400, 300]).unwrap();
        let ln = ln_gaussian_monomial_moment(&m, 4.0, 1.0).unwrap();
        assert!(ln.is_finite() && ln > 700.0);
    }

    #[test]
    fn lp_norm_examples() {
        let rule = build_rule(1, 1.0, 1e-10).unwrap();
        let one = GridFunction::constant(&rule, c(1.0, 0.0));
        assert_relative_eq!(lp_norm(&one, 3.0, 1.0, &rule).unwrap(), 1.0, max_relative = 1e-10);
        for k in 0..5u32 {
            for p in [1.0, 2.0, 3.0] {
                let f = GridFunction::sample(&rule, |z| z[0].powu(k));
                let m = MultiIndex::new(vec![k]).unwrap();
                let want = gaussian_monomial_moment(&m, p, 1.0).unwrap().powf(1.0 / p);
                assert_relative_eq!(lp_norm(&f, p, 1.0, &rule).unwrap(), want, max_relative = 1e-9);
            }
        }
        // f_{0,0} = e^{0}|z|^0 = 1
        let f00 = GridFunction::sample(&rule, |z| Complex64::new((-0.0 * z[0].norm_sqr()).exp(), 0.0));
        assert_relative_eq!(lp_norm(&f00, 2.0, 1.0, &rule).unwrap(), 1.0, max_relative = 1e-10);
        assert!(lp_norm(&one, 0.5, 1.0, &rule).is_err());
    }

    #[test]
    fn multi_index_enumeration() {
        let all = MultiIndex::all_up_to_order(2, 2);
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|m| m.order() <= 2));
        let m = MultiIndex::new(vec![2, 3]).unwrap();
        assert_eq!(m.order(), 5);
        assert_relative_eq!(m.factorial(), 12.0, max_relative = 1e-14);
        assert_eq!(MultiIndex::all_bounded(2, 3).len(), 16);
    }
}
