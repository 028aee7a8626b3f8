//! The operators `S_t`, `T_t` on `L^p(C^n, dv_s)`, their adjoints with
//! respect to the `dv_s` pairing, and the radial operator
//! `A f(x) = int_0^inf t e^{-t(x+y)/2} I_0(t sqrt(xy)) f(y) dy`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::measure::{GaussianMeasure, GridFunction, QuadratureRule, MAX_GRID_DIMENSION};
use crate::numeric::{pairwise_sum, Rule1d};
use crate::special::bessel_i0_scaled;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    S,
    T,
    SAdjoint,
    TAdjoint,
}

/// Which operator, with kernel scale `t` acting on `L^p(C^n, dv_s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub t: f64,
    pub s: f64,
    pub dimension: usize,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, t: f64, s: f64, dimension: usize) -> Result<Self> {
        ensure_positive("t", t)?;
        ensure_positive("s", s)?;
        ensure(dimension >= 1, || "dimension must be at least 1".into())?;
        Ok(Self {
            kind,
            t,
            s,
            dimension,
        })
    }

    /// Evaluate the operator applied to `f` at the point `z`.
    pub fn apply(&self, f: &GridFunction, z: &[Complex64], rule: &QuadratureRule) -> Result<Complex64> {
        match self.kind {
            OperatorKind::S => apply_s(self, f, z, rule),
            OperatorKind::T => apply_t(self, f, z, rule),
            OperatorKind::SAdjoint => apply_s_adjoint(self, f, z, rule),
            OperatorKind::TAdjoint => apply_t_adjoint(self, f, z, rule),
        }
    }

    /// Evaluate at every node of `rule`. Quadratic in the node count.
    pub fn apply_at_nodes(&self, f: &GridFunction, rule: &QuadratureRule) -> Result<GridFunction> {
        let n = rule.dimension();
        let values = (0..rule.len())
            .into_par_iter()
            .map(|i| {
                let mut buf = [Complex64::new(0.0, 0.0); MAX_GRID_DIMENSION];
                rule.node(i, &mut buf);
                self.apply(f, &buf[..n], rule)
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction::from_values(rule, values)
    }

    fn expect(&self, kind: OperatorKind, rule: &QuadratureRule, z: &[Complex64]) -> Result<()> {
        ensure(self.kind == kind, || {
            format!("operator spec is {:?}, expected {:?}", self.kind, kind)
        })?;
        for found in [rule.dimension(), z.len()] {
            if found != self.dimension {
                return Err(Error::DimensionMismatch {
                    expected: self.dimension,
                    found,
                });
            }
        }
        Ok(())
    }
}

/// `sum_i w_i K(z, w_i) f_i` with `w_i` the weights of `dv_{measure_scale}`
/// and `K = e^{t<z,w>}` (or its modulus).
pub(crate) fn kernel_integral(
    rule: &QuadratureRule,
    t: f64,
    measure_scale: f64,
    z: &[Complex64],
    f: &GridFunction,
    modulus: bool,
) -> Result<Complex64> {
    let measure = GaussianMeasure::new(rule.dimension(), measure_scale)?;
    rule.check_measure(&measure)?;
    f.check_rule(rule)?;
    if z.len() != rule.dimension() {
        return Err(Error::DimensionMismatch {
            expected: rule.dimension(),
            found: z.len(),
        });
    }
    let weights = rule.coordinate_weights(measure_scale);
    let factors: Vec<Vec<Complex64>> = z
        .iter()
        .map(|&zk| {
            rule.coordinate_nodes()
                .iter()
                .zip(&weights)
                .map(|(c, &w)| {
                    let e = t * zk * c.conj();
                    if modulus {
                        Complex64::new(w * e.re.exp(), 0.0)
                    } else {
                        w * e.exp()
                    }
                })
                .collect()
        })
        .collect();
    Ok(rule.contract(&factors, f.values()))
}

/// `S_t f(z) = int e^{t<z,w>} f(w) dv_t(w)`.
pub fn apply_s(
    spec: &OperatorSpec,
    f: &GridFunction,
    z: &[Complex64],
    rule: &QuadratureRule,
) -> Result<Complex64> {
    spec.expect(OperatorKind::S, rule, z)?;
    kernel_integral(rule, spec.t, spec.t, z, f, false)
}

/// `T_t f(z) = int |e^{t<z,w>}| f(w) dv_t(w)`.
pub fn apply_t(
    spec: &OperatorSpec,
    f: &GridFunction,
    z: &[Complex64],
    rule: &QuadratureRule,
) -> Result<Complex64> {
    spec.expect(OperatorKind::T, rule, z)?;
    kernel_integral(rule, spec.t, spec.t, z, f, true)
}

fn adjoint_prefactor(spec: &OperatorSpec, z: &[Complex64]) -> f64 {
    let r2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let n = spec.dimension as f64;
    (n * (spec.t / spec.s).ln() + (spec.s - spec.t) * r2).exp()
}

/// `S_t^* f(z) = (t/s)^n e^{(s-t)|z|^2} int e^{t<z,w>} f(w) dv_s(w)`.
pub fn apply_s_adjoint(
    spec: &OperatorSpec,
    f: &GridFunction,
    z: &[Complex64],
    rule: &QuadratureRule,
) -> Result<Complex64> {
    spec.expect(OperatorKind::SAdjoint, rule, z)?;
    Ok(adjoint_prefactor(spec, z) * kernel_integral(rule, spec.t, spec.s, z, f, false)?)
}

/// `T_t^* f(z) = (t/s)^n e^{(s-t)|z|^2} int |e^{t<z,w>}| f(w) dv_s(w)`.
pub fn apply_t_adjoint(
    spec: &OperatorSpec,
    f: &GridFunction,
    z: &[Complex64],
    rule: &QuadratureRule,
) -> Result<Complex64> {
    spec.expect(OperatorKind::TAdjoint, rule, z)?;
    Ok(adjoint_prefactor(spec, z) * kernel_integral(rule, spec.t, spec.s, z, f, true)?)
}

/// Default node count of the 1D rule behind [`RadialOperatorA`].
pub const DEFAULT_A_NODES: usize = 2000;

/// Default share of `|G|` mass allowed in the last 5% of `[0, X_max]`
/// before [`RadialOperatorA::apply`] raises its truncation warning.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-2;

/// Default truncation `X_max = 400 / t`.
pub fn default_x_max(t: f64) -> f64 {
    400.0 / t
}

/// `t e^{-t(x+y)/2} I_0(t sqrt(xy))`, evaluated as
/// `t e^{-t(sqrt x - sqrt y)^2 / 2} [e^{-t sqrt(xy)} I_0(t sqrt(xy))]` so that
/// nothing overflows for large arguments.
pub fn kernel_a_eval(t: f64, x: f64, y: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    ensure(x >= 0.0 && y >= 0.0, || {
        format!("kernel arguments must be nonnegative, got ({x}, {y})")
    })?;
    Ok(kernel_a_unchecked(t, x, y))
}

#[inline]
fn kernel_a_unchecked(t: f64, x: f64, y: f64) -> f64 {
    let (sx, sy) = (x.sqrt(), y.sqrt());
    let d = sx - sy;
    t * (-0.5 * t * d * d).exp() * bessel_i0_scaled(t * (sx * sy))
}

/// The operator `A` on `L^p(0, inf)`, truncated to `(0, X_max]` and
/// discretized by a composite Gauss–Legendre rule.
#[derive(Debug, Clone)]
pub struct RadialOperatorA {
    t: f64,
    x_max: f64,
    rule: Rule1d,
    tail_tolerance: f64,
}

/// `A G` sampled at the rule nodes, with the truncation diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialImage {
    pub values: Vec<f64>,
    /// Share of `int |G|` carried by the last 5% of the domain.
    pub tail_share: f64,
    pub truncation_warning: bool,
}

impl RadialOperatorA {
    pub fn new(t: f64, x_max: f64, nodes: usize) -> Result<Self> {
        Self::with_breakpoints(t, x_max, nodes, &[])
    }

    /// As [`new`](Self::new), with panel edges at `breakpoints` so that
    /// piecewise-smooth inputs are integrated at full order.
    pub fn with_breakpoints(t: f64, x_max: f64, nodes: usize, breakpoints: &[f64]) -> Result<Self> {
        ensure_positive("t", t)?;
        ensure_positive("x_max", x_max)?;
        ensure(nodes >= 1, || "node count must be positive".into())?;
        let rule = Rule1d::composite(0.0, x_max, breakpoints, nodes, nodes.min(16))?;
        Ok(Self {
            t,
            x_max,
            rule,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        })
    }

    /// `X_max = 400/t` with 2000 nodes.
    pub fn with_defaults(t: f64) -> Result<Self> {
        Self::new(t, default_x_max(t), DEFAULT_A_NODES)
    }

    pub fn tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.rule.weights
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        kernel_a_eval(self.t, x, y)
    }

    /// Sample `g` at the rule nodes.
    pub fn sample(&self, g: impl Fn(f64) -> f64) -> Vec<f64> {
        self.rule.nodes.iter().map(|&y| g(y)).collect()
    }

    fn check_samples(&self, g: &[f64]) -> Result<()> {
        if g.len() != self.len() {
            return Err(Error::RuleMismatch(format!(
                "{} samples for a rule with {} nodes",
                g.len(),
                self.len()
            )));
        }
        Ok(())
    }

    /// `(A G)(x)` at an arbitrary `x >= 0`.
    pub fn apply_at(&self, x: f64, g: &[f64]) -> Result<f64> {
        self.check_samples(g)?;
        ensure(x >= 0.0, || format!("x must be nonnegative, got {x}"))?;
        Ok(self.row_dot(x, g))
    }

    fn row_dot(&self, x: f64, g: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(g)
            .map(|((&y, &w), &gy)| w * kernel_a_unchecked(self.t, x, y) * gy)
            .collect();
        pairwise_sum(&terms)
    }

    /// `A G` at every rule node.
    pub fn apply(&self, g: &[f64]) -> Result<RadialImage> {
        self.check_samples(g)?;
        let values: Vec<f64> = self
            .rule
            .nodes
            .par_iter()
            .map(|&x| self.row_dot(x, g))
            .collect();
        let tail_share = self.tail_share(g);
        Ok(RadialImage {
            values,
            tail_share,
            truncation_warning: tail_share > self.tail_tolerance,
        })
    }

    /// Share of `int |G|` over `(0.95 X_max, X_max]`.
    pub fn tail_share(&self, g: &[f64]) -> f64 {
        let cut = 0.95 * self.x_max;
        let mut tail = Vec::new();
        let mut all = Vec::with_capacity(g.len());
        for ((&y, &w), &gy) in self.rule.nodes.iter().zip(&self.rule.weights).zip(g) {
            let m = w * gy.abs();
            all.push(m);
            if y > cut {
                tail.push(m);
            }
        }
        let total = pairwise_sum(&all);
        if total == 0.0 {
            0.0
        } else {
            pairwise_sum(&tail) / total
        }
    }

    /// Kernel matrix `K(x_i, x_j)` in row-major order.
    pub fn kernel_matrix(&self) -> Vec<f64> {
        let nodes = &self.rule.nodes;
        let n = nodes.len();
        let mut m = vec![0.0; n * n];
        m.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = kernel_a_unchecked(self.t, nodes[i], nodes[j]);
            }
        });
        m
    }

    /// Discrete `L^p(0, X_max)` norm of samples.
    pub fn lp_norm(&self, values: &[f64], p: f64) -> Result<f64> {
        self.check_samples(values)?;
        ensure(p >= 1.0, || format!("p must be >= 1, got {p}"))?;
        let terms: Vec<f64> = values
            .iter()
            .zip(&self.rule.weights)
            .map(|(v, w)| w * v.abs().powf(p))
            .collect();
        Ok(pairwise_sum(&terms).powf(1.0 / p))
    }
}

/// Both sides of `T_t f(z) = e^{t|z|^2/2} (A G)(|z|^2)` for
/// `f(w) = G(|w|^2) e^{t|w|^2/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCorrespondence {
    /// `T_t f(z)` by quadrature on `C`.
    pub planar: f64,
    /// `e^{t|z|^2/2} (A G)(|z|^2)` by quadrature on `(0, X_max]`.
    pub radial: f64,
    pub residual: f64,
}

impl RadialCorrespondence {
    pub fn relative_residual(&self) -> f64 {
        self.residual / self.radial.abs().max(f64::MIN_POSITIVE)
    }
}

/// Evaluate both sides of the radial reduction of `T_t` at `z` (n = 1).
pub fn radial_correspondence_check<G>(
    t: f64,
    g: G,
    z: Complex64,
    planar_rule: &QuadratureRule,
    a: &RadialOperatorA,
) -> Result<RadialCorrespondence>
where
    G: Fn(f64) -> f64 + Sync,
{
    ensure_positive("t", t)?;
    if planar_rule.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: planar_rule.dimension(),
        });
    }
    ensure((a.t() - t).abs() <= 1e-12 * t, || {
        format!("operator A built for t = {}, check requested t = {t}", a.t())
    })?;
    let x = z.norm_sqr();
    let reach = planar_rule.radius().powi(2).min(a.x_max());
    if x > reach {
        return Err(Error::Truncation(format!(
            "|z|^2 = {x} lies outside the common domain [0, {reach}] of the two rules"
        )));
    }
    let spec = OperatorSpec::new(OperatorKind::T, t, t, 1)?;
    let f = GridFunction::sample_real(planar_rule, |w| {
        let r2 = w[0].norm_sqr();
        g(r2) * (0.5 * t * r2).exp()
    });
    let planar = apply_t(&spec, &f, &[z], planar_rule)?.re;
    let samples = a.sample(&g);
    let radial = (0.5 * t * x).exp() * a.apply_at(x, &samples)?;
    Ok(RadialCorrespondence {
        planar,
        radial,
        residual: (planar - radial).abs(),
    })
}
