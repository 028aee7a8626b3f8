//! The Fock reproducing kernel `K_t(z, w) = e^{t<z,w>}`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::measure::{GridFunction, MultiIndex, QuadratureRule};

/// A point of `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCn(Vec<Complex64>);

impl PointCn {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        ensure(!coords.is_empty(), || "a point needs at least one coordinate".into())?;
        ensure(coords.iter().all(|c| c.re.is_finite() && c.im.is_finite()), || {
            "point coordinates must be finite".into()
        })?;
        Ok(Self(coords))
    }

    pub fn origin(dimension: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); dimension.max(1)])
    }

    /// Point on the first axis, `(r, 0, ..., 0)`.
    pub fn on_axis(dimension: usize, r: Complex64) -> Self {
        let mut coords = vec![Complex64::new(0.0, 0.0); dimension.max(1)];
        coords[0] = r;
        Self(coords)
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub t: f64,
    pub dimension: usize,
}

impl KernelParams {
    pub fn new(t: f64, dimension: usize) -> Result<Self> {
        ensure_positive("t", t)?;
        ensure(dimension >= 1, || "dimension must be at least 1".into())?;
        Ok(Self { t, dimension })
    }
}

pub(crate) fn inner_slices(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// Hermitian inner product `<z, w> = z_1 conj(w_1) + ... + z_n conj(w_n)`.
pub fn inner(z: &PointCn, w: &PointCn) -> Result<Complex64> {
    if z.dimension() != w.dimension() {
        return Err(Error::DimensionMismatch {
            expected: z.dimension(),
            found: w.dimension(),
        });
    }
    Ok(inner_slices(z.coords(), w.coords()))
}

/// `K_t(z, w) = e^{t<z,w>}`.
pub fn eval_kernel(params: &KernelParams, z: &PointCn, w: &PointCn) -> Result<Complex64> {
    for p in [z, w] {
        if p.dimension() != params.dimension {
            return Err(Error::DimensionMismatch {
                expected: params.dimension,
                found: p.dimension(),
            });
        }
    }
    Ok((params.t * inner(z, w)?).exp())
}

/// `ln int |e^{sigma<z,a>}| dv_t(z) = sigma^2 |a|^2 / (4t)`.
pub fn ln_kernel_abs_integral(a: &PointCn, sigma: f64, t: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    ensure(sigma.is_finite(), || format!("sigma must be finite, got {sigma}"))?;
    Ok(sigma * sigma * a.norm_sqr() / (4.0 * t))
}

/// Closed form `int |e^{sigma<z,a>}| dv_t(z) = e^{sigma^2 |a|^2 / (4t)}`.
pub fn kernel_abs_integral(a: &PointCn, sigma: f64, t: f64) -> Result<f64> {
    Ok(ln_kernel_abs_integral(a, sigma, t)?.exp())
}

/// Polynomial in `z` stored as a sparse map from multi-index to coefficient.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<MultiIndex, Complex64>,
}

impl Polynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(m: MultiIndex, coefficient: Complex64) -> Self {
        let mut p = Self::new();
        p.add_term(m, coefficient);
        p
    }

    pub fn add_term(&mut self, m: MultiIndex, coefficient: Complex64) {
        *self.terms.entry(m).or_insert(Complex64::new(0.0, 0.0)) += coefficient;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Exact evaluation term by term.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms.iter().map(|(m, c)| c * m.monomial(z)).sum()
    }

    fn check_dimension(&self, n: usize) -> Result<()> {
        for m in self.terms.keys() {
            if m.dimension() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.dimension(),
                });
            }
        }
        Ok(())
    }
}

/// Largest polynomial degree accepted by [`reproduce_check`].
pub const MAX_REPRODUCE_DEGREE: u32 = 10;

/// Residual `|int e^{t<a,z>} f(z) dv_t(z) - f(a)|` of the reproducing formula.
///
/// The integral is computed by quadrature on `rule`; the reference value
/// `f(a)` by exact evaluation, so all the error sits on one side.
pub fn reproduce_check(
    f: &Polynomial,
    a: &PointCn,
    t: f64,
    rule: &QuadratureRule,
) -> Result<f64> {
    ensure_positive("t", t)?;
    let n = rule.dimension();
    if a.dimension() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.dimension(),
        });
    }
    f.check_dimension(n)?;
    ensure(f.degree() <= MAX_REPRODUCE_DEGREE, || {
        format!("degree {} exceeds {MAX_REPRODUCE_DEGREE}", f.degree())
    })?;
    let samples = GridFunction::sample(rule, |z| f.eval(z));
    let integral = crate::operators::kernel_integral(rule, t, t, a.coords(), &samples, false)?;
    Ok((integral - f.eval(a.coords())).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{build_rule, RuleBuilder};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(coords: &[(f64, f64)]) -> PointCn {
        PointCn::new(coords.iter().map(|&(r, i)| c(r, i)).collect()).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&pt(&[(1.0, 0.0)]), &pt(&[(1.0, 0.0)])).unwrap(), c(1.0, 0.0));
        assert_eq!(inner(&pt(&[(0.0, 1.0)]), &pt(&[(1.0, 0.0)])).unwrap(), c(0.0, 1.0));
        let z = pt(&[(1.0, 0.0), (0.0, 1.0)]);
        let w = pt(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(inner(&z, &w).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            inner(&z, &pt(&[(1.0, 0.0)])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kernel_examples() {
        let k = KernelParams::new(1.0, 1).unwrap();
        let zero = PointCn::origin(1);
        assert_eq!(eval_kernel(&k, &zero, &pt(&[(3.0, -2.0)])).unwrap(), c(1.0, 0.0));
        let one = pt(&[(1.0, 0.0)]);
        assert_relative_eq!(eval_kernel(&k, &one, &one).unwrap().re, std::f64::consts::E);
        assert!(eval_kernel(&k, &PointCn::origin(2), &PointCn::origin(2)).is_err());
    }

    #[test]
    fn kernel_abs_integral_examples() {
        assert_eq!(kernel_abs_integral(&PointCn::origin(2), 3.0, 1.5).unwrap(), 1.0);
        let a = pt(&[(2.0, 0.0)]);
        assert_relative_eq!(kernel_abs_integral(&a, 1.0, 1.0).unwrap(), std::f64::consts::E);
        // sigma = 2t gives K_t(a, a)
        let t = 0.7;
        let b = pt(&[(0.3, 0.9), (-1.1, 0.2)]);
        let k = KernelParams::new(t, 2).unwrap();
        assert_relative_eq!(
            kernel_abs_integral(&b, 2.0 * t, t).unwrap(),
            eval_kernel(&k, &b, &b).unwrap().re,
            max_relative = 1e-14
        );
    }

    #[test]
    fn reproduce_examples() {
        let rule = RuleBuilder::new(1, 1.0, 1e-10).shift(1.0).build().unwrap();
        let one = Polynomial::monomial(MultiIndex::zero(1), c(1.0, 0.0));
        let a = pt(&[(0.7, 0.0)]);
        assert!(reproduce_check(&one, &a, 1.0, &rule).unwrap() < 1e-9);
        let z1 = Polynomial::monomial(MultiIndex::new(vec![1]).unwrap(), c(1.0, 0.0));
        assert!(reproduce_check(&z1, &a, 1.0, &rule).unwrap() <= 1e-8);

        let rule2 = RuleBuilder::new(1, 2.0, 1e-10).shift(1.0).build().unwrap();
        let z3 = Polynomial::monomial(MultiIndex::new(vec![3]).unwrap(), c(1.0, 0.0));
        let b = pt(&[(1.0, 0.5)]);
        assert!(reproduce_check(&z3, &b, 2.0, &rule2).unwrap() <= 1e-8);
    }

    #[test]
    fn reproduce_rejects_mismatch() {
        let rule = build_rule(1, 1.0, 1e-8).unwrap();
        let p = Polynomial::monomial(MultiIndex::new(vec![1, 0]).unwrap(), c(1.0, 0.0));
        assert!(reproduce_check(&p, &PointCn::origin(1), 1.0, &rule).is_err());
        let q = Polynomial::monomial(MultiIndex::new(vec![11]).unwrap(), c(1.0, 0.0));
        assert!(reproduce_check(&q, &PointCn::origin(1), 1.0, &rule).is_err());
    }

    proptest! {
        #[test]
        fn kernel_is_hermitian(
            t in 0.1f64..3.0,
            z in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2),
            w in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2),
        ) {
            let k = KernelParams::new(t, 2).unwrap();
            let (z, w) = (pt(&z), pt(&w));
            let kzw = eval_kernel(&k, &z, &w).unwrap();
            let kwz = eval_kernel(&k, &w, &z).unwrap();
            prop_assert!((kzw - kwz.conj()).norm() <= 1e-12 * kzw.norm());
            let kzz = eval_kernel(&k, &z, &z).unwrap();
            prop_assert!(kzz.im.abs() <= 1e-12 * kzz.re);
            prop_assert!(kzz.re >= 1.0);
        }
    }
}
