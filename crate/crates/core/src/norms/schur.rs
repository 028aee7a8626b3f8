//! Upper bounds: the Schur test with weight `h(z) = e^{lambda|z|^2}` for
//! `p > 1`, and the Fubini argument for `p = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ln_kernel_abs_integral, PointCn};

use super::params::ParamTriple;

/// Largest acceptable residual of a Schur inequality, relative to
/// `1 + |z|^2` (the residuals are exact equalities in closed form).
pub const SCHUR_RESIDUAL_TOL: f64 = 1e-10;

/// `lambda = t/(2q)`; requires `p > 1` and `pt = 2s`.
pub fn schur_lambda(params: &ParamTriple) -> Result<f64> {
    let q = params.q().ok_or_else(|| {
        Error::InvalidParameter(
            "p = 1 has no Schur weight; the bound follows from Fubini (see fubini_bound)".into(),
        )
    })?;
    if !params.is_threshold() {
        return Err(Error::ThresholdViolated {
            pt: params.p * params.t,
            two_s: 2.0 * params.s,
        });
    }
    Ok(params.t / (2.0 * q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurCertificate {
    pub params: ParamTriple,
    pub dimension: usize,
    /// `t/(2q)`.
    pub lambda: f64,
    /// `(2s - t)/(2p)`, the second expression for the same weight exponent.
    pub lambda_alt: f64,
    /// Constant of `int H(z,w) h(w)^q dv_s(w) <= C1 h(z)^q`.
    pub c1: f64,
    /// Constant of `int H(z,w) h(z)^p dv_s(z) <= C2 h(w)^p`.
    pub c2: f64,
    /// `C1^{1/q} C2^{1/p}`.
    pub bound: f64,
    /// Log-residuals of the first inequality at the sample points.
    pub residuals_first: Vec<f64>,
    /// Log-residuals of the second inequality at the sample points.
    pub residuals_second: Vec<f64>,
}

impl SchurCertificate {
    pub fn max_residual(&self) -> f64 {
        self.residuals_first
            .iter()
            .chain(&self.residuals_second)
            .fold(0.0, |m, &r| m.max(r))
    }
}

/// Points `(r, 0, ..., 0)` for a handful of radii, used when the caller has
/// no sample set of its own.
pub fn default_schur_samples(dimension: usize) -> Vec<PointCn> {
    [0.0, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0]
        .iter()
        .map(|&r| PointCn::on_axis(dimension, crate::Complex64::new(r, 0.0)))
        .collect()
}

/// Certify `||T_t|| <= C1^{1/q} C2^{1/p}` on `L^p(C^n, dv_s)`.
///
/// Both Schur integrals are evaluated in closed form through
/// [`ln_kernel_abs_integral`]; the residuals compare them with
/// `C1 h(z)^q` and `C2 h(w)^p` at `samples` and must vanish.
pub fn schur_certify(
    params: &ParamTriple,
    dimension: usize,
    samples: &[PointCn],
) -> Result<SchurCertificate> {
    let lambda = schur_lambda(params)?;
    let q = params.q().expect("p > 1 checked by schur_lambda");
    let ParamTriple { p, t, s } = *params;
    let lambda_alt = (2.0 * s - t) / (2.0 * p);
    let n = dimension as f64;

    let first_scale = t - q * lambda;
    let second_scale = s - p * lambda;
    if first_scale <= 0.0 || second_scale <= 0.0 {
        return Err(Error::SelfCheck(format!(
            "weight exponent {lambda} violates t > q*lambda or s > p*lambda"
        )));
    }
    let ln_c1 = n * (t / first_scale).ln();
    let ln_c2 = n * (t / second_scale).ln();

    let mut residuals_first = Vec::with_capacity(samples.len());
    let mut residuals_second = Vec::with_capacity(samples.len());
    for z in samples {
        if z.dimension() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: z.dimension(),
            });
        }
        let r2 = z.norm_sqr();
        // I(z) = (t/(t - q lambda))^n int |e^{t<z,w>}| dv_{t - q lambda}(w)
        let ln_i = ln_c1 + ln_kernel_abs_integral(z, t, first_scale)?;
        residuals_first.push((ln_i - (ln_c1 + q * lambda * r2)).abs());
        // J(w) = (t/(s - p lambda))^n e^{(s-t)|w|^2} int |e^{t<z,w>}| dv_{s - p lambda}(z)
        let ln_j = ln_c2 + (s - t) * r2 + ln_kernel_abs_integral(z, t, second_scale)?;
        residuals_second.push((ln_j - (ln_c2 + p * lambda * r2)).abs());
    }

    let c1 = ln_c1.exp();
    let c2 = ln_c2.exp();
    // C1 = C2 = C gives C^{1/q + 1/p} = C exactly
    let bound = if c1 == c2 {
        c1
    } else {
        (ln_c1 / q + ln_c2 / p).exp()
    };
    let cert = SchurCertificate {
        params: *params,
        dimension,
        lambda,
        lambda_alt,
        c1,
        c2,
        bound,
        residuals_first,
        residuals_second,
    };
    for (z, r) in samples
        .iter()
        .zip(cert.residuals_first.iter().zip(&cert.residuals_second))
    {
        let tol = SCHUR_RESIDUAL_TOL * (1.0 + z.norm_sqr());
        if r.0.max(*r.1) > tol {
            return Err(Error::SelfCheck(format!(
                "Schur inequality residual {} exceeds {tol} at |z| = {}",
                r.0.max(*r.1),
                z.norm()
            )));
        }
    }
    Ok(cert)
}

/// The `p = 1` bound: `||T_t f||_1 <= sup_w [(t/s)^n e^{gamma |w|^2}] ||f||_1`
/// with `gamma = s - t + t^2/(4s)`, finite only when `gamma = 0`, i.e. `t = 2s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FubiniBound {
    pub params: ParamTriple,
    pub dimension: usize,
    pub gamma: f64,
    pub bound: f64,
}

pub fn fubini_bound(params: &ParamTriple, dimension: usize) -> Result<FubiniBound> {
    if params.p != 1.0 {
        return Err(Error::InvalidParameter(format!(
            "the Fubini bound is the p = 1 path, got p = {}",
            params.p
        )));
    }
    if !params.is_threshold() {
        return Err(Error::ThresholdViolated {
            pt: params.t,
            two_s: 2.0 * params.s,
        });
    }
    let gamma = super::witness::p1_growth_exponent(params.t, params.s)?;
    Ok(FubiniBound {
        params: *params,
        dimension,
        gamma,
        bound: (params.t / params.s).powi(dimension as i32),
    })
}
