//! Lower bounds for `||A||` on `L^p(0, inf)`, which equals `||T_t||` on
//! `L^p(C, dv_s)` at the threshold `pt = 2s`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::numeric::pairwise_sum;
use crate::operators::RadialOperatorA;

/// Largest tail fraction `e^{-eps X_max}` of `||f_eps||_p^p` beyond the
/// truncation point for which the bound is flagged adequate.
pub const FEPS_TAIL_LIMIT: f64 = 1e-2;

/// Result of the `f_eps(x) = e^{-eps x/p}` trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FepsBound {
    pub eps: f64,
    pub p: f64,
    /// `eps^{1/p} ||A f_eps||_{L^p(0, X_max)}`.
    pub ratio: f64,
    /// `e^{-eps X_max}`: share of `||f_eps||_p^p` lying beyond `X_max`.
    pub tail_fraction: f64,
    pub adequate: bool,
}

/// `eps^{1/p} ||A f_eps||_p` with `||f_eps||_p = eps^{-1/p}`.
///
/// Truncating `f_eps` at `X_max` only lowers `A f_eps` (the kernel is
/// positive) and the numerator norm is taken over `(0, X_max)`, so the ratio
/// stays a lower bound whatever the tail; `adequate` reports whether the
/// tail is small enough for the ratio to be close to its untruncated value.
pub fn lower_bound_feps(t: f64, p: f64, eps: f64, a: &RadialOperatorA) -> Result<FepsBound> {
    ensure_positive("eps", eps)?;
    ensure(p.is_finite() && p >= 1.0, || format!("p must be finite and >= 1, got {p}"))?;
    ensure((a.t() - t).abs() <= 1e-14 * t, || {
        format!("operator built for t = {}, asked for t = {t}", a.t())
    })?;
    let f = a.sample(|y| (-eps * y / p).exp());
    let image = a.apply(&f)?;
    let norm = a.lp_norm(&image.values, p)?;
    let ratio = eps.powf(1.0 / p) * norm;
    let tail_fraction = (-eps * a.x_max()).exp();
    Ok(FepsBound {
        eps,
        p,
        ratio,
        tail_fraction,
        adequate: tail_fraction <= FEPS_TAIL_LIMIT,
    })
}

/// Scale-free `f_eps` configuration: `eps = h t`, `X_max = tx_max / t`.
///
/// The ratio depends on `(t, eps, X_max)` only through `eps/t` and `t X_max`,
/// so one configuration serves every `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FepsConfig {
    pub h: f64,
    pub tx_max: f64,
    pub nodes: usize,
}

impl Default for FepsConfig {
    fn default() -> Self {
        // tail fraction e^{-h tx_max} = e^{-5}
        Self {
            h: 5e-4,
            tx_max: 1e4,
            nodes: 2000,
        }
    }
}

impl FepsConfig {
    pub fn operator(&self, t: f64) -> Result<RadialOperatorA> {
        ensure_positive("h", self.h)?;
        ensure_positive("tx_max", self.tx_max)?;
        RadialOperatorA::new(t, self.tx_max / t, self.nodes)
    }

    pub fn run(&self, t: f64, p: f64) -> Result<FepsBound> {
        let a = self.operator(t)?;
        lower_bound_feps(t, p, self.h * t, &a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIterationConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIterationConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    /// Largest eigenvalue of the symmetrized discretization.
    pub sigma: f64,
    pub iterations: usize,
}

/// Largest singular value of the `L^2` discretization of `A`.
///
/// `B_ij = sqrt(w_i) K(x_i, x_j) sqrt(w_j)` is symmetric with nonnegative
/// entries, so its top eigenvalue is its spectral norm and the Rayleigh
/// quotient of the power iterates increases monotonically to it.
pub fn lower_bound_power_iteration(
    a: &RadialOperatorA,
    config: &PowerIterationConfig,
) -> Result<PowerIteration> {
    ensure_positive("tolerance", config.tolerance)?;
    let n = a.len();
    let sw: Vec<f64> = a.weights().iter().map(|w| w.sqrt()).collect();
    let mut b = a.kernel_matrix();
    b.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v *= sw[i] * sw[j];
        }
    });

    let matvec = |v: &[f64]| -> Vec<f64> {
        b.par_chunks(n)
            .map(|row| {
                let terms: Vec<f64> = row.iter().zip(v).map(|(r, x)| r * x).collect();
                pairwise_sum(&terms)
            })
            .collect()
    };
    let normalize = |v: &mut Vec<f64>| {
        let norm = pairwise_sum(&v.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };

    let mut v = sw.clone();
    normalize(&mut v);
    let mut sigma = 0.0;
    let mut change = f64::INFINITY;
    for iteration in 1..=config.max_iterations {
        let mut bv = matvec(&v);
        let next = pairwise_sum(&v.iter().zip(&bv).map(|(x, y)| x * y).collect::<Vec<_>>());
        change = (next - sigma).abs();
        sigma = next;
        normalize(&mut bv);
        v = bv;
        if change <= config.tolerance * sigma {
            return Ok(PowerIteration {
                sigma,
                iterations: iteration,
            });
        }
    }
    Err(Error::NotConverged {
        iterations: config.max_iterations,
        last_change: change,
    })
}
