use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Result};

/// Relative tolerance of the boundedness test `|pt - 2s| <= tol * pt`.
pub const THRESHOLD_RTOL: f64 = 1e-12;

/// Exponent `p`, kernel scale `t` and measure scale `s` of `S_t, T_t` acting
/// on `L^p(C^n, dv_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamTriple {
    pub p: f64,
    pub t: f64,
    pub s: f64,
}

impl ParamTriple {
    pub fn new(p: f64, t: f64, s: f64) -> Result<Self> {
        ensure(p.is_finite() && p >= 1.0, || format!("p must be finite and >= 1, got {p}"))?;
        ensure_positive("t", t)?;
        ensure_positive("s", s)?;
        Ok(Self { p, t, s })
    }

    /// Conjugate exponent `q = p/(p-1)`; `None` stands for `q = inf` at `p = 1`.
    pub fn q(&self) -> Option<f64> {
        (self.p > 1.0).then(|| self.p / (self.p - 1.0))
    }

    /// Whether `pt = 2s` within [`THRESHOLD_RTOL`].
    pub fn is_threshold(&self) -> bool {
        let pt = self.p * self.t;
        (pt - 2.0 * self.s).abs() <= THRESHOLD_RTOL * pt
    }

    /// `(p, ct, cs)`.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        Self::new(self.p, c * self.t, c * self.s)
    }
}
