//! Unboundedness witnesses off the threshold `pt = 2s`.
//!
//! For `f_{x,k}(z) = e^{-x|z|^2} z_1^k` the norm ratios of `S_t f` and
//! `S_t^* f` are closed-form products of powers; their logarithms are affine
//! in `k`, which the search below exploits.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::numeric::logspace;

use super::params::ParamTriple;

fn check_dimension(n: usize) -> Result<()> {
    ensure(n >= 1, || "dimension must be at least 1".into())
}

/// `ln g(x, k)` with
/// `g = (t/(t+x))^{p(n+k)} ((s+px)/s)^{n+pk/2} = ||S_t f_{x,k}||_p^p / ||f_{x,k}||_p^p`.
pub fn ln_witness_ratio_fxk(params: &ParamTriple, x: f64, k: u64, n: usize) -> Result<f64> {
    check_dimension(n)?;
    let ParamTriple { p, t, s } = *params;
    ensure(x.is_finite() && p * x > -s && x > -t, || {
        format!("x = {x} outside the integrability range")
    })?;
    let (n, k) = (n as f64, k as f64);
    Ok(-p * (n + k) * (x / t).ln_1p() + (n + 0.5 * p * k) * (p * x / s).ln_1p())
}

pub fn witness_ratio_fxk(params: &ParamTriple, x: f64, k: u64, n: usize) -> Result<f64> {
    ln_witness_ratio_fxk(params, x, k, n).map(f64::exp)
}

/// `s - q(s - t)`, the scale of the Gaussian factor in `S_t^* f_{x,k}`
/// raised to the power `q`.
pub fn adjoint_margin(params: &ParamTriple) -> Result<f64> {
    let q = params.q().ok_or_else(|| {
        Error::InvalidParameter("the adjoint family needs p > 1".into())
    })?;
    Ok(params.s - q * (params.s - params.t))
}

/// `ln ||S_t^* f_{x,k}||_q^q / ||f_{x,k}||_q^q`, i.e. the logarithm of
/// `(t/(s+x))^{q(n+k)} (s/m)^n ((s+qx)/m)^{qk/2} ((s+qx)/s)^n` with
/// `m = s - q(s-t)`.
///
/// `x` may be negative as long as `s + x > 0` and `s + qx > 0`. Fails with
/// [`Error::NotIntegrable`] when `m <= 0`.
pub fn ln_witness_ratio_adjoint_fxk(
    params: &ParamTriple,
    x: f64,
    k: u64,
    n: usize,
) -> Result<f64> {
    check_dimension(n)?;
    let margin = adjoint_margin(params)?;
    if margin <= 0.0 {
        return Err(Error::NotIntegrable { margin });
    }
    let q = params.q().expect("checked by adjoint_margin");
    let ParamTriple { t, s, .. } = *params;
    ensure(x.is_finite() && s + x > 0.0 && s + q * x > 0.0, || {
        format!("x = {x} outside the integrability range")
    })?;
    let (n, k) = (n as f64, k as f64);
    let sqx = s + q * x;
    Ok(q * (n + k) * (t / (s + x)).ln()
        + n * (s / margin).ln()
        + 0.5 * q * k * (sqx / margin).ln()
        + n * (sqx / s).ln())
}

pub fn witness_ratio_adjoint_fxk(params: &ParamTriple, x: f64, k: u64, n: usize) -> Result<f64> {
    ln_witness_ratio_adjoint_fxk(params, x, k, n).map(f64::exp)
}

/// `gamma = s - t + t^2/(4s) = (2s - t)^2/(4s)`.
pub fn p1_growth_exponent(t: f64, s: f64) -> Result<f64> {
    ensure_positive("t", t)?;
    ensure_positive("s", s)?;
    let d = 2.0 * s - t;
    Ok(d * d / (4.0 * s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessFamily {
    Fxk,
    AdjointFxk,
    P1Exponent,
}

impl WitnessFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            WitnessFamily::Fxk => "f_xk",
            WitnessFamily::AdjointFxk => "adjoint_f_xk",
            WitnessFamily::P1Exponent => "p1_exponent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessEvidence {
    /// `ln` of the norm ratio at `(x, k)`, above `ln threshold`.
    Ratio { x: f64, k: u64, ln_ratio: f64 },
    /// `S_t^* 1` is not `q`-integrable: `s - q(s-t) = margin <= 0`.
    NotIntegrable { margin: f64 },
    /// `||T_t^* f_a|| / ||f_a||_inf = (t/s)^n e^{gamma |a|^2}` with `gamma > 0`.
    Growth { gamma: f64, radius: f64, ln_ratio: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub family: WitnessFamily,
    pub params: ParamTriple,
    pub dimension: usize,
    pub threshold: f64,
    pub evidence: WitnessEvidence,
}

impl Witness {
    /// Recompute the evidence from the closed forms and confirm it.
    pub fn verify(&self) -> Result<bool> {
        let ln_thr = self.threshold.ln();
        let n = self.dimension;
        Ok(match (self.family, self.evidence) {
            (WitnessFamily::Fxk, WitnessEvidence::Ratio { x, k, .. }) => {
                ln_witness_ratio_fxk(&self.params, x, k, n)? > ln_thr
            }
            (WitnessFamily::AdjointFxk, WitnessEvidence::Ratio { x, k, .. }) => {
                ln_witness_ratio_adjoint_fxk(&self.params, x, k, n)? > ln_thr
            }
            (WitnessFamily::AdjointFxk, WitnessEvidence::NotIntegrable { .. }) => {
                adjoint_margin(&self.params)? <= 0.0
            }
            (WitnessFamily::P1Exponent, WitnessEvidence::Growth { radius, .. }) => {
                let gamma = p1_growth_exponent(self.params.t, self.params.s)?;
                let ln_ratio = n as f64 * (self.params.t / self.params.s).ln()
                    + gamma * radius * radius;
                gamma > 0.0 && ln_ratio > ln_thr
            }
            _ => false,
        })
    }

    /// The achieved ratio, `inf` for the integrability witness.
    pub fn ratio(&self) -> f64 {
        match self.evidence {
            WitnessEvidence::Ratio { ln_ratio, .. } | WitnessEvidence::Growth { ln_ratio, .. } => {
                ln_ratio.exp()
            }
            WitnessEvidence::NotIntegrable { .. } => f64::INFINITY,
        }
    }
}

/// Grid over which witnesses are sought.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessSearch {
    pub x_min: f64,
    pub x_max: f64,
    pub x_points: usize,
    /// Nominal range of `k`; the search reports whether it had to go past it.
    pub k_max: u64,
    /// Hard cap on `k` for parameters close to the threshold.
    pub k_cap: u64,
    pub threshold: f64,
}

impl Default for WitnessSearch {
    fn default() -> Self {
        Self {
            x_min: 1e-3,
            x_max: 1e2,
            x_points: 60,
            k_max: 500,
            k_cap: 1_000_000_000,
            threshold: 1e3,
        }
    }
}

impl WitnessSearch {
    fn validate(&self) -> Result<()> {
        ensure(
            self.x_min > 0.0 && self.x_max >= self.x_min && self.x_points >= 1,
            || "witness x grid must be positive and nonempty".into(),
        )?;
        ensure(self.threshold > 1.0 && self.threshold.is_finite(), || {
            format!("threshold must exceed 1, got {}", self.threshold)
        })
    }

    fn grid(&self) -> Vec<f64> {
        if self.x_points == 1 {
            vec![self.x_min]
        } else {
            logspace(self.x_min, self.x_max, self.x_points)
        }
    }
}

/// Best point of an unsuccessful search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchFailure {
    pub family: WitnessFamily,
    pub best_x: f64,
    pub best_ln_ratio_at_k_max: f64,
}

/// Smallest `k <= cap` with `ln_ratio(k) > ln_thr`, for `ln_ratio` affine in `k`.
fn first_crossing(ln_ratio: impl Fn(u64) -> Result<f64>, ln_thr: f64, cap: u64) -> Result<Option<u64>> {
    let a = ln_ratio(0)?;
    if a > ln_thr {
        return Ok(Some(0));
    }
    let slope = ln_ratio(1)? - a;
    if slope <= 0.0 {
        return Ok(None);
    }
    let guess = ((ln_thr - a) / slope).floor();
    if !(guess < cap as f64) {
        return Ok(None);
    }
    // step past rounding in the affine extrapolation
    let mut k = (guess as u64).saturating_sub(2);
    while k <= cap {
        if ln_ratio(k)? > ln_thr {
            return Ok(Some(k));
        }
        k += 1;
    }
    Ok(None)
}

type Search = std::result::Result<Witness, SearchFailure>;

fn search_family(
    family: WitnessFamily,
    params: &ParamTriple,
    n: usize,
    search: &WitnessSearch,
    shift: f64,
    ln_ratio: impl Fn(f64, u64) -> Result<f64>,
) -> Result<Search> {
    search.validate()?;
    let ln_thr = search.threshold.ln();
    let mut best: Option<(u64, f64)> = None;
    let mut failure = SearchFailure {
        family,
        best_x: f64::NAN,
        best_ln_ratio_at_k_max: f64::NEG_INFINITY,
    };
    for x in search.grid() {
        let x = x - shift;
        let lr = |k| ln_ratio(x, k);
        let at_k_max = lr(search.k_max)?;
        if at_k_max > failure.best_ln_ratio_at_k_max {
            failure.best_ln_ratio_at_k_max = at_k_max;
            failure.best_x = x;
        }
        if let Some(k) = first_crossing(lr, ln_thr, search.k_cap)? {
            if best.map_or(true, |(bk, _)| k < bk) {
                best = Some((k, x));
            }
        }
    }
    Ok(match best {
        Some((k, x)) => Ok(Witness {
            family,
            params: *params,
            dimension: n,
            threshold: search.threshold,
            evidence: WitnessEvidence::Ratio { x, k, ln_ratio: ln_ratio(x, k)? },
        }),
        None => Err(failure),
    })
}

/// Witness for `pt > 2s` from `S_t f_{x,k}`.
pub fn search_fxk(params: &ParamTriple, n: usize, search: &WitnessSearch) -> Result<Search> {
    search_family(WitnessFamily::Fxk, params, n, search, 0.0, |x, k| {
        ln_witness_ratio_fxk(params, x, k, n)
    })
}

/// Witness for `pt < 2s`, `p > 1`, from `S_t^* f_{x,k}`.
///
/// The grid is shifted by `s - t`: the ratio at `x - (s - t)` equals the
/// forward ratio `g(x, k)` for exponent `q` and measure scale `s - q(s-t)`,
/// which grows in `k` for small `x > 0` exactly when `pt < 2s`.
pub fn search_adjoint_fxk(params: &ParamTriple, n: usize, search: &WitnessSearch) -> Result<Search> {
    let margin = adjoint_margin(params)?;
    if margin <= 0.0 {
        search.validate()?;
        return Ok(Ok(Witness {
            family: WitnessFamily::AdjointFxk,
            params: *params,
            dimension: n,
            threshold: search.threshold,
            evidence: WitnessEvidence::NotIntegrable { margin },
        }));
    }
    search_family(
        WitnessFamily::AdjointFxk,
        params,
        n,
        search,
        params.s - params.t,
        |x, k| ln_witness_ratio_adjoint_fxk(params, x, k, n),
    )
}

/// Witness for `p = 1`, `t != 2s`: the point `a` at which
/// `(t/s)^n e^{gamma |a|^2}` first exceeds the threshold.
pub fn search_p1(params: &ParamTriple, n: usize, search: &WitnessSearch) -> Result<Search> {
    search.validate()?;
    let gamma = p1_growth_exponent(params.t, params.s)?;
    let ln_base = n as f64 * (params.t / params.s).ln();
    let ln_thr = search.threshold.ln();
    if gamma <= 0.0 {
        return Ok(Err(SearchFailure {
            family: WitnessFamily::P1Exponent,
            best_x: 0.0,
            best_ln_ratio_at_k_max: ln_base,
        }));
    }
    // smallest radius on a 1e-3 grid beyond the crossing
    let r2 = ((ln_thr - ln_base) / gamma).max(0.0);
    let mut radius = (r2.sqrt() * 1e3).ceil() / 1e3;
    while ln_base + gamma * radius * radius <= ln_thr {
        radius += 1e-3;
    }
    if !radius.is_finite() {
        return Ok(Err(SearchFailure {
            family: WitnessFamily::P1Exponent,
            best_x: radius,
            best_ln_ratio_at_k_max: ln_base,
        }));
    }
    Ok(Ok(Witness {
        family: WitnessFamily::P1Exponent,
        params: *params,
        dimension: n,
        threshold: search.threshold,
        evidence: WitnessEvidence::Growth {
            gamma,
            radius,
            ln_ratio: ln_base + gamma * radius * radius,
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triple(p: f64, t: f64, s: f64) -> ParamTriple {
        ParamTriple::new(p, t, s).unwrap()
    }

    #[test]
    fn fxk_examples() {
        assert_eq!(witness_ratio_fxk(&triple(2.0, 1.0, 1.0), 0.0, 0, 1).unwrap(), 1.0);
        let bounded = triple(2.0, 1.0, 1.0);
        let sup = logspace(1e-3, 1e2, 60)
            .into_iter()
            .flat_map(|x| (0..=500).map(move |k| (x, k)))
            .map(|(x, k)| witness_ratio_fxk(&bounded, x, k, 1).unwrap())
            .fold(0.0, f64::max);
        assert!(sup <= 4.0, "sup = {sup}");
        let unbounded = triple(2.0, 1.0, 0.6);
        let hit = logspace(0.1, 10.0, 40)
            .into_iter()
            .any(|x| (0..=200).any(|k| witness_ratio_fxk(&unbounded, x, k, 1).unwrap() > 1e3));
        assert!(hit);
    }

    #[test]
    fn fxk_matches_direct_gamma_formula() {
        // ||f_{x,k}||_{p,s}^p and ||S_t f_{x,k}||_{p,s}^p from the Gaussian moments
        let (p, t, s, x, k) = (3.0f64, 1.3f64, 0.7f64, 0.4f64, 5u64);
        let n = 1.0;
        let ln_norm = |c: f64, exponent: f64| {
            // int |z|^{pk} e^{-p c |z|^2} dv_s = s Gamma(pk/2 + 1) / (s + pc)^{pk/2 + 1}
            let a = 0.5 * p * k as f64;
            s.ln() + crate::special::ln_gamma(a + 1.0) - (a + 1.0) * (s + p * c).ln()
                + exponent
        };
        // S_t f_{x,k} = (t/(t+x))^{1+k} z^k
        let lhs = ln_norm(0.0, p * (n + k as f64) * (t / (t + x)).ln()) - ln_norm(x, 0.0);
        let rhs = ln_witness_ratio_fxk(&triple(p, t, s), x, k, 1).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn adjoint_examples() {
        let grid = logspace(1e-3, 1e2, 60);
        let selfadj = triple(2.0, 1.0, 1.0);
        let sup = grid
            .iter()
            .flat_map(|&x| (0..=200).map(move |k| (x, k)))
            .map(|(x, k)| witness_ratio_adjoint_fxk(&selfadj, x, k, 1).unwrap())
            .fold(0.0, f64::max);
        assert!(sup <= 4.0, "sup = {sup}");

        let w = search_adjoint_fxk(&triple(2.0, 1.0, 1.4), 1, &WitnessSearch::default())
            .unwrap()
            .unwrap();
        match w.evidence {
            WitnessEvidence::Ratio { k, .. } => assert!(k <= 200),
            other => panic!("unexpected evidence {other:?}"),
        }
        assert!(w.verify().unwrap());

        let p = triple(2.0, 1.0, 2.5);
        assert!(matches!(
            ln_witness_ratio_adjoint_fxk(&p, 1.0, 1, 1),
            Err(Error::NotIntegrable { .. })
        ));
        let w = search_adjoint_fxk(&p, 1, &WitnessSearch::default()).unwrap().unwrap();
        assert!(matches!(w.evidence, WitnessEvidence::NotIntegrable { .. }));
        assert!(w.verify().unwrap());
        assert_eq!(w.ratio(), f64::INFINITY);
    }

    #[test]
    fn adjoint_matches_shifted_forward_ratio() {
        let params = triple(3.0, 1.0, 1.3);
        let q = params.q().unwrap();
        let margin = adjoint_margin(&params).unwrap();
        let forward = triple(q, params.t, margin);
        for &(x, k) in &[(0.01, 0u64), (0.5, 3), (4.0, 40)] {
            let a = ln_witness_ratio_adjoint_fxk(&params, x - (params.s - params.t), k, 2).unwrap();
            let b = ln_witness_ratio_fxk(&forward, x, k, 2).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn p1_exponent_examples() {
        assert_eq!(p1_growth_exponent(2.0, 1.0).unwrap(), 0.0);
        assert!((p1_growth_exponent(1.0, 0.4).unwrap() - 0.025).abs() < 1e-15);
        let direct = 0.4 - 1.0 + 1.0 / 1.6;
        assert!((p1_growth_exponent(1.0, 0.4).unwrap() - direct).abs() < 1e-15);
        let w = search_p1(&triple(1.0, 1.0, 0.4), 1, &WitnessSearch::default())
            .unwrap()
            .unwrap();
        assert!(w.verify().unwrap());
        assert!(search_p1(&triple(1.0, 2.0, 1.0), 1, &WitnessSearch::default())
            .unwrap()
            .is_err());
    }

    #[test]
    fn near_threshold_needs_large_k() {
        let w = search_fxk(&triple(2.0, 2.0, 1.999), 1, &WitnessSearch::default())
            .unwrap()
            .unwrap();
        assert!(w.verify().unwrap());
        if let WitnessEvidence::Ratio { k, .. } = w.evidence {
            assert!(k > 500);
        }
    }

    proptest! {
        #[test]
        fn gamma_nonnegative(t in 1e-3f64..10.0, s in 1e-3f64..10.0) {
            prop_assert!(p1_growth_exponent(t, s).unwrap() >= 0.0);
        }

        #[test]
        fn fxk_homogeneous(
            p in 1.0f64..5.0, t in 0.1f64..5.0, s in 0.1f64..5.0,
            x in 1e-3f64..50.0, k in 0u64..300, c in 0.05f64..20.0, n in 1usize..4,
        ) {
            let a = ln_witness_ratio_fxk(&triple(p, t, s), x, k, n).unwrap();
            let b = ln_witness_ratio_fxk(&triple(p, c * t, c * s), c * x, k, n).unwrap();
            prop_assert!((a - b).abs() <= 1e-11 * (1.0 + a.abs()));
        }

        #[test]
        fn emitted_witnesses_verify(
            p in 1.0f64..4.0, t in 0.2f64..3.0, s in 0.2f64..3.0, n in 1usize..3,
        ) {
            let params = triple(p, t, s);
            prop_assume!(!params.is_threshold());
            let search = WitnessSearch::default();
            let found = if p * t > 2.0 * s {
                search_fxk(&params, n, &search).unwrap()
            } else if p == 1.0 {
                search_p1(&params, n, &search).unwrap()
            } else {
                search_adjoint_fxk(&params, n, &search).unwrap()
            };
            if let Ok(w) = found {
                prop_assert!(w.verify().unwrap());
                prop_assert!(w.ratio() > search.threshold);
            }
        }
    }
}
