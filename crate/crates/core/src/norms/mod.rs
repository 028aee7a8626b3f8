//! Norm bounds and the boundedness dichotomy for `S_t`, `T_t` on
//! `L^p(C^n, dv_s)`.
//!
//! At `pt = 2s` the Schur test (or Fubini for `p = 1`) certifies
//! `||T_t|| <= 2^n`, and the `f_eps` family or power iteration on the radial
//! operator `A` bounds it from below. Off the threshold a witness family
//! exhibits arbitrarily large norm ratios.

mod lower;
mod params;
mod schur;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Error, Result};

pub use lower::{
    lower_bound_feps, lower_bound_power_iteration, FepsBound, FepsConfig, PowerIteration,
    PowerIterationConfig, FEPS_TAIL_LIMIT,
};
pub use params::{ParamTriple, THRESHOLD_RTOL};
pub use schur::{
    default_schur_samples, fubini_bound, schur_certify, schur_lambda, FubiniBound,
    SchurCertificate, SCHUR_RESIDUAL_TOL,
};
pub use witness::{
    adjoint_margin, ln_witness_ratio_adjoint_fxk, ln_witness_ratio_fxk, p1_growth_exponent,
    search_adjoint_fxk, search_fxk, search_p1, witness_ratio_adjoint_fxk, witness_ratio_fxk,
    SearchFailure, Witness, WitnessEvidence, WitnessFamily, WitnessSearch,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Schur,
    Fubini,
    FEps,
    PowerIteration,
    /// Lifted from `n = 1` to `n` by the product structure of the kernel.
    Tensor,
    /// `S_t 1 = 1`.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub params: ParamTriple,
    pub dimension: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_methods: Vec<EstimateMethod>,
    pub upper_methods: Vec<EstimateMethod>,
}

/// How the lower end of a [`NormEstimate`] is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LowerBoundStrategy {
    /// `||T_t|| >= ||S_t 1|| / ||1|| = 1`.
    Constant,
    /// One-dimensional `f_eps` ratio, raised to the power `n`.
    Feps(FepsConfig),
    /// A one-dimensional ratio computed beforehand (it does not depend on `t`).
    Precomputed(f64),
}

/// Certified upper bound `2^n` together with a lower bound.
pub fn estimate_norm(
    params: &ParamTriple,
    n: usize,
    strategy: &LowerBoundStrategy,
) -> Result<NormEstimate> {
    ensure(n >= 1, || "dimension must be at least 1".into())?;
    let (upper, upper_method) = if params.p == 1.0 {
        (fubini_bound(params, n)?.bound, EstimateMethod::Fubini)
    } else {
        let cert = schur_certify(params, n, &default_schur_samples(n))?;
        (cert.bound, EstimateMethod::Schur)
    };
    let (base, mut lower_methods) = match strategy {
        LowerBoundStrategy::Constant => (1.0, vec![EstimateMethod::Constant]),
        LowerBoundStrategy::Feps(cfg) => (cfg.run(params.t, params.p)?.ratio, vec![EstimateMethod::FEps]),
        LowerBoundStrategy::Precomputed(r) => {
            ensure_positive("precomputed lower bound", *r)?;
            (*r, vec![EstimateMethod::FEps])
        }
    };
    if n > 1 && base != 1.0 {
        lower_methods.push(EstimateMethod::Tensor);
    }
    let lower = base.powi(n as i32);
    if !(lower <= upper) {
        return Err(Error::SelfCheck(format!(
            "lower bound {lower} exceeds certified upper bound {upper}"
        )));
    }
    Ok(NormEstimate {
        params: *params,
        dimension: n,
        lower,
        upper,
        lower_methods,
        upper_methods: vec![upper_method],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub search: WitnessSearch,
    pub lower_bound: LowerBoundStrategy,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            search: WitnessSearch::default(),
            lower_bound: LowerBoundStrategy::Feps(FepsConfig::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Classification {
    Bounded(NormEstimate),
    Unbounded(Witness),
    /// The witness search exhausted its grid; never read as bounded.
    Inconclusive(SearchFailure),
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Bounded(_) => "bounded",
            Classification::Unbounded(_) => "unbounded",
            Classification::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Classification::Bounded(_))
    }
}

/// Bounded with an estimate iff `pt = 2s`; otherwise a witness from the
/// family that applies (`f_xk` for `pt > 2s`, the adjoint family or the
/// `p = 1` growth exponent for `pt < 2s`).
pub fn classify(params: &ParamTriple, n: usize, options: &ClassifyOptions) -> Result<Classification> {
    ensure(n >= 1, || "dimension must be at least 1".into())?;
    if params.is_threshold() {
        return estimate_norm(params, n, &options.lower_bound).map(Classification::Bounded);
    }
    let found = if params.p * params.t > 2.0 * params.s {
        search_fxk(params, n, &options.search)?
    } else if params.p == 1.0 {
        search_p1(params, n, &options.search)?
    } else {
        search_adjoint_fxk(params, n, &options.search)?
    };
    Ok(match found {
        Ok(w) => Classification::Unbounded(w),
        Err(f) => Classification::Inconclusive(f),
    })
}

/// `S_{a,b}`, `T_{a,b}` on `L^p(dv_s)` reduced to `S_{t'}` on `L^p(dv_{s'})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub t: f64,
    pub s: f64,
    /// `p t' = 2 s'`, within [`THRESHOLD_RTOL`].
    pub condition: bool,
}

/// `t' = a + b`, `s' = s + pa`.
pub fn reduce_ab(a: f64, b: f64, s: f64, p: f64) -> Result<Reduction> {
    ensure_positive("a", a)?;
    ensure_positive("b", b)?;
    let params = ParamTriple::new(p, a + b, s + p * a)?;
    Ok(Reduction {
        t: params.t,
        s: params.s,
        condition: params.is_threshold(),
    })
}

impl Reduction {
    pub fn params(&self, p: f64) -> Result<ParamTriple> {
        ParamTriple::new(p, self.t, self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triple(p: f64, t: f64, s: f64) -> ParamTriple {
        ParamTriple::new(p, t, s).unwrap()
    }

    fn quick() -> ClassifyOptions {
        ClassifyOptions {
            lower_bound: LowerBoundStrategy::Constant,
            ..Default::default()
        }
    }

    #[test]
    fn classify_examples() {
        match classify(&triple(2.0, 1.0, 1.0), 1, &quick()).unwrap() {
            Classification::Bounded(e) => {
                assert_eq!(e.upper, 2.0);
                assert!(e.lower <= e.upper);
            }
            other => panic!("{other:?}"),
        }
        match classify(&triple(2.0, 1.0, 0.9), 1, &quick()).unwrap() {
            Classification::Unbounded(w) => {
                assert_eq!(w.family, WitnessFamily::Fxk);
                assert!(w.verify().unwrap());
            }
            other => panic!("{other:?}"),
        }
        match classify(&triple(1.0, 1.0, 0.8), 1, &quick()).unwrap() {
            Classification::Unbounded(w) => assert_eq!(w.family, WitnessFamily::P1Exponent),
            other => panic!("{other:?}"),
        }
        match classify(&triple(1.0, 2.0, 1.0), 2, &quick()).unwrap() {
            Classification::Bounded(e) => {
                assert_eq!(e.upper, 4.0);
                assert_eq!(e.upper_methods, vec![EstimateMethod::Fubini]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classify_scale_invariant() {
        for &(p, t, s) in &[(2.0, 1.0, 1.0), (2.0, 1.0, 0.9), (3.0, 1.0, 1.2), (1.0, 1.0, 0.3)] {
            let base = classify(&triple(p, t, s), 1, &quick()).unwrap();
            for &c in &[0.5, 2.0, 10.0] {
                let scaled = classify(&triple(p, c * t, c * s), 1, &quick()).unwrap();
                assert_eq!(base.label(), scaled.label(), "({p}, {t}, {s}) scaled by {c}");
            }
        }
    }

    #[test]
    fn estimate_with_precomputed_lower_bound_lifts_by_tensor() {
        let e = estimate_norm(&triple(2.0, 2.0, 2.0), 2, &LowerBoundStrategy::Precomputed(1.96))
            .unwrap();
        assert_eq!(e.upper, 4.0);
        assert!((e.lower - 1.96 * 1.96).abs() < 1e-15);
        assert!(e.lower_methods.contains(&EstimateMethod::Tensor));
        assert!(estimate_norm(&triple(2.0, 2.0, 2.0), 1, &LowerBoundStrategy::Precomputed(2.5))
            .is_err());
    }

    #[test]
    fn reduce_ab_examples() {
        let r = reduce_ab(1.0, 3.0, 1.0, 1.0).unwrap();
        assert_eq!((r.t, r.s, r.condition), (4.0, 2.0, true));
        let r = reduce_ab(1.0, 3.0, 2.0, 1.0).unwrap();
        assert_eq!((r.t, r.s, r.condition), (4.0, 3.0, false));
        let r = reduce_ab(1e-300, 2.0, 2.0, 2.0).unwrap();
        assert!(r.condition);
        assert!(reduce_ab(0.0, 1.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn dichotomy(p in 1.0f64..4.0, t in 0.1f64..4.0, s in 0.1f64..4.0) {
            let params = triple(p, t, s);
            let c = classify(&params, 1, &quick()).unwrap();
            prop_assert_eq!(c.is_bounded(), params.is_threshold());
            if let Classification::Unbounded(w) = c {
                prop_assert!(w.verify().unwrap());
            }
        }

        #[test]
        fn threshold_always_bounded(p in 1.0f64..6.0, t in 0.05f64..5.0, n in 1usize..4) {
            let params = triple(p, t, p * t / 2.0);
            match classify(&params, n, &quick()).unwrap() {
                Classification::Bounded(e) => {
                    let two_n = 2f64.powi(n as i32);
                    prop_assert!((e.upper - two_n).abs() <= 1e-12 * two_n);
                    prop_assert!(e.lower <= e.upper && e.lower >= 0.0);
                }
                other => prop_assert!(false, "{:?}", other),
            }
        }

        #[test]
        fn lambda_forms_agree(p in 1.01f64..8.0, t in 0.05f64..5.0) {
            let params = triple(p, t, p * t / 2.0);
            let cert = schur_certify(&params, 1, &default_schur_samples(1)).unwrap();
            prop_assert!((cert.lambda - cert.lambda_alt).abs() <= 1e-14 * cert.lambda.max(1e-300) + 1e-300);
        }
    }
}
