use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymptotics::{lemma13_extrapolate, lemma13_limit, Lemma13Params};
use crate::error::{ensure, ensure_positive, Error, Result};
use crate::kernel::{reproduce_check, PointCn, Polynomial, MAX_REPRODUCE_DEGREE};
use crate::measure::{
    build_rule, gaussian_monomial_moment, integrate, GaussianMeasure, GridFunction, MultiIndex,
    RuleBuilder, MAX_GRID_DIMENSION,
};
use crate::norms::{
    classify, estimate_norm, fubini_bound, lower_bound_feps, lower_bound_power_iteration,
    reduce_ab, schur_certify, Classification, ClassifyOptions, EstimateMethod, FepsConfig,
    LowerBoundStrategy, ParamTriple, PowerIterationConfig, Witness, WitnessEvidence,
};
use crate::operators::{default_x_max, radial_correspondence_check, RadialOperatorA};
use crate::Complex64;

use super::output::{Cell, Fields, Results};
use super::plot::{heatmap, line_chart, Series};
use super::range::RangeSpec;
use super::{Command, Profile};

pub struct Outcome {
    pub inputs: Fields,
    pub results: Results,
    pub report: Vec<String>,
    pub svg: Option<String>,
}

fn fields<const N: usize>(entries: [(&str, Cell); N]) -> Fields {
    entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn report_of(summary: &Fields) -> Vec<String> {
    summary
        .iter()
        .map(|(k, v)| match v {
            Cell::Num(x) => format!("{k} = {x:?}"),
            Cell::Int(i) => format!("{k} = {i}"),
            Cell::Bool(b) => format!("{k} = {b}"),
            Cell::Text(s) => format!("{k} = {s}"),
        })
        .collect()
}

fn grid_dimension(n: usize) -> Result<()> {
    ensure((1..=MAX_GRID_DIMENSION).contains(&n), || {
        format!("quadrature on C^n supports n in 1..={MAX_GRID_DIMENSION}, got {n}")
    })
}

fn positive_dimension(n: usize) -> Result<()> {
    ensure(n >= 1, || "dimension must be at least 1".into())
}

fn tolerance(tol: f64) -> Result<()> {
    ensure(tol > 0.0 && tol < 1.0, || format!("tolerance must lie in (0, 1), got {tol}"))
}

fn label(m: &MultiIndex) -> String {
    m.entries().iter().map(u32::to_string).collect::<Vec<_>>().join(";")
}

pub fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::Moments { n, t, p, max_order, max_entry, tol } => {
            moments(*n, t, p, *max_order, *max_entry, *tol)
        }
        Command::VerifyReproducing { t, n, degree, points, radius, seed, tol } => {
            verify_reproducing(*t, *n, *degree, *points, *radius, *seed, *tol)
        }
        Command::SchurBound { p, t, s, n, radii } => schur_bound(*p, *t, *s, *n, radii),
        Command::NormEstimate {
            p,
            t,
            s,
            n,
            eps_range,
            x_max,
            nodes,
            power_iteration,
            pi_x_max,
            pi_nodes,
        } => norm_estimate(NormEstimateArgs {
            p: *p,
            t: *t,
            s: *s,
            n: *n,
            eps_range: *eps_range,
            x_max: *x_max,
            nodes: *nodes,
            power_iteration: *power_iteration,
            pi_x_max: *pi_x_max,
            pi_nodes: *pi_nodes,
        }),
        Command::ThresholdScan { p, t_range, s_range, n } => threshold_scan(*p, t_range, s_range, *n),
        Command::Lemma13Limit { p, c, h_range } => lemma13(*p, *c, h_range),
        Command::ReduceAb { a, b, s, p, n } => reduce(*a, *b, *s, *p, *n),
        Command::RadialCheck { t, profile, radii, x_max, nodes, tol } => {
            radial_check(*t, *profile, radii, *x_max, *nodes, *tol)
        }
    }
}

fn moments(n: usize, ts: &[f64], ps: &[f64], max_order: u32, max_entry: u32, tol: f64) -> Result<Outcome> {
    grid_dimension(n)?;
    tolerance(tol)?;
    ensure(!ts.is_empty() && !ps.is_empty(), || "need at least one t and one p".into())?;
    for &t in ts {
        ensure_positive("t", t)?;
    }
    for &p in ps {
        ensure(p.is_finite() && p > 0.0, || format!("p must be positive, got {p}"))?;
    }
    let indices = if n == 1 {
        MultiIndex::all_up_to_order(1, max_order)
    } else {
        MultiIndex::all_bounded(n, max_entry)
    };

    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &t in ts {
        let rule = build_rule(n, t, tol)?;
        let measure = GaussianMeasure::new(n, t)?;
        for &p in ps {
            for m in &indices {
                let f = GridFunction::sample_real(&rule, |z| m.monomial(z).norm().powf(p));
                let quad = integrate(&f, &measure, &rule)?.re;
                let exact = gaussian_monomial_moment(m, p, t)?;
                let rel = ((quad - exact) / exact).abs();
                worst = worst.max(rel);
                rows.push(vec![
                    t.into(),
                    p.into(),
                    label(m).into(),
                    quad.into(),
                    exact.into(),
                    rel.into(),
                ]);
            }
        }
    }
    let summary = fields([("max_relative_error", worst.into()), ("cases", rows.len().into())]);
    Ok(Outcome {
        inputs: fields([
            ("n", n.into()),
            ("t", join(ts).into()),
            ("p", join(ps).into()),
            ("max_order", (max_order as usize).into()),
            ("max_entry", (max_entry as usize).into()),
            ("tol", tol.into()),
        ]),
        report: report_of(&summary),
        results: Results {
            summary,
            columns: columns(&["t", "p", "m", "quadrature", "closed_form", "relative_error"]),
            rows,
        },
        svg: None,
    })
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>().join(",")
}

fn verify_reproducing(
    t: f64,
    n: usize,
    degree: u32,
    points: usize,
    radius: f64,
    seed: u64,
    tol: f64,
) -> Result<Outcome> {
    ensure_positive("t", t)?;
    grid_dimension(n)?;
    tolerance(tol)?;
    ensure_positive("radius", radius)?;
    ensure(points >= 1, || "need at least one point".into())?;
    ensure(degree <= MAX_REPRODUCE_DEGREE, || {
        format!("degree {degree} exceeds {MAX_REPRODUCE_DEGREE}")
    })?;

    let rule = RuleBuilder::new(n, t, tol).shift(radius).build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_coordinate = radius / (n as f64).sqrt();
    let monomials = MultiIndex::all_up_to_order(n, degree);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for i in 0..points {
        let coords: Vec<Complex64> = (0..n)
            .map(|_| {
                let r = per_coordinate * rng.gen::<f64>().sqrt();
                Complex64::from_polar(r, std::f64::consts::TAU * rng.gen::<f64>())
            })
            .collect();
        let a = PointCn::new(coords)?;
        for m in &monomials {
            let f = Polynomial::monomial(m.clone(), Complex64::new(1.0, 0.0));
            let residual = reproduce_check(&f, &a, t, &rule)?;
            worst = worst.max(residual);
            rows.push(vec![
                i.into(),
                a.coords()[0].re.into(),
                a.coords()[0].im.into(),
                a.norm().into(),
                label(m).into(),
                residual.into(),
            ]);
        }
    }
    let summary = fields([("max_residual", worst.into()), ("cases", rows.len().into())]);
    Ok(Outcome {
        inputs: fields([
            ("t", t.into()),
            ("n", n.into()),
            ("degree", (degree as usize).into()),
            ("points", points.into()),
            ("radius", radius.into()),
            ("seed", seed.into()),
            ("tol", tol.into()),
        ]),
        report: report_of(&summary),
        results: Results {
            summary,
            columns: columns(&["point", "a1_re", "a1_im", "abs_a", "m", "residual"]),
            rows,
        },
        svg: None,
    })
}

fn schur_bound(p: f64, t: f64, s: f64, n: usize, radii: &RangeSpec) -> Result<Outcome> {
    let params = ParamTriple::new(p, t, s)?;
    positive_dimension(n)?;
    let radii = radii.values();
    ensure(radii.iter().all(|&r| r >= 0.0), || "radii must be nonnegative".into())?;
    let inputs = fields([
        ("p", p.into()),
        ("t", t.into()),
        ("s", s.into()),
        ("n", n.into()),
        ("radii", join(&radii).into()),
    ]);

    let (summary, rows) = if params.q().is_none() {
        let f = fubini_bound(&params, n)?;
        let summary = fields([
            ("method", "fubini".into()),
            ("gamma", f.gamma.into()),
            ("bound", f.bound.into()),
        ]);
        (summary, Vec::new())
    } else {
        let samples: Vec<PointCn> = radii
            .iter()
            .map(|&r| PointCn::on_axis(n, Complex64::new(r, 0.0)))
            .collect();
        let cert = schur_certify(&params, n, &samples)?;
        let rows = radii
            .iter()
            .zip(cert.residuals_first.iter().zip(&cert.residuals_second))
            .map(|(&r, (&a, &b))| vec![r.into(), a.into(), b.into()])
            .collect();
        let summary = fields([
            ("method", "schur".into()),
            ("lambda", cert.lambda.into()),
            ("lambda_alt", cert.lambda_alt.into()),
            ("c1", cert.c1.into()),
            ("c2", cert.c2.into()),
            ("bound", cert.bound.into()),
            ("max_residual", cert.max_residual().into()),
        ]);
        (summary, rows)
    };
    Ok(Outcome {
        inputs,
        report: report_of(&summary),
        results: Results {
            summary,
            columns: columns(&["radius", "residual_first", "residual_second"]),
            rows,
        },
        svg: None,
    })
}

struct NormEstimateArgs {
    p: f64,
    t: f64,
    s: f64,
    n: usize,
    eps_range: Option<RangeSpec>,
    x_max: Option<f64>,
    nodes: usize,
    power_iteration: bool,
    pi_x_max: Option<f64>,
    pi_nodes: usize,
}

fn norm_estimate(args: NormEstimateArgs) -> Result<Outcome> {
    let params = ParamTriple::new(args.p, args.t, args.s)?;
    positive_dimension(args.n)?;
    if !params.is_threshold() {
        return Err(Error::ThresholdViolated { pt: args.p * args.t, two_s: 2.0 * args.s });
    }
    let t = args.t;
    let eps: Vec<f64> = match args.eps_range {
        Some(r) => r.values(),
        None => RangeSpec { lo: 5e-2 * t, hi: 5e-4 * t, count: 5, log: true }.values(),
    };
    for &e in &eps {
        ensure_positive("eps", e)?;
    }
    let x_max = args.x_max.unwrap_or(FepsConfig::default().tx_max / t);
    ensure_positive("x_max", x_max)?;
    ensure(args.nodes >= 1 && args.pi_nodes >= 1, || "node counts must be positive".into())?;
    let pi_x_max = args.pi_x_max.unwrap_or(2.0 * default_x_max(t));
    ensure_positive("pi_x_max", pi_x_max)?;
    if args.power_iteration {
        ensure(args.p == 2.0, || "power iteration applies to p = 2 only".into())?;
    }

    let a = RadialOperatorA::new(t, x_max, args.nodes)?;
    let mut rows = Vec::new();
    let mut best: Option<(f64, f64)> = None;
    let mut report = Vec::new();
    for &e in &eps {
        let b = lower_bound_feps(t, args.p, e, &a)?;
        if !b.adequate {
            report.push(format!(
                "warning: eps = {e:?} leaves a tail fraction {:.3e} beyond x_max",
                b.tail_fraction
            ));
        }
        if best.map_or(true, |(r, _)| b.ratio > r) {
            best = Some((b.ratio, e));
        }
        rows.push(vec![
            e.into(),
            b.ratio.into(),
            b.tail_fraction.into(),
            b.adequate.into(),
        ]);
    }
    let (ratio, best_eps) = best.expect("at least one eps");
    let estimate = estimate_norm(&params, args.n, &LowerBoundStrategy::Precomputed(ratio))?;
    let tags = |m: &[EstimateMethod]| {
        m.iter()
            .map(|m| match m {
                EstimateMethod::Schur => "schur",
                EstimateMethod::Fubini => "fubini",
                EstimateMethod::FEps => "f_eps",
                EstimateMethod::PowerIteration => "power_iteration",
                EstimateMethod::Tensor => "tensor",
                EstimateMethod::Constant => "constant",
            })
            .collect::<Vec<_>>()
            .join(",")
    };
    let mut summary = fields([
        ("lower", estimate.lower.into()),
        ("upper", estimate.upper.into()),
        ("lower_methods", tags(&estimate.lower_methods).into()),
        ("upper_methods", tags(&estimate.upper_methods).into()),
        ("f_eps_ratio", ratio.into()),
        ("f_eps_best_eps", best_eps.into()),
    ]);
    if args.power_iteration {
        let pa = RadialOperatorA::new(t, pi_x_max, args.pi_nodes)?;
        let pi = lower_bound_power_iteration(&pa, &PowerIterationConfig::default())?;
        summary.insert("power_iteration_sigma".into(), pi.sigma.into());
        summary.insert("power_iteration_iterations".into(), pi.iterations.into());
    }
    report.extend(report_of(&summary));

    let svg = line_chart(
        &format!("f_eps lower bound, p = {}, t = {}", args.p, t),
        "eps",
        "eps^(1/p) ||A f_eps||_p",
        &[Series {
            label: format!("p = {}", args.p),
            points: rows
                .iter()
                .map(|r| match (&r[0], &r[1]) {
                    (Cell::Num(x), Cell::Num(y)) => (*x, *y),
                    _ => (f64::NAN, f64::NAN),
                })
                .collect(),
        }],
        true,
        Some((2.0, "2")),
    );
    Ok(Outcome {
        inputs: fields([
            ("p", args.p.into()),
            ("t", t.into()),
            ("s", args.s.into()),
            ("n", args.n.into()),
            ("eps", join(&eps).into()),
            ("x_max", x_max.into()),
            ("nodes", args.nodes.into()),
            ("power_iteration", args.power_iteration.into()),
            ("pi_x_max", pi_x_max.into()),
            ("pi_nodes", args.pi_nodes.into()),
        ]),
        report,
        results: Results {
            summary,
            columns: columns(&["eps", "ratio", "tail_fraction", "adequate"]),
            rows,
        },
        svg: Some(svg),
    })
}

fn witness_cells(w: &Witness) -> [Cell; 5] {
    let family: Cell = w.family.tag().into();
    match w.evidence {
        WitnessEvidence::Ratio { x, k, ln_ratio } => {
            [family, x.into(), k.into(), ln_ratio.into(), Cell::empty()]
        }
        WitnessEvidence::NotIntegrable { margin } => {
            [family, Cell::empty(), Cell::empty(), Cell::num(f64::INFINITY), margin.into()]
        }
        WitnessEvidence::Growth { gamma, radius, ln_ratio } => {
            [family, radius.into(), Cell::empty(), ln_ratio.into(), gamma.into()]
        }
    }
}

fn classification_cells(c: &Classification) -> Result<Vec<Cell>> {
    let mut row: Vec<Cell> = vec![c.label().into()];
    match c {
        Classification::Bounded(e) => {
            row.extend([Cell::empty(), Cell::empty(), Cell::empty(), Cell::empty(), Cell::empty()]);
            row.extend([e.lower.into(), e.upper.into(), Cell::empty()]);
        }
        Classification::Unbounded(w) => {
            let verified = w.verify()?;
            if !verified {
                return Err(Error::SelfCheck(format!("witness {w:?} fails re-evaluation")));
            }
            row.extend(witness_cells(w));
            row.extend([Cell::empty(), Cell::empty(), verified.into()]);
        }
        Classification::Inconclusive(f) => {
            row.extend([
                f.family.tag().into(),
                f.best_x.into(),
                Cell::empty(),
                f.best_ln_ratio_at_k_max.into(),
                Cell::empty(),
            ]);
            row.extend([Cell::empty(), Cell::empty(), Cell::empty()]);
        }
    }
    Ok(row)
}

const CLASSIFICATION_COLUMNS: [&str; 9] = [
    "status", "family", "x", "k", "ln_ratio", "gamma_or_margin", "lower", "upper", "witness_verified",
];

/// Lower-bound strategy shared by every threshold cell: the one-dimensional
/// `f_eps` ratio does not depend on `t` for the scale-free configuration.
fn shared_lower_bound(p: f64) -> Result<LowerBoundStrategy> {
    Ok(LowerBoundStrategy::Precomputed(FepsConfig::default().run(1.0, p)?.ratio))
}

fn threshold_scan(p: f64, t_range: &RangeSpec, s_range: &RangeSpec, n: usize) -> Result<Outcome> {
    positive_dimension(n)?;
    let ts = t_range.values();
    let ss = s_range.values();
    let mut grid = Vec::with_capacity(ts.len() * ss.len());
    for &s in &ss {
        for &t in &ts {
            grid.push(ParamTriple::new(p, t, s)?);
        }
    }
    let mut options = ClassifyOptions {
        lower_bound: LowerBoundStrategy::Constant,
        ..Default::default()
    };
    if grid.iter().any(ParamTriple::is_threshold) {
        options.lower_bound = shared_lower_bound(p)?;
    }

    let mut rows = Vec::with_capacity(grid.len());
    let mut cells = vec![Vec::with_capacity(ts.len()); ss.len()];
    let mut counts = [0usize; 3];
    for (idx, params) in grid.iter().enumerate() {
        let c = classify(params, n, &options)?;
        let code = match c {
            Classification::Bounded(_) => 0,
            Classification::Unbounded(_) => 1,
            Classification::Inconclusive(_) => 2,
        };
        counts[code] += 1;
        cells[idx / ts.len()].push(code);
        let mut row: Vec<Cell> = vec![
            params.t.into(),
            params.s.into(),
            ((params.p * params.t - 2.0 * params.s) / (params.p * params.t)).into(),
        ];
        row.extend(classification_cells(&c)?);
        rows.push(row);
    }
    let summary = fields([
        ("bounded", counts[0].into()),
        ("unbounded", counts[1].into()),
        ("inconclusive", counts[2].into()),
    ]);
    let svg = heatmap(
        &format!("boundedness of T_t on L^{p}(dv_s), n = {n}"),
        "t",
        "s",
        &ts,
        &ss,
        &cells,
        &[("bounded", "#2ca02c"), ("unbounded", "#d62728"), ("inconclusive", "#7f7f7f")],
    );
    let mut cols = vec!["t", "s", "relative_gap"];
    cols.extend(CLASSIFICATION_COLUMNS);
    Ok(Outcome {
        inputs: fields([
            ("p", p.into()),
            ("t_range", t_range.to_string().into()),
            ("s_range", s_range.to_string().into()),
            ("n", n.into()),
        ]),
        report: report_of(&summary),
        results: Results { summary, columns: columns(&cols), rows },
        svg: Some(svg),
    })
}

fn lemma13(p: f64, c: f64, h_range: &RangeSpec) -> Result<Outcome> {
    let hs = h_range.values();
    for &h in &hs {
        Lemma13Params::new(c, p, h)?;
    }
    let e = lemma13_extrapolate(c, p, &hs)?;
    let target = lemma13_limit(p);
    let rows: Vec<Vec<Cell>> = e
        .hs
        .iter()
        .zip(e.values.iter().zip(&e.partial_estimates))
        .map(|(&h, (&v, &est))| vec![h.into(), v.into(), est.into()])
        .collect();
    let summary = fields([
        ("estimate", e.estimate.into()),
        ("target", target.into()),
        ("relative_error", ((e.estimate - target) / target).into()),
        ("monotone", e.monotone.into()),
    ]);
    let svg = line_chart(
        &format!("h-scaled double integral, p = {p}, c = {c}"),
        "h",
        "value",
        &[Series {
            label: "raw".into(),
            points: e.hs.iter().copied().zip(e.values.iter().copied()).collect(),
        }],
        true,
        Some((target, "(2 sqrt(2 pi))^p")),
    );
    Ok(Outcome {
        inputs: fields([("p", p.into()), ("c", c.into()), ("h", join(&hs).into())]),
        report: report_of(&summary),
        results: Results {
            summary,
            columns: columns(&["h", "value", "extrapolated_through_h"]),
            rows,
        },
        svg: Some(svg),
    })
}

fn reduce(a: f64, b: f64, s: f64, p: f64, n: usize) -> Result<Outcome> {
    positive_dimension(n)?;
    let r = reduce_ab(a, b, s, p)?;
    let params = r.params(p)?;
    let options = ClassifyOptions {
        lower_bound: if params.is_threshold() {
            shared_lower_bound(p)?
        } else {
            LowerBoundStrategy::Constant
        },
        ..Default::default()
    };
    let c = classify(&params, n, &options)?;
    let mut row: Vec<Cell> = vec![r.t.into(), r.s.into(), r.condition.into()];
    row.extend(classification_cells(&c)?);
    let summary = fields([
        ("t_reduced", r.t.into()),
        ("s_reduced", r.s.into()),
        ("condition", r.condition.into()),
        ("classification", c.label().into()),
    ]);
    let mut cols = vec!["t_reduced", "s_reduced", "condition"];
    cols.extend(CLASSIFICATION_COLUMNS);
    Ok(Outcome {
        inputs: fields([
            ("a", a.into()),
            ("b", b.into()),
            ("s", s.into()),
            ("p", p.into()),
            ("n", n.into()),
        ]),
        report: report_of(&summary),
        results: Results { summary, columns: columns(&cols), rows: vec![row] },
        svg: None,
    })
}

fn radial_check(
    t: f64,
    profile: Profile,
    radii: &RangeSpec,
    x_max: Option<f64>,
    nodes: usize,
    tol: f64,
) -> Result<Outcome> {
    ensure_positive("t", t)?;
    tolerance(tol)?;
    let x_max = x_max.unwrap_or(default_x_max(t));
    ensure_positive("x_max", x_max)?;
    ensure(nodes >= 1, || "node count must be positive".into())?;
    let radii = radii.values();
    ensure(radii.iter().all(|&r| r >= 0.0), || "radii must be nonnegative".into())?;
    let reach = radii.iter().copied().fold(0.0, f64::max);

    let breaks: &[f64] = if profile == Profile::Indicator { &[1.0] } else { &[] };
    let rule = RuleBuilder::new(1, t, tol)
        .shift(reach)
        .radial_breakpoints(breaks)
        .build()?;
    let a = RadialOperatorA::with_breakpoints(t, x_max, nodes, breaks)?;
    let g = |y: f64| match profile {
        Profile::Exp => (-y).exp(),
        Profile::YExp => y * (-y).exp(),
        Profile::Indicator => {
            if y <= 1.0 {
                1.0
            } else {
                0.0
            }
        }
    };
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &r in &radii {
        let c = radial_correspondence_check(t, g, Complex64::new(r, 0.0), &rule, &a)?;
        worst = worst.max(c.relative_residual());
        rows.push(vec![
            r.into(),
            c.planar.into(),
            c.radial.into(),
            c.relative_residual().into(),
        ]);
    }
    let summary = fields([("max_relative_residual", worst.into())]);
    let name = match profile {
        Profile::Exp => "exp",
        Profile::YExp => "y-exp",
        Profile::Indicator => "indicator",
    };
    Ok(Outcome {
        inputs: fields([
            ("t", t.into()),
            ("profile", name.into()),
            ("radii", join(&radii).into()),
            ("x_max", x_max.into()),
            ("nodes", nodes.into()),
            ("tol", tol.into()),
        ]),
        report: report_of(&summary),
        results: Results {
            summary,
            columns: columns(&["radius", "planar", "radial", "relative_residual"]),
            rows,
        },
        svg: None,
    })
}
