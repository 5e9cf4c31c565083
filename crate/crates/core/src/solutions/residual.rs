use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::expr::{Expr, FuncTag, NumericEnv, Symbol};
use crate::jet::{jet, t, u, x, Pde};
use crate::symmetry::VectorField;

use super::{CandidateForm, Grid, ParamValues, SolutionCandidate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Absolute distance kept from radicands, logarithm arguments and denominators.
    pub margin: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-12,
            max_iter: 60,
            margin: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub x: f64,
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// Points where the PDE was evaluated.
    pub points: usize,
    /// Points dropped by the singular-set margin.
    pub rejected: usize,
    pub failures: Vec<PointFailure>,
}

impl ResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.points > 0 && self.max_abs <= tol
    }

    fn merge(&mut self, other: ResidualReport) {
        self.max_abs = self.max_abs.max(other.max_abs);
        self.points += other.points;
        self.rejected += other.rejected;
        self.failures.extend(other.failures);
    }
}

/// Safeguarded Newton on a scalar `g` returning `(value, derivative)`:
/// plain Newton first, then an expanding bracket search and Newton steps
/// kept inside the bracket with bisection fallback.
pub fn newton_safeguarded(
    g: impl Fn(f64) -> Option<(f64, f64)>,
    seed: f64,
    opts: &NewtonOptions,
) -> Result<f64, String> {
    let done = |step: f64, at: f64| step.abs() <= opts.tol * (1.0 + at.abs());
    let mut z = seed;
    for _ in 0..opts.max_iter {
        let Some((v, d)) = g(z) else { break };
        if v == 0.0 {
            return Ok(z);
        }
        if d == 0.0 || !d.is_finite() || !v.is_finite() {
            break;
        }
        let step = v / d;
        z -= step;
        if done(step, z) {
            return Ok(z);
        }
        if !z.is_finite() || (z - seed).abs() > 1e6 {
            break;
        }
    }
    let sign = |p: f64| g(p).map(|(v, _)| v).filter(|v| v.is_finite());
    let f0 = sign(seed).ok_or("no value at seed")?;
    let mut h = 1e-3 * (1.0 + seed.abs());
    let mut bracket = None;
    for _ in 0..48 {
        for p in [seed - h, seed + h] {
            if let Some(fp) = sign(p) {
                if fp == 0.0 {
                    return Ok(p);
                }
                if (fp > 0.0) != (f0 > 0.0) {
                    bracket = Some(if p < seed { (p, seed, fp) } else { (seed, p, f0) });
                    break;
                }
            }
        }
        if bracket.is_some() {
            break;
        }
        h *= 1.6;
    }
    let (mut lo, mut hi, mut flo) = bracket.ok_or("no sign change near seed")?;
    let mut z = 0.5 * (lo + hi);
    for _ in 0..opts.max_iter {
        let Some((v, d)) = g(z) else { return Err("evaluation failed inside bracket".into()) };
        if v == 0.0 {
            return Ok(z);
        }
        if (v > 0.0) == (flo > 0.0) {
            lo = z;
            flo = v;
        } else {
            hi = z;
        }
        let newton = z - v / d;
        let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = next - z;
        z = next;
        if done(step, z) || done(hi - lo, z) {
            return Ok(z);
        }
    }
    Err(format!("no convergence in {} iterations", opts.max_iter))
}

/// Quantities that must stay away from zero for the sample to be meaningful.
#[derive(Debug, Clone)]
enum Guard {
    Positive(Expr),
    NonZero(Expr),
}

fn collect_guards(e: &Expr, out: &mut Vec<Guard>) {
    match e {
        Expr::Rational(_) | Expr::Symbol(_) => {}
        Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|a| collect_guards(a, out)),
        Expr::Power(b, r) => {
            let even_root = r.denom().to_u64().map(|q| q % 2 == 0).unwrap_or(false);
            if even_root {
                out.push(Guard::Positive((**b).clone()));
            } else if r.is_negative() {
                out.push(Guard::NonZero((**b).clone()));
            }
            collect_guards(b, out);
        }
        Expr::Func(tag, a) => {
            match tag {
                FuncTag::Log | FuncTag::Sqrt => out.push(Guard::Positive((**a).clone())),
                FuncTag::Tan => out.push(Guard::NonZero(Expr::func(FuncTag::Cos, (**a).clone()))),
                _ => {}
            }
            collect_guards(a, out);
        }
    }
}

fn guards_ok(guards: &[Guard], env: &NumericEnv, margin: f64) -> bool {
    guards.iter().all(|g| match g {
        Guard::Positive(e) => e.eval(env).map(|v| v > margin).unwrap_or(false),
        Guard::NonZero(e) => e.eval(env).map(|v| v.abs() > margin).unwrap_or(false),
    })
}

/// Jet values at a point of a solution graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GraphPoint {
    pub x: f64,
    pub t: f64,
    pub u: f64,
    pub ux: f64,
    pub ut: f64,
    pub uxx: f64,
    pub uxt: f64,
    pub utt: f64,
}

enum Compiled {
    Explicit {
        d: [Expr; 6],
        guards: Vec<Guard>,
    },
    Implicit {
        /// F, F_x, F_t, F_u, F_xx, F_xt, F_tt, F_xu, F_tu, F_uu
        d: Vec<Expr>,
        guards: Vec<Guard>,
    },
}

fn compile(form: &CandidateForm) -> Compiled {
    let (xs, ts, us) = (x(), t(), u());
    match form {
        CandidateForm::Explicit(f) => {
            let fx = f.differentiate_structural(&xs);
            let ft = f.differentiate_structural(&ts);
            let d = [
                f.clone(),
                fx.differentiate_structural(&xs),
                fx.differentiate_structural(&ts),
                ft.differentiate_structural(&ts),
                fx,
                ft,
            ];
            let mut guards = Vec::new();
            collect_guards(f, &mut guards);
            Compiled::Explicit { d, guards }
        }
        CandidateForm::Implicit(g) => {
            let gx = g.differentiate_structural(&xs);
            let gt = g.differentiate_structural(&ts);
            let gu = g.differentiate_structural(&us);
            let d = vec![
                g.clone(),
                gx.clone(),
                gt.clone(),
                gu.clone(),
                gx.differentiate_structural(&xs),
                gx.differentiate_structural(&ts),
                gt.differentiate_structural(&ts),
                gx.differentiate_structural(&us),
                gt.differentiate_structural(&us),
                gu.differentiate_structural(&us),
            ];
            let mut guards = Vec::new();
            collect_guards(g, &mut guards);
            guards.push(Guard::NonZero(gu));
            Compiled::Implicit { d, guards }
        }
    }
}

enum PointOutcome {
    Ok(GraphPoint),
    Rejected,
    Failed(String),
}

fn base_env(params: &ParamValues, px: f64, pt: f64) -> NumericEnv {
    let mut env: NumericEnv = params.iter().map(|(k, v)| (k.clone(), *v)).collect();
    env.insert("x".into(), px);
    env.insert("t".into(), pt);
    env
}

impl Compiled {
    fn at(&self, params: &ParamValues, px: f64, pt: f64, seed: Option<f64>, opts: &NewtonOptions) -> PointOutcome {
        let mut env = base_env(params, px, pt);
        let ev = |e: &Expr, env: &NumericEnv| e.eval(env).ok().filter(|v| v.is_finite());
        match self {
            Compiled::Explicit { d, guards } => {
                if !guards_ok(guards, &env, opts.margin) {
                    return PointOutcome::Rejected;
                }
                let vals: Option<Vec<f64>> = d.iter().map(|e| ev(e, &env)).collect();
                match vals {
                    Some(v) => PointOutcome::Ok(GraphPoint {
                        x: px,
                        t: pt,
                        u: v[0],
                        uxx: v[1],
                        uxt: v[2],
                        utt: v[3],
                        ux: v[4],
                        ut: v[5],
                    }),
                    None => PointOutcome::Failed("non-finite derivative".into()),
                }
            }
            Compiled::Implicit { d, guards } => {
                let g = |z: f64| {
                    let mut e = env.clone();
                    e.insert("u".into(), z);
                    Some((ev(&d[0], &e)?, ev(&d[3], &e)?))
                };
                let root = match newton_safeguarded(g, seed.unwrap_or(0.0), opts) {
                    Ok(z) => z,
                    Err(why) => return PointOutcome::Failed(why),
                };
                env.insert("u".into(), root);
                if !guards_ok(guards, &env, opts.margin) {
                    return PointOutcome::Rejected;
                }
                let Some(v) = d.iter().map(|e| ev(e, &env)).collect::<Option<Vec<f64>>>() else {
                    return PointOutcome::Failed("non-finite derivative".into());
                };
                let (fx, ft, fu, fxx, fxt, ftt, fxu, ftu, fuu) = (v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]);
                let ux = -fx / fu;
                let ut = -ft / fu;
                PointOutcome::Ok(GraphPoint {
                    x: px,
                    t: pt,
                    u: root,
                    ux,
                    ut,
                    uxx: -(fxx + 2.0 * fxu * ux + fuu * ux * ux) / fu,
                    uxt: -(fxt + fxu * ut + ftu * ux + fuu * ux * ut) / fu,
                    utt: -(ftt + 2.0 * ftu * ut + fuu * ut * ut) / fu,
                })
            }
        }
    }
}

struct Sampled {
    points: Vec<GraphPoint>,
    rejected: usize,
    failures: Vec<PointFailure>,
}

/// Graph points of `s` over `grid`, following transports back to their root candidate.
fn sample(s: &SolutionCandidate, grid: &Grid, params: &ParamValues, opts: &NewtonOptions) -> Sampled {
    let compiled = compile(&s.form);
    let seeds: Vec<(f64, f64, Option<f64>)>;
    let mut rejected = 0;
    let mut failures = Vec::new();
    match &s.origin {
        Some(tr) => {
            let base = sample(&tr.source, grid, params, opts);
            rejected += base.rejected;
            failures.extend(base.failures);
            seeds = base
                .points
                .iter()
                .filter_map(|p| {
                    let q = tr.action.apply_numeric(tr.eps, [p.x, p.t, p.u], params).ok()?;
                    Some((q[0], q[1], Some(q[2])))
                })
                .collect();
        }
        None => seeds = grid.points().into_iter().map(|(a, b)| (a, b, None)).collect(),
    }
    let mut points = Vec::with_capacity(seeds.len());
    let mut last: Option<f64> = None;
    for (px, pt, seed) in seeds {
        // continuation: reuse the previous root when no seed is known
        match compiled.at(params, px, pt, seed.or(last), opts) {
            PointOutcome::Ok(p) => {
                last = Some(p.u);
                points.push(p);
            }
            PointOutcome::Rejected => rejected += 1,
            PointOutcome::Failed(reason) => failures.push(PointFailure { x: px, t: pt, reason }),
        }
    }
    Sampled {
        points,
        rejected,
        failures,
    }
}

fn jet_env(p: &GraphPoint, params: &ParamValues) -> NumericEnv {
    let mut env = base_env(params, p.x, p.t);
    let names: [(Symbol, f64); 6] = [
        (u(), p.u),
        (jet("x"), p.ux),
        (jet("t"), p.ut),
        (jet("xx"), p.uxx),
        (jet("xt"), p.uxt),
        (jet("tt"), p.utt),
    ];
    for (s, v) in names {
        env.insert(s.name().to_string(), v);
    }
    env
}

fn evaluate_on(e: &Expr, sampled: &Sampled, params: &ParamValues) -> ResidualReport {
    let mut report = ResidualReport {
        max_abs: 0.0,
        points: 0,
        rejected: sampled.rejected,
        failures: sampled.failures.clone(),
    };
    for p in &sampled.points {
        match e.eval(&jet_env(p, params)) {
            Ok(v) if v.is_finite() => {
                report.max_abs = report.max_abs.max(v.abs());
                report.points += 1;
            }
            Ok(_) => report.failures.push(PointFailure {
                x: p.x,
                t: p.t,
                reason: "non-finite residual".into(),
            }),
            Err(e) => report.failures.push(PointFailure {
                x: p.x,
                t: p.t,
                reason: e.to_string(),
            }),
        }
    }
    report
}

/// Largest `|Δ|` over the graph of `s` sampled on `grid`. Candidates built
/// by a transport are sampled on the image of their source's sample points.
pub fn residual(pde: &Pde, s: &SolutionCandidate, grid: &Grid, params: &ParamValues) -> ResidualReport {
    residual_with(pde, s, grid, params, &NewtonOptions::default())
}

pub fn residual_with(
    pde: &Pde,
    s: &SolutionCandidate,
    grid: &Grid,
    params: &ParamValues,
    opts: &NewtonOptions,
) -> ResidualReport {
    let sampled = sample(s, grid, params, opts);
    evaluate_on(&pde.lhs, &sampled, params)
}

/// Residuals for several parameter samples, merged.
pub fn residual_over(pde: &Pde, s: &SolutionCandidate, grid: &Grid, samples: &[ParamValues]) -> ResidualReport {
    let mut out = ResidualReport {
        max_abs: 0.0,
        points: 0,
        rejected: 0,
        failures: Vec::new(),
    };
    for p in samples {
        out.merge(residual(pde, s, grid, p));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub residual: ResidualReport,
    /// Largest `|η − ξ₁u_x − ξ₂u_t|` on the graph.
    pub invariance_max_abs: f64,
    pub solves_pde: bool,
    pub invariant: bool,
}

/// Two independent checks: `s` solves the PDE, and the characteristic of `v`
/// vanishes along the graph of `s`.
pub fn verify_invariant_solution(
    v: &VectorField,
    s: &SolutionCandidate,
    pde: &Pde,
    grid: &Grid,
    params: &ParamValues,
    tol: f64,
) -> InvariantReport {
    let sampled = sample(s, grid, params, &NewtonOptions::default());
    let residual = evaluate_on(&pde.lhs, &sampled, params);
    let q = evaluate_on(&v.characteristic(), &sampled, params);
    InvariantReport {
        solves_pde: residual.passes(tol),
        invariant: q.passes(tol),
        invariance_max_abs: q.max_abs,
        residual,
    }
}

