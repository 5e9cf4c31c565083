use std::collections::BTreeMap;

use serde::Serialize;

use crate::expr::{parse_with, Expr, ParseContext, Rational, Symbol};
use crate::jet::{jet, t, u, x, Pde};
use crate::symmetry::VectorField;

use super::SolutionError;

fn y() -> Symbol {
    Symbol::independent("y")
}

fn v() -> Symbol {
    Symbol::dependent("v")
}

fn vjet(order: usize) -> Symbol {
    Symbol::jet("v", std::iter::repeat("y").take(order))
}

/// `u = G(x, t, v(y))` with `y = Y(x, t)`, plus a chart that eliminates one
/// base coordinate in favour of `y`, leaving `free`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionAnsatz {
    pub generator: VectorField,
    pub y: Expr,
    pub g: Expr,
    pub chart: Vec<(Symbol, Expr)>,
    pub free: Symbol,
    /// Where the chart is valid, for the report.
    pub chart_note: String,
}

impl ReductionAnsatz {
    /// Parses `y`, `G` and the chart binding `var -> expr` with `y` and `v` in scope.
    pub fn parse(
        generator: VectorField,
        y_text: &str,
        g_text: &str,
        chart_var: &str,
        chart_text: &str,
        note: &str,
    ) -> Result<ReductionAnsatz, SolutionError> {
        let ctx = ParseContext::reduced();
        let p = |s: &str| parse_with(s, &ctx).map_err(|e| SolutionError::Parse(e.to_string()));
        let var = match chart_var {
            "x" => x(),
            "t" => t(),
            other => return Err(SolutionError::Parse(format!("chart must eliminate x or t, not {other}"))),
        };
        let free = if var == x() { t() } else { x() };
        Ok(ReductionAnsatz {
            generator,
            y: p(y_text)?,
            g: p(g_text)?,
            chart: vec![(var, p(chart_text)?)],
            free,
            chart_note: note.to_string(),
        })
    }

    /// `u = G(x, t, w(Y(x, t)))` for an explicit `w(y)`.
    pub fn lift(&self, w: &Expr) -> Expr {
        let wx = w.subs(&y(), &self.y);
        self.g.subs(&v(), &wx).normalize()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    /// Reduced equation in `y, v, v_y, v_yy`; the PDE equals `prefactor · ode`.
    #[serde(serialize_with = "as_string")]
    pub ode: Expr,
    #[serde(serialize_with = "as_string")]
    pub prefactor: Expr,
    pub chart: String,
}

fn as_string<S: serde::Serializer>(e: &Expr, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

impl Reduction {
    /// The reduced equation evaluated on `v = w(y)`.
    pub fn substitute_solution(&self, w: &Expr) -> Expr {
        let w1 = w.differentiate(&y());
        let w2 = w1.differentiate(&y());
        let bind: BTreeMap<Symbol, Expr> = [(v(), w.clone()), (vjet(1), w1), (vjet(2), w2)].into_iter().collect();
        self.ode.substitute(&bind).expect("acyclic")
    }
}

/// Total derivative in `var` of an expression in `(x, t, v, v_y, v_yy, …)`
/// where `v` depends on `(x, t)` only through `Y`.
fn total(h: &Expr, var: &Symbol, y_var: &Expr, order: usize) -> Expr {
    let yv = y_var.differentiate(var);
    let mut out = h.differentiate(var);
    if yv.is_zero() {
        return out.normalize();
    }
    let mut chain = h.differentiate(&v()) * vjet(1).into();
    for k in 1..=order {
        chain = chain + h.differentiate(&vjet(k)) * Expr::sym(&vjet(k + 1));
    }
    out = out + yv * chain;
    out.normalize()
}

fn rational_probe(k: usize) -> Expr {
    const PROBES: [(i64, i64); 4] = [(2, 7), (3, 5), (5, 11), (7, 13)];
    let (p, q) = PROBES[k];
    Expr::rational(Rational::new(p.into(), q.into()))
}

/// Chain-rule substitution of the ansatz into a second-order PDE, followed by
/// separation `Δ = prefactor · ode(y, v, v_y, v_yy)` on the chart.
pub fn reduce(pde: &Pde, ansatz: &ReductionAnsatz) -> Result<Reduction, SolutionError> {
    let (xs, ts) = (x(), t());
    // independence of y and the free coordinate, and u depending on v
    let dy_other = if ansatz.free == xs { ansatz.y.differentiate(&ts) } else { ansatz.y.differentiate(&xs) };
    if dy_other.is_zero() || ansatz.g.differentiate(&v()).is_zero() {
        return Err(SolutionError::SingularAnsatz);
    }
    let g = &ansatz.g;
    let ux = total(g, &xs, &ansatz.y, 0);
    let ut = total(g, &ts, &ansatz.y, 0);
    let uxx = total(&ux, &xs, &ansatz.y, 1);
    let uxt = total(&ux, &ts, &ansatz.y, 1);
    let utt = total(&ut, &ts, &ansatz.y, 1);
    let bind: BTreeMap<Symbol, Expr> = [
        (u(), g.clone()),
        (jet("x"), ux),
        (jet("t"), ut),
        (jet("xx"), uxx),
        (jet("xt"), uxt),
        (jet("tt"), utt),
    ]
    .into_iter()
    .collect();
    let on_ansatz = pde.lhs.substitute(&bind)?;
    let chart: BTreeMap<Symbol, Expr> = ansatz.chart.iter().cloned().collect();
    let r = on_ansatz.substitute(&chart)?;
    if r.is_zero() {
        return Err(SolutionError::VanishingPrefactor);
    }
    for (var, _) in &ansatz.chart {
        if r.contains_symbol(var) {
            return Err(SolutionError::ResidualDependence(var.name().to_string()));
        }
    }
    let (num, _) = r.numer_denom();
    let mut ode: Option<Expr> = None;
    for k in 0..4 {
        let (probe, _) = num.subs(&ansatz.free, &rational_probe(k)).numer_denom();
        ode = Some(match ode {
            None => probe,
            Some(acc) => acc
                .poly_gcd(&probe)
                .ok_or_else(|| SolutionError::NotSeparable("nonpolynomial probe".into()))?,
        });
    }
    let ode = ode.expect("probes ran");
    if ode.as_rational().is_some() || ode.contains_symbol(&ansatz.free) {
        return Err(SolutionError::NotSeparable(format!("{r}")));
    }
    if num.poly_div_exact(&ode).is_none() {
        return Err(SolutionError::NotSeparable(format!("{ode} does not divide {num}")));
    }
    let prefactor = (r / ode.clone()).normalize();
    Ok(Reduction {
        ode,
        prefactor,
        chart: ansatz.chart_note.clone(),
    })
}
