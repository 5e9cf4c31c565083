use std::collections::BTreeMap;

use crate::expr::{parse, Expr, ExprError, NumericEnv, Symbol};
use crate::jet::{t, u, x};
use crate::symmetry::VectorField;

use super::{CandidateForm, ParamValues, SolutionCandidate, Transport};

fn eps() -> Symbol {
    Symbol::parameter("eps")
}

/// One-parameter group `(x, t, u) ↦ (x̃, t̃, ũ)` with parameter `eps`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAction {
    pub index: usize,
    pub x: Expr,
    pub t: Expr,
    pub u: Expr,
}

const ACTIONS: [[&str; 3]; 7] = [
    ["x + eps", "t", "u"],
    ["x", "t + eps", "u"],
    ["x", "t", "u + eps"],
    ["x*cosh(eps) + t*sinh(eps)", "x*sinh(eps) + t*cosh(eps)", "u"],
    ["-u*sin(eps) + x*cos(eps)", "t", "x*sin(eps) + u*cos(eps)"],
    ["x", "t*cosh(eps) + u*sinh(eps)", "t*sinh(eps) + u*cosh(eps)"],
    ["x*exp(eps)", "t*exp(eps)", "u*exp(eps)"],
];

/// The flows of the seven Born-Infeld generators, in generator order.
pub fn born_infeld_actions() -> Vec<GroupAction> {
    ACTIONS
        .iter()
        .enumerate()
        .map(|(i, [a, b, c])| GroupAction::parse(i + 1, a, b, c).expect("static action"))
        .collect()
}

fn eps_expr(value: f64) -> Expr {
    // decimal text keeps 0.2 as 1/5 rather than its binary expansion
    parse(&format!("{value}")).unwrap_or_else(|_| Expr::rational(crate::expr::Rational::from_float(value).unwrap()))
}

impl GroupAction {
    pub fn parse(index: usize, xs: &str, ts: &str, us: &str) -> Result<GroupAction, crate::expr::ParseError> {
        Ok(GroupAction {
            index,
            x: parse(xs)?,
            t: parse(ts)?,
            u: parse(us)?,
        })
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.x, &self.t, &self.u]
    }

    /// Components with `eps` replaced.
    pub fn at(&self, value: &Expr) -> [Expr; 3] {
        self.components().map(|c| c.subs(&eps(), value))
    }

    pub fn at_f64(&self, value: f64) -> [Expr; 3] {
        self.at(&eps_expr(value))
    }

    pub fn apply_numeric(&self, value: f64, p: [f64; 3], params: &ParamValues) -> Result<[f64; 3], ExprError> {
        let mut env: NumericEnv = params.iter().map(|(k, v)| (k.clone(), *v)).collect();
        env.insert("x".into(), p[0]);
        env.insert("t".into(), p[1]);
        env.insert("u".into(), p[2]);
        env.insert("eps".into(), value);
        Ok([self.x.eval(&env)?, self.t.eval(&env)?, self.u.eval(&env)?])
    }

    pub fn is_identity_at_zero(&self) -> bool {
        let [a, b, c] = self.at(&Expr::zero());
        (a - Expr::sym(&x())).is_zero() && (b - Expr::sym(&t())).is_zero() && (c - Expr::sym(&u())).is_zero()
    }

    /// `action(ε₁) ∘ action(ε₂) − action(ε₁ + ε₂)`, after the addition-formula pass.
    pub fn group_law_defect(&self) -> [Expr; 3] {
        let (e1, e2) = (Symbol::parameter("eps1"), Symbol::parameter("eps2"));
        let inner = self.at(&Expr::sym(&e2));
        let bind: BTreeMap<Symbol, Expr> = [x(), t(), u()].into_iter().zip(inner).collect();
        let total = self.at(&(Expr::sym(&e1) + Expr::sym(&e2)));
        let outer = self.at(&Expr::sym(&e1));
        let mut out = [Expr::zero(), Expr::zero(), Expr::zero()];
        for k in 0..3 {
            let composed = outer[k].substitute_parallel(&bind).expect("finite substitution");
            out[k] = (composed - total[k].clone()).expand_addition_formulas();
        }
        out
    }

    pub fn group_law_holds(&self) -> bool {
        self.group_law_defect().iter().all(Expr::is_zero)
    }
}

/// `d/dε|₀ action − (ξ₁, ξ₂, η)`.
pub fn infinitesimal_check(action: &GroupAction, v: &VectorField) -> [Expr; 3] {
    let e = eps();
    let comps = action.components();
    let target = [&v.xi1, &v.xi2, &v.eta];
    let mut out = [Expr::zero(), Expr::zero(), Expr::zero()];
    for k in 0..3 {
        let d = comps[k].differentiate(&e).subs(&e, &Expr::zero());
        out[k] = (d - target[k].clone()).normalize();
    }
    out
}

/// Graph relation of the transported solution. A point lies on the image of
/// `G(−ε)`'s preimage relation iff `relation(G(−ε)(x, t, u)) = 0`.
pub fn transform_solution_symbolic(action: &GroupAction, value: &Expr, form: &CandidateForm) -> CandidateForm {
    let back = action.at(&(-value.clone()));
    let rel = match form {
        CandidateForm::Explicit(f) => {
            let bind: BTreeMap<Symbol, Expr> = [(x(), back[0].clone()), (t(), back[1].clone())].into_iter().collect();
            (back[2].clone() - f.substitute_parallel(&bind).expect("finite substitution")).normalize()
        }
        CandidateForm::Implicit(g) => {
            let bind: BTreeMap<Symbol, Expr> = [x(), t(), u()].into_iter().zip(back).collect();
            g.substitute_parallel(&bind).expect("finite substitution")
        }
    };
    match rel.affine_in(&u()) {
        Some((a, b)) if !a.is_zero() && !a.contains_symbol(&u()) => CandidateForm::Explicit((-b / a).normalize()),
        _ => CandidateForm::Implicit(rel),
    }
}

/// Explicit when the transported relation is affine in `u`, implicit otherwise.
pub fn transform_solution(action: &GroupAction, value: f64, s: &SolutionCandidate) -> SolutionCandidate {
    if value == 0.0 {
        return s.clone();
    }
    let form = transform_solution_symbolic(action, &eps_expr(value), &s.form);
    SolutionCandidate {
        form,
        params: s.params.clone(),
        provenance: format!("G{}({value}) of {}", action.index, if s.provenance.is_empty() { "candidate" } else { &s.provenance }),
        domain: s.domain,
        origin: Some(Box::new(Transport {
            source: s.clone(),
            action: action.clone(),
            eps: value,
        })),
    }
}

/// A closed form `u = prefactor · f(x_arg, t_arg) + offset` for the image of
/// a solution `u = f(x, t)`; `u` may occur on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct PrintedTransform {
    pub index: usize,
    pub prefactor: Expr,
    pub x_arg: Expr,
    pub t_arg: Expr,
    pub offset: Expr,
}

impl PrintedTransform {
    pub fn parse(index: usize, prefactor: &str, x_arg: &str, t_arg: &str, offset: &str) -> Result<Self, crate::expr::ParseError> {
        Ok(PrintedTransform {
            index,
            prefactor: parse(prefactor)?,
            x_arg: parse(x_arg)?,
            t_arg: parse(t_arg)?,
            offset: parse(offset)?,
        })
    }

    pub fn instantiate(&self, f: &Expr, value: &Expr) -> CandidateForm {
        let e = eps();
        let bind: BTreeMap<Symbol, Expr> =
            [(x(), self.x_arg.subs(&e, value)), (t(), self.t_arg.subs(&e, value))].into_iter().collect();
        let rhs = (self.prefactor.subs(&e, value) * f.substitute_parallel(&bind).expect("finite substitution") + self.offset.subs(&e, value))
            .normalize();
        if rhs.contains_symbol(&u()) {
            CandidateForm::Implicit((Expr::sym(&u()) - rhs).normalize())
        } else {
            CandidateForm::Explicit(rhs)
        }
    }
}

/// Largest violation of `form` on the image under `action(ε)` of the graph
/// of `f` over `points`. Zero iff `form` describes the transported graph.
pub fn graph_relation_defect(
    action: &GroupAction,
    value: f64,
    f: &Expr,
    form: &CandidateForm,
    points: &[(f64, f64)],
) -> Result<f64, ExprError> {
    let mut worst = 0.0f64;
    let empty = ParamValues::new();
    for &(px, pt) in points {
        let env: NumericEnv = [("x".to_string(), px), ("t".to_string(), pt)].into_iter().collect();
        let pu = f.eval(&env)?;
        let [qx, qt, qu] = action.apply_numeric(value, [px, pt, pu], &empty)?;
        let env: NumericEnv = [("x".to_string(), qx), ("t".to_string(), qt), ("u".to_string(), qu)].into_iter().collect();
        let d = match form {
            CandidateForm::Explicit(g) => qu - g.eval(&env)?,
            CandidateForm::Implicit(g) => g.eval(&env)?,
        };
        worst = worst.max(d.abs());
    }
    Ok(worst)
}
