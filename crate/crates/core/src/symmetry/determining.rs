use std::collections::{BTreeMap, BTreeSet};

use crate::expr::{Expr, Monomial, Symbol, SymbolKind};
use crate::jet::{restrict_to_solutions, JetError, Pde};

use super::{apply_prolonged, prolong, VectorField};

/// `Σ coeff · unknown = 0` with unknowns drawn from `xi1, xi2, eta` and their partials.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEquation {
    pub terms: Vec<(Symbol, Expr)>,
}

impl LinearEquation {
    pub fn to_expr(&self) -> Expr {
        crate::expr::sum(self.terms.iter().map(|(s, c)| c.clone() * Expr::sym(s)))
    }

    /// Splits a linear homogeneous expression into its terms; `None` otherwise.
    pub fn from_expr(e: &Expr) -> Option<LinearEquation> {
        let unknowns: Vec<Symbol> = e
            .free_symbols()
            .into_iter()
            .filter(|s| matches!(s.kind(), SymbolKind::UnknownFunction { .. }))
            .collect();
        let coeffs = e.poly_coeffs(&unknowns).ok()?;
        let mut terms = Vec::new();
        for (m, c) in coeffs {
            if m.degree() != 1 {
                return None;
            }
            let i = m.0.iter().position(|k| *k == 1).expect("degree one");
            terms.push((unknowns[i].clone(), c));
        }
        Some(LinearEquation { terms })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminingSystem {
    pub unknowns: Vec<Symbol>,
    /// One equation per jet monomial of the cleared invariance condition.
    pub raw: Vec<LinearEquation>,
    /// Jet monomial each raw equation was read off from.
    pub source_monomials: Vec<String>,
    /// Row-reduced equations: a basis of the span of `raw`.
    pub reduced: Vec<LinearEquation>,
    pub clearing_power: u32,
}

impl DeterminingSystem {
    /// System given directly by a list of linear equations (no PDE behind it).
    pub fn from_equations(eqs: &[Expr]) -> Option<DeterminingSystem> {
        let raw: Vec<LinearEquation> = eqs.iter().map(LinearEquation::from_expr).collect::<Option<_>>()?;
        let reduced = row_reduce(&raw);
        Some(DeterminingSystem {
            unknowns: VectorField::unknown()
                .components()
                .iter()
                .map(|e| e.as_symbol().cloned().expect("unknown"))
                .collect(),
            source_monomials: vec![String::new(); raw.len()],
            raw,
            reduced,
            clearing_power: 0,
        })
    }

    pub fn equations(&self) -> Vec<Expr> {
        self.reduced.iter().map(LinearEquation::to_expr).collect()
    }
}

/// Applies the prolonged generic field, restricts to solutions, clears the
/// denominator and splits by monomials in the free jets.
pub fn determining_system(pde: &Pde) -> Result<DeterminingSystem, JetError> {
    let v = VectorField::unknown();
    let pr = prolong(&v, pde.order);
    let restricted = restrict_to_solutions(&apply_prolonged(&pr, pde), pde)?;
    // parametric jets left after eliminating the principal derivative
    let free_jets: Vec<Symbol> = restricted
        .expr
        .free_symbols()
        .into_iter()
        .filter(|s| matches!(s.kind(), SymbolKind::Jet { .. }))
        .collect();
    let coeffs = restricted.expr.poly_coeffs(&free_jets)?;
    let mut raw = Vec::new();
    let mut sources = Vec::new();
    for (m, c) in coeffs {
        let eq = LinearEquation::from_expr(&c).ok_or_else(|| {
            JetError::Expr(crate::expr::ExprError::NotPolynomial {
                vars: "xi1,xi2,eta".into(),
                expr: c.to_string(),
            })
        })?;
        raw.push(eq);
        sources.push(monomial_name(&m, &free_jets));
    }
    let reduced = row_reduce(&raw);
    Ok(DeterminingSystem {
        unknowns: v.components().iter().map(|e| e.as_symbol().cloned().expect("unknown")).collect(),
        raw,
        source_monomials: sources,
        reduced,
        clearing_power: restricted.clearing_power,
    })
}

fn monomial_name(m: &Monomial, vars: &[Symbol]) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(&m.0)
        .filter(|(_, k)| **k > 0)
        .map(|(v, k)| if *k == 1 { v.name().to_string() } else { format!("{}^{k}", v.name()) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Gauss–Jordan over the field of expressions, pivoting on the highest
/// derivatives first.
fn row_reduce(eqs: &[LinearEquation]) -> Vec<LinearEquation> {
    let cols: Vec<Symbol> = {
        let set: BTreeSet<Symbol> = eqs.iter().flat_map(|e| e.terms.iter().map(|(s, _)| s.clone())).collect();
        let mut v: Vec<Symbol> = set.into_iter().collect();
        v.sort_by_key(|s| std::cmp::Reverse(unknown_order(s)));
        v
    };
    let mut rows: Vec<Vec<Expr>> = eqs
        .iter()
        .map(|e| {
            let m: BTreeMap<&Symbol, &Expr> = e.terms.iter().map(|(s, c)| (s, c)).collect();
            cols.iter().map(|c| m.get(c).map(|e| (*e).clone()).unwrap_or_else(Expr::zero)).collect()
        })
        .collect();
    let mut r = 0;
    for c in 0..cols.len() {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = (Expr::one() / rows[r][c].clone()).normalize();
        for j in 0..cols.len() {
            rows[r][j] = (rows[r][j].clone() * inv.clone()).normalize();
        }
        for i in 0..rows.len() {
            if i == r || rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c].clone();
            for j in 0..cols.len() {
                if !rows[r][j].is_zero() {
                    rows[i][j] = (rows[i][j].clone() - f.clone() * rows[r][j].clone()).normalize();
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows.into_iter()
        .map(|row| LinearEquation {
            terms: cols
                .iter()
                .zip(row)
                .filter(|(_, c)| !c.is_zero())
                .map(|(s, c)| (s.clone(), c))
                .collect(),
        })
        .collect()
}

fn unknown_order(s: &Symbol) -> (usize, Symbol) {
    match s.kind() {
        SymbolKind::UnknownFunction { derivs, .. } => (derivs.order(), s.clone()),
        _ => (0, s.clone()),
    }
}

/// Base name and derivative variables of an unknown-function symbol.
pub(super) fn unknown_parts(s: &Symbol) -> Option<(&str, Vec<String>)> {
    match s.kind() {
        SymbolKind::UnknownFunction { base, derivs, .. } => {
            Some((base.as_ref(), derivs.vars().map(str::to_string).collect()))
        }
        _ => None,
    }
}
