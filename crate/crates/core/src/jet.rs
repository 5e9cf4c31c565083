//! Jet-space bookkeeping: total derivatives, PDE records and elimination of
//! the principal derivative.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Expr, ExprError, MultiIndex, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("principal derivative {0} appears nonlinearly")]
    PrincipalNonlinear(String),
    #[error("coefficient {0} of the principal derivative is not certifiably nonvanishing")]
    NotCertified(String),
    #[error("principal derivative {principal} survives restriction in {expr}")]
    ResidualPrincipal { principal: String, expr: String },
    #[error("denominator could not be cleared from {0}")]
    Uncleared(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Why the principal coefficient never vanishes on real jet space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Nonzero rational constant.
    Constant,
    /// Positive constant plus nonnegative multiples of even monomials.
    PositiveSumOfSquares,
}

/// Scalar PDE `lhs = 0` in `x, t` with dependent `u`, solved for a principal jet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pde {
    pub lhs: Expr,
    pub independents: Vec<Symbol>,
    pub dependent: Symbol,
    pub order: usize,
    pub principal: Symbol,
    pub solved: Expr,
    /// Nonvanishing factor cleared after restriction.
    pub denominator: Expr,
    pub clearing_power: u32,
    pub certificate: Certificate,
}

/// On-disk form of a [`Pde`]; only `lhs` is required.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdeSpec {
    pub lhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub principal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solved: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub denominator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearing_power: Option<u32>,
}

/// Result of [`restrict_to_solutions`].
#[derive(Debug, Clone, PartialEq)]
pub struct Restricted {
    pub expr: Expr,
    /// Power of the PDE denominator multiplied in to make `expr` polynomial.
    pub clearing_power: u32,
}

pub fn x() -> Symbol {
    Symbol::independent("x")
}

pub fn t() -> Symbol {
    Symbol::independent("t")
}

pub fn u() -> Symbol {
    Symbol::dependent("u")
}

/// Jet coordinate `u_J` for a suffix such as `"xt"`; the empty suffix gives `u`.
pub fn jet(suffix: &str) -> Symbol {
    Symbol::jet("u", suffix.chars().map(|c| c.to_string()))
}

pub const BORN_INFELD: &str = "(1-u_t^2)*u_xx + 2*u_x*u_t*u_xt - (1+u_x^2)*u_tt";

/// `D_v e`: the partial in `v` plus the chain rule through `u` and every jet in `e`.
pub fn total_derivative(e: &Expr, v: &Symbol) -> Expr {
    // the u-partial also covers unknown functions of u
    let mut terms = vec![
        e.differentiate(v),
        Expr::sym(&jet(v.name())) * e.differentiate(&u()),
    ];
    for s in e.free_symbols() {
        if let SymbolKind::Jet { .. } = s.kind() {
            let raised = s.jet_raise(v.name()).expect("jet symbol");
            terms.push(Expr::sym(&raised) * e.differentiate(&s));
        }
    }
    crate::expr::sum(terms)
}

/// `D_J e` for a multi-index given as a suffix string, e.g. `"xt"`.
pub fn total_derivative_multi(e: &Expr, index: &MultiIndex) -> Expr {
    index
        .vars()
        .fold(e.clone(), |acc, v| total_derivative(&acc, &Symbol::independent(v)))
}

/// Sign-aware certificate check for `c`; returns the positive orientation.
fn certify(c: &Expr) -> Option<(Certificate, Expr)> {
    if let Some(r) = c.as_rational() {
        if r.is_zero() {
            return None;
        }
        return Some((Certificate::Constant, if r.is_negative() { -c.clone() } else { c.clone() }));
    }
    for cand in [c.clone(), (-c.clone()).normalize()] {
        if is_positive_sum_of_squares(&cand) {
            return Some((Certificate::PositiveSumOfSquares, cand));
        }
    }
    None
}

fn is_positive_sum_of_squares(e: &Expr) -> bool {
    let (_, den) = e.numer_denom();
    if !den.equiv(&Expr::one()) {
        return false;
    }
    let syms: Vec<Symbol> = e.free_symbols().into_iter().collect();
    let Ok(coeffs) = e.poly_coeffs(&syms) else {
        return false;
    };
    let mut has_constant = false;
    for (m, c) in &coeffs {
        let Some(r) = c.as_rational() else {
            return false;
        };
        if !r.is_positive() || m.0.iter().any(|k| k % 2 == 1) {
            return false;
        }
        has_constant |= m.degree() == 0;
    }
    has_constant
}

impl Pde {
    /// Builds a PDE from `lhs` and a principal jet, solving for it.
    pub fn new(lhs: Expr, principal: Symbol) -> Result<Pde, JetError> {
        let order = lhs
            .free_symbols()
            .iter()
            .filter_map(|s| s.jet_index().map(|i| i.order()))
            .max()
            .unwrap_or(0);
        let pde = Pde {
            lhs,
            independents: vec![x(), t()],
            dependent: u(),
            order,
            principal,
            solved: Expr::zero(),
            denominator: Expr::one(),
            clearing_power: 0,
            certificate: Certificate::Constant,
        };
        solve_principal(pde)
    }

    /// Principal defaults to the highest pure `t` derivative.
    pub fn with_default_principal(lhs: Expr) -> Result<Pde, JetError> {
        let order = lhs
            .free_symbols()
            .iter()
            .filter_map(|s| s.jet_index().map(|i| i.order()))
            .max()
            .unwrap_or(0);
        let principal = jet(&"t".repeat(order));
        Pde::new(lhs, principal)
    }

    pub fn born_infeld() -> Pde {
        Pde::new(parse(BORN_INFELD).expect("fixture parses"), jet("tt")).expect("fixture solves")
    }

    pub fn from_spec(spec: &PdeSpec) -> Result<Pde, JetError> {
        let p = |s: &str| parse(s).map_err(|e| JetError::Parse(e.to_string()));
        let lhs = p(&spec.lhs)?;
        let mut pde = match &spec.principal {
            Some(name) => {
                let sym = p(name)?
                    .as_symbol()
                    .cloned()
                    .filter(|s| s.jet_index().is_some())
                    .ok_or_else(|| JetError::Parse(format!("principal '{name}' is not a jet coordinate")))?;
                Pde::new(lhs, sym)?
            }
            None => Pde::with_default_principal(lhs)?,
        };
        if let Some(s) = &spec.solved {
            let declared = p(s)?;
            if !(declared.clone() - pde.solved.clone()).is_zero() {
                return Err(JetError::Parse(format!(
                    "declared solved form {declared} disagrees with {}",
                    pde.solved
                )));
            }
        }
        if let Some(d) = &spec.denominator {
            let declared = p(d)?;
            if (declared.clone() / pde.denominator.clone()).normalize().as_rational().is_none() {
                return Err(JetError::Parse(format!(
                    "declared denominator {declared} is not a constant multiple of {}",
                    pde.denominator
                )));
            }
        }
        if let Some(m) = spec.clearing_power {
            pde.clearing_power = m;
        }
        Ok(pde)
    }

    pub fn from_json(text: &str) -> Result<Pde, JetError> {
        let spec: PdeSpec = serde_json::from_str(text).map_err(|e| JetError::Parse(e.to_string()))?;
        Pde::from_spec(&spec)
    }

    pub fn to_spec(&self) -> PdeSpec {
        PdeSpec {
            lhs: self.lhs.to_string(),
            principal: Some(self.principal.name().to_string()),
            solved: Some(self.solved.to_string()),
            denominator: Some(self.denominator.to_string()),
            clearing_power: Some(self.clearing_power),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("serializable")
    }

    /// Jet coordinates up to `order`, lowest order first.
    pub fn jet_coordinates(&self, order: usize) -> Vec<Symbol> {
        let mut out = Vec::new();
        let mut layer = vec![MultiIndex::empty()];
        for _ in 0..order {
            let mut next: Vec<MultiIndex> = Vec::new();
            for idx in &layer {
                for v in &self.independents {
                    let w = idx.with(v.name());
                    if !next.contains(&w) {
                        next.push(w);
                    }
                }
            }
            next.sort();
            for idx in &next {
                out.push(Symbol::jet_from_index(self.dependent.name(), idx.clone()));
            }
            layer = next;
        }
        out
    }
}

/// Solves `lhs` for the principal jet, which must enter linearly with a
/// certifiably nonvanishing coefficient.
pub fn solve_principal(mut pde: Pde) -> Result<Pde, JetError> {
    let p = pde.principal.clone();
    let (a, b) = pde
        .lhs
        .affine_in(&p)
        .ok_or_else(|| JetError::PrincipalNonlinear(p.name().to_string()))?;
    if a.is_zero() || a.contains_symbol(&p) {
        return Err(JetError::PrincipalNonlinear(p.name().to_string()));
    }
    let (cert, positive) = certify(&a).ok_or_else(|| JetError::NotCertified(a.to_string()))?;
    pde.solved = (-b / a).normalize();
    pde.denominator = if cert == Certificate::Constant {
        Expr::one()
    } else {
        positive
    };
    pde.certificate = cert;
    Ok(pde)
}

/// Replaces the principal jet and its derivatives by the solved form, then
/// multiplies by the least power of the denominator that makes the result
/// polynomial in the jets.
pub fn restrict_to_solutions(e: &Expr, pde: &Pde) -> Result<Restricted, JetError> {
    let pidx = pde.principal.jet_index().expect("principal is a jet");
    let mut cur = e.clone();
    let mut cache: BTreeMap<Symbol, Expr> = BTreeMap::new();
    for _ in 0..8 {
        let targets: BTreeMap<Symbol, Expr> = cur
            .free_symbols()
            .into_iter()
            .filter_map(|s| {
                let idx = s.jet_index()?;
                let rest = idx.minus(&pidx)?;
                let v = cache
                    .entry(s.clone())
                    .or_insert_with(|| total_derivative_multi(&pde.solved, &rest))
                    .clone();
                Some((s, v))
            })
            .collect();
        if targets.is_empty() {
            break;
        }
        cur = cur.substitute(&targets)?;
    }
    if cur.contains_any(|s| s.jet_index().map(|i| i.contains(&pidx)).unwrap_or(false)) {
        return Err(JetError::ResidualPrincipal {
            principal: pde.principal.name().to_string(),
            expr: cur.to_string(),
        });
    }
    if cur.is_zero() || pde.denominator.as_rational().is_some() {
        return Ok(Restricted {
            expr: cur,
            clearing_power: 0,
        });
    }
    let dsyms = pde.denominator.free_symbols();
    for m in 0..=16u32 {
        let cleared = (cur.clone() * pde.denominator.clone().powi(m as i64)).normalize();
        let (_, den) = cleared.numer_denom();
        if !dsyms.iter().any(|s| den.contains_symbol(s)) {
            return Ok(Restricted {
                expr: cleared,
                clearing_power: m,
            });
        }
    }
    Err(JetError::Uncleared(cur.to_string()))
}
