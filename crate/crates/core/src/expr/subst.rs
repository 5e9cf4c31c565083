use std::collections::{BTreeMap, BTreeSet};

use super::poly::{Atom, Mono, Poly};
use super::ratfunc::RatFunc;
use super::{Expr, ExprError, Symbol};

/// Exponent vector aligned with the variable list passed to `poly_coeffs`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn to_expr(&self, vars: &[Symbol]) -> Expr {
        let factors: Vec<Expr> = vars
            .iter()
            .zip(&self.0)
            .filter(|(_, e)| **e > 0)
            .map(|(v, e)| Expr::sym(v).powi(*e as i64))
            .collect();
        match factors.len() {
            0 => Expr::one(),
            _ => Expr::Product(factors).normalize(),
        }
    }
}

pub(super) fn substitute(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
    check_acyclic(bindings)?;
    let replaced = replace(e, bindings);
    replaced.try_normalize()
}

/// One-pass replacement without the cycle check, for coordinate changes
/// such as `(x, t) ↦ (x cosh ε + t sinh ε, x sinh ε + t cosh ε)`.
pub(super) fn substitute_parallel(e: &Expr, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
    replace(e, bindings).try_normalize()
}

fn replace(e: &Expr, b: &BTreeMap<Symbol, Expr>) -> Expr {
    match e {
        Expr::Rational(_) => e.clone(),
        Expr::Symbol(s) => b.get(s).cloned().unwrap_or_else(|| e.clone()),
        Expr::Sum(v) => Expr::Sum(v.iter().map(|t| replace(t, b)).collect()),
        Expr::Product(v) => Expr::Product(v.iter().map(|t| replace(t, b)).collect()),
        Expr::Power(base, r) => Expr::Power(Box::new(replace(base, b)), r.clone()),
        Expr::Func(tag, a) => Expr::Func(*tag, Box::new(replace(a, b))),
    }
}

/// Rejects binding chains that return to their start through at least one
/// other bound symbol. A binding may mention its own symbol (`x ↦ x + ε`);
/// the substitution is simultaneous.
fn check_acyclic(bindings: &BTreeMap<Symbol, Expr>) -> Result<(), ExprError> {
    let deps: BTreeMap<&Symbol, BTreeSet<Symbol>> = bindings
        .iter()
        .map(|(s, e)| {
            let mut fs = e.free_symbols();
            fs.remove(s);
            fs.retain(|t| bindings.contains_key(t));
            (s, fs)
        })
        .collect();
    // depth-first search for a cycle
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    let mut marks: BTreeMap<&Symbol, Mark> = deps.keys().map(|s| (*s, Mark::New)).collect();
    fn visit<'a>(
        s: &'a Symbol,
        deps: &'a BTreeMap<&'a Symbol, BTreeSet<Symbol>>,
        marks: &mut BTreeMap<&'a Symbol, Mark>,
    ) -> Result<(), ExprError> {
        match marks[s] {
            Mark::Done => return Ok(()),
            Mark::Active => return Err(ExprError::CyclicBinding(s.name().to_string())),
            Mark::New => {}
        }
        marks.insert(s, Mark::Active);
        for t in &deps[s] {
            let key = deps.keys().find(|k| **k == t).copied().expect("bound");
            visit(key, deps, marks)?;
        }
        marks.insert(s, Mark::Done);
        Ok(())
    }
    let keys: Vec<&Symbol> = deps.keys().copied().collect();
    for s in keys {
        visit(s, &deps, &mut marks)?;
    }
    Ok(())
}

pub(super) fn poly_coeffs(e: &Expr, vars: &[Symbol]) -> Result<BTreeMap<Monomial, Expr>, ExprError> {
    let rf = e.ratfunc();
    let not_poly = || ExprError::NotPolynomial {
        vars: vars.iter().map(|v| v.name()).collect::<Vec<_>>().join(","),
        expr: e.to_string(),
    };
    if vars.iter().any(|v| rf.den.atoms().iter().any(|a| a.contains_symbol(v))) {
        return Err(not_poly());
    }
    let var_atoms: Vec<Atom> = vars.iter().map(|v| Atom::Sym(v.clone())).collect();
    let mut groups: BTreeMap<Monomial, Poly> = BTreeMap::new();
    for (m, c) in &rf.num.terms {
        let mut exps = vec![0u32; vars.len()];
        let mut rest = Mono::one();
        for (a, k) in &m.0 {
            if let Some(i) = var_atoms.iter().position(|v| v == a) {
                exps[i] = *k;
            } else {
                if vars.iter().any(|v| a.contains_symbol(v)) {
                    return Err(not_poly());
                }
                rest = rest.mul(&Mono::atom(a.clone(), *k));
            }
        }
        groups.entry(Monomial(exps)).or_default().add_term(rest, c.clone());
    }
    let mut out = BTreeMap::new();
    for (m, p) in groups {
        if p.is_zero() {
            continue;
        }
        let coeff = RatFunc {
            num: p,
            den: rf.den.clone(),
        }
        .to_expr();
        if !coeff.is_zero() {
            out.insert(m, coeff);
        }
    }
    Ok(out)
}
