//! Point-symmetry generators, their prolongations and the determining system.

mod ansatz;
mod determining;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::{parse, Expr, MultiIndex, ParseError, Symbol};
use crate::jet::{self, restrict_to_solutions, total_derivative, total_derivative_multi, JetError, Pde};

pub use ansatz::{ansatz_monomials, field_coordinates, solve_ansatz, span_equal, AnsatzSolveResult};
pub use determining::{determining_system, DeterminingSystem, LinearEquation};

/// `ξ₁ ∂x + ξ₂ ∂t + η ∂u` with coefficients in `x, t, u`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VectorField {
    pub xi1: Expr,
    pub xi2: Expr,
    pub eta: Expr,
}

/// String form used by fixtures and JSON output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorFieldSpec {
    pub xi1: String,
    pub xi2: String,
    pub eta: String,
}

impl VectorField {
    pub fn new(xi1: Expr, xi2: Expr, eta: Expr) -> Self {
        VectorField {
            xi1: xi1.normalize(),
            xi2: xi2.normalize(),
            eta: eta.normalize(),
        }
    }

    pub fn parse(xi1: &str, xi2: &str, eta: &str) -> Result<Self, ParseError> {
        Ok(VectorField::new(parse(xi1)?, parse(xi2)?, parse(eta)?))
    }

    pub fn from_spec(s: &VectorFieldSpec) -> Result<Self, ParseError> {
        Self::parse(&s.xi1, &s.xi2, &s.eta)
    }

    pub fn to_spec(&self) -> VectorFieldSpec {
        VectorFieldSpec {
            xi1: self.xi1.to_string(),
            xi2: self.xi2.to_string(),
            eta: self.eta.to_string(),
        }
    }

    pub fn zero() -> Self {
        VectorField::new(Expr::zero(), Expr::zero(), Expr::zero())
    }

    /// Generic field whose components are the unknown functions `xi1, xi2, eta`.
    pub fn unknown() -> Self {
        let args = ["x", "t", "u"];
        VectorField {
            xi1: Expr::sym(&Symbol::unknown_function("xi1", args)),
            xi2: Expr::sym(&Symbol::unknown_function("xi2", args)),
            eta: Expr::sym(&Symbol::unknown_function("eta", args)),
        }
    }

    pub fn components(&self) -> [&Expr; 3] {
        [&self.xi1, &self.xi2, &self.eta]
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField::new(
            self.xi1.clone() + o.xi1.clone(),
            self.xi2.clone() + o.xi2.clone(),
            self.eta.clone() + o.eta.clone(),
        )
    }

    pub fn scale(&self, k: &Expr) -> VectorField {
        VectorField::new(
            k.clone() * self.xi1.clone(),
            k.clone() * self.xi2.clone(),
            k.clone() * self.eta.clone(),
        )
    }

    /// The field as a derivation on functions of `x, t, u`.
    pub fn apply(&self, f: &Expr) -> Expr {
        (self.xi1.clone() * f.differentiate(&jet::x())
            + self.xi2.clone() * f.differentiate(&jet::t())
            + self.eta.clone() * f.differentiate(&jet::u()))
        .normalize()
    }

    /// `[v, w]^a = v(w^a) − w(v^a)`.
    pub fn bracket(&self, w: &VectorField) -> VectorField {
        VectorField::new(
            self.apply(&w.xi1) - w.apply(&self.xi1),
            self.apply(&w.xi2) - w.apply(&self.xi2),
            self.apply(&w.eta) - w.apply(&self.eta),
        )
    }

    /// `Q = η − ξ₁u_x − ξ₂u_t`.
    pub fn characteristic(&self) -> Expr {
        (self.eta.clone()
            - self.xi1.clone() * Expr::sym(&jet::jet("x"))
            - self.xi2.clone() * Expr::sym(&jet::jet("t")))
        .normalize()
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (c, d) in [(&self.xi1, "∂x"), (&self.xi2, "∂t"), (&self.eta, "∂u")] {
            if c.is_zero() {
                continue;
            }
            if c.equiv(&Expr::one()) {
                parts.push(d.to_string());
            } else if matches!(c, Expr::Sum(_)) {
                parts.push(format!("({c}){d}"));
            } else {
                parts.push(format!("{c}{d}"));
            }
        }
        if parts.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&parts.join(" + ").replace("+ -", "- "))
    }
}

pub fn characteristic(v: &VectorField) -> Expr {
    v.characteristic()
}

/// A vector field together with its prolongation coefficients `φ^J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProlongedField {
    pub base: VectorField,
    pub order: usize,
    pub coeffs: BTreeMap<Symbol, Expr>,
}

fn indices(order: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut layer = vec![MultiIndex::empty()];
    for _ in 0..order {
        let mut next: Vec<MultiIndex> = Vec::new();
        for idx in &layer {
            for v in ["x", "t"] {
                let w = idx.with(v);
                if !next.contains(&w) {
                    next.push(w);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Prolongation through the characteristic: `φ^J = D_J Q + Σᵢ ξᵢ u_{J,i}`.
pub fn prolong(v: &VectorField, order: usize) -> ProlongedField {
    let q = v.characteristic();
    let coeffs = indices(order)
        .into_iter()
        .map(|j| {
            let sym = Symbol::jet_from_index("u", j.clone());
            let phi = total_derivative_multi(&q, &j)
                + v.xi1.clone() * Expr::sym(&Symbol::jet_from_index("u", j.with("x")))
                + v.xi2.clone() * Expr::sym(&Symbol::jet_from_index("u", j.with("t")));
            (sym, phi.normalize())
        })
        .collect();
    ProlongedField {
        base: v.clone(),
        order,
        coeffs,
    }
}

/// Prolongation by the recursion `φ^{J,i} = D_i φ^J − Σ_k u_{J,k} D_i ξ_k`,
/// starting from `φ = η`. Independent of [`prolong`] and used to cross-check it.
pub fn prolong_recursive(v: &VectorField, order: usize) -> ProlongedField {
    let dxi: BTreeMap<&str, [Expr; 2]> = ["x", "t"]
        .into_iter()
        .map(|i| {
            let s = Symbol::independent(i);
            (i, [total_derivative(&v.xi1, &s), total_derivative(&v.xi2, &s)])
        })
        .collect();
    let mut coeffs: BTreeMap<Symbol, Expr> = BTreeMap::new();
    let mut prev: Vec<(MultiIndex, Expr)> = vec![(MultiIndex::empty(), v.eta.clone())];
    for _ in 0..order {
        let mut next: Vec<(MultiIndex, Expr)> = Vec::new();
        for (j, phi) in &prev {
            for i in ["x", "t"] {
                let ji = j.with(i);
                if next.iter().any(|(k, _)| *k == ji) {
                    continue;
                }
                let [d1, d2] = &dxi[i];
                let val = total_derivative(phi, &Symbol::independent(i))
                    - Expr::sym(&Symbol::jet_from_index("u", j.with("x"))) * d1.clone()
                    - Expr::sym(&Symbol::jet_from_index("u", j.with("t"))) * d2.clone();
                next.push((ji, val.normalize()));
            }
        }
        for (j, phi) in &next {
            coeffs.insert(Symbol::jet_from_index("u", j.clone()), phi.clone());
        }
        prev = next;
    }
    ProlongedField {
        base: v.clone(),
        order,
        coeffs,
    }
}

/// `pr v(Δ)` before restriction to solutions.
pub fn apply_prolonged(pr: &ProlongedField, pde: &Pde) -> Expr {
    let d = &pde.lhs;
    let mut terms = vec![
        pr.base.xi1.clone() * d.differentiate(&jet::x()),
        pr.base.xi2.clone() * d.differentiate(&jet::t()),
        pr.base.eta.clone() * d.differentiate(&jet::u()),
    ];
    for (s, phi) in &pr.coeffs {
        let ds = d.differentiate(s);
        if !ds.is_zero() {
            terms.push(phi.clone() * ds);
        }
    }
    crate::expr::sum(terms)
}

/// Outcome of [`verify_symmetry`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryCheck {
    pub exact_zero: bool,
    pub residual: Expr,
}

/// Infinitesimal invariance test on the solution manifold.
pub fn verify_symmetry(v: &VectorField, pde: &Pde) -> Result<SymmetryCheck, JetError> {
    let pr = prolong(v, pde.order);
    let r = restrict_to_solutions(&apply_prolonged(&pr, pde), pde)?;
    Ok(SymmetryCheck {
        exact_zero: r.expr.is_zero(),
        residual: r.expr,
    })
}

/// The seven generators of the Born-Infeld symmetry algebra in the usual order.
pub fn born_infeld_generators() -> Vec<VectorField> {
    [
        ("1", "0", "0"),
        ("0", "1", "0"),
        ("0", "0", "1"),
        ("t", "x", "0"),
        ("-u", "0", "x"),
        ("0", "u", "t"),
        ("x", "t", "u"),
    ]
    .iter()
    .map(|(a, b, c)| VectorField::parse(a, b, c).expect("generator parses"))
    .collect()
}

#[cfg(test)]
mod tests;
