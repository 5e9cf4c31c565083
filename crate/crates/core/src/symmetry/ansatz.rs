use std::collections::BTreeMap;

use num_traits::Zero;

use crate::expr::{Expr, Monomial, Rational, Symbol};
use crate::jet;
use crate::linalg::{span_basis, QMatrix, QVector};

use super::determining::unknown_parts;
use super::{DeterminingSystem, VectorField};

const FUNCTIONS: [&str; 3] = ["xi1", "xi2", "eta"];

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSolveResult {
    pub degree: u32,
    pub dimension: usize,
    /// Canonical basis: RREF rows of `raw_nullspace`, as vector fields.
    pub basis: Vec<VectorField>,
    pub raw_nullspace: QMatrix,
    /// Column labels `(function, monomial)` for the coefficient coordinates.
    pub columns: Vec<(String, Expr)>,
}

fn xtu() -> [Symbol; 3] {
    [jet::x(), jet::t(), jet::u()]
}

/// Monomials in `x, t, u` of total degree at most `degree`, ascending degree,
/// then lexicographically with `x` highest.
pub fn ansatz_monomials(degree: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=degree {
        for a in (0..=d).rev() {
            for b in (0..=d - a).rev() {
                out.push(Monomial(vec![a, b, d - a - b]));
            }
        }
    }
    out
}

fn derivative_of_monomial(m: &Monomial, vars: &[String]) -> Expr {
    let e = m.to_expr(&xtu());
    vars.iter()
        .fold(e, |acc, v| {
            let s = if v == "u" { jet::u() } else { Symbol::independent(v) };
            acc.differentiate(&s)
        })
}

/// Exact polynomial solutions of total degree at most `degree`.
pub fn solve_ansatz(ds: &DeterminingSystem, degree: u32) -> AnsatzSolveResult {
    let monos = ansatz_monomials(degree);
    let vars = xtu();
    let ncols = FUNCTIONS.len() * monos.len();
    let mut rows: BTreeMap<(usize, Monomial), Vec<Rational>> = BTreeMap::new();
    let mut columns = Vec::with_capacity(ncols);
    for (fi, f) in FUNCTIONS.iter().enumerate() {
        for (mi, m) in monos.iter().enumerate() {
            let col = fi * monos.len() + mi;
            columns.push((f.to_string(), m.to_expr(&vars)));
            for (ei, eq) in ds.reduced.iter().enumerate() {
                let value = crate::expr::sum(eq.terms.iter().filter_map(|(s, c)| {
                    let (base, idx) = unknown_parts(s)?;
                    (base == *f).then(|| c.clone() * derivative_of_monomial(m, &idx))
                }));
                if value.is_zero() {
                    continue;
                }
                let coeffs = value
                    .poly_coeffs(&vars)
                    .expect("determining equations are polynomial in x, t, u");
                for (k, c) in coeffs {
                    let r = c.as_rational().expect("rational coefficient after splitting");
                    rows.entry((ei, k)).or_insert_with(|| vec![Rational::default(); ncols])[col] = r;
                }
            }
        }
    }
    let rows: Vec<QVector> = rows.into_values().collect();
    let mat = QMatrix::from_rows(&rows, ncols);
    let ns = mat.nullspace();
    let raw = span_basis(&ns, ncols);
    let basis = raw.row_vecs().iter().map(|r| vector_field_from_coords(r, &monos)).collect();
    AnsatzSolveResult {
        degree,
        dimension: raw.nrows(),
        basis,
        raw_nullspace: raw,
        columns,
    }
}

fn vector_field_from_coords(r: &[Rational], monos: &[Monomial]) -> VectorField {
    let vars = xtu();
    let n = monos.len();
    let comp = |k: usize| {
        crate::expr::sum(
            monos
                .iter()
                .enumerate()
                .filter(|(i, _)| !r[k * n + i].is_zero())
                .map(|(i, m)| Expr::rational(r[k * n + i].clone()) * m.to_expr(&vars)),
        )
    };
    VectorField::new(comp(0), comp(1), comp(2))
}

/// Coordinates of a polynomial field against `(function, monomial)` columns;
/// `None` if a component is not a rational polynomial in those monomials.
pub fn field_coordinates(v: &VectorField, monos: &[Monomial]) -> Option<QVector> {
    let vars = xtu();
    let mut out = vec![Rational::default(); 3 * monos.len()];
    for (k, c) in v.components().iter().enumerate() {
        for (m, coeff) in c.poly_coeffs(&vars).ok()? {
            let i = monos.iter().position(|x| *x == m)?;
            out[k * monos.len() + i] = coeff.as_rational()?;
        }
    }
    Some(out)
}

fn max_degree(fields: &[VectorField]) -> Option<u32> {
    let vars = xtu();
    let mut d = 0;
    for v in fields {
        for c in v.components() {
            for m in c.poly_coeffs(&vars).ok()?.keys() {
                d = d.max(m.degree());
            }
        }
    }
    Some(d)
}

/// Exact span equality of two lists of polynomial vector fields.
pub fn span_equal(a: &[VectorField], b: &[VectorField]) -> bool {
    let (Some(da), Some(db)) = (max_degree(a), max_degree(b)) else {
        return false;
    };
    let monos = ansatz_monomials(da.max(db));
    let coords = |fs: &[VectorField]| -> Option<QMatrix> {
        let rows: Vec<QVector> = fs.iter().map(|v| field_coordinates(v, &monos)).collect::<Option<_>>()?;
        Some(span_basis(&rows, 3 * monos.len()))
    };
    match (coords(a), coords(b)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}
