//! Structure of finite-dimensional Lie algebras given by exact structure
//! constants: Killing form, derived and lower central series, radical, Levi
//! complement, quotients, centralizers and generated ideals.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::expr::Rational;
use crate::linalg::{dot, span_basis, QMatrix, QVector};
use crate::symmetry::{ansatz_monomials, field_coordinates, VectorField};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("[{i}, {j}] = {bracket} is not in the span of the basis")]
    NotClosed { i: usize, j: usize, bracket: String },
    #[error("basis element {0} is not a polynomial vector field")]
    NotPolynomial(usize),
    #[error("basis is linearly dependent")]
    Dependent,
    #[error("structure constants are not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("Jacobi identity fails at ({0}, {1}, {2})")]
    Jacobi(usize, usize, usize),
    #[error("subspace is not an ideal")]
    NotIdeal,
    #[error("no coordinate complement to the radical is a subalgebra")]
    NoCoordinateComplement,
    #[error("radical self-check failed: {0}")]
    SelfCheck(String),
}

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    pub labels: Vec<String>,
    c: Vec<Vec<QVector>>,
}

/// Subspace of an algebra given by RREF coordinate rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    pub basis: QMatrix,
}

impl Subspace {
    pub fn span(vectors: &[QVector], dim: usize) -> Subspace {
        Subspace {
            basis: span_basis(vectors, dim),
        }
    }

    /// Span of the given basis elements of a `dim`-dimensional algebra.
    pub fn coordinate(indices: &[usize], dim: usize) -> Subspace {
        let vs: Vec<QVector> = indices.iter().map(|&i| unit(dim, i)).collect();
        Subspace::span(&vs, dim)
    }

    pub fn zero(dim: usize) -> Subspace {
        Subspace::span(&[], dim)
    }

    pub fn whole(dim: usize) -> Subspace {
        Subspace::coordinate(&(0..dim).collect::<Vec<_>>(), dim)
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient(&self) -> usize {
        self.basis.ncols()
    }

    pub fn vectors(&self) -> Vec<QVector> {
        self.basis.row_vecs()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut rows = self.vectors();
        rows.push(v.to_vec());
        span_basis(&rows, self.ambient()).nrows() == self.dim()
    }

    pub fn contains_subspace(&self, o: &Subspace) -> bool {
        o.vectors().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Subspace) -> Subspace {
        let mut rows = self.vectors();
        rows.extend(o.vectors());
        Subspace::span(&rows, self.ambient())
    }

    pub fn intersection(&self, o: &Subspace) -> Subspace {
        // solve Σ a_i s_i = Σ b_j o_j
        let (a, b) = (self.vectors(), o.vectors());
        let n = self.ambient();
        if a.is_empty() || b.is_empty() {
            return Subspace::zero(n);
        }
        let mut m = QMatrix::zeros(n, a.len() + b.len());
        for k in 0..n {
            for (i, v) in a.iter().enumerate() {
                m[(k, i)] = v[k].clone();
            }
            for (j, v) in b.iter().enumerate() {
                m[(k, a.len() + j)] = -v[k].clone();
            }
        }
        let vs: Vec<QVector> = m.nullspace().iter().map(|coef| combine(&a, &coef[..a.len()])).collect();
        Subspace::span(&vs, n)
    }

    /// Indices `i` for which the subspace is exactly the span of those basis elements.
    pub fn coordinate_support(&self) -> Option<Vec<usize>> {
        let idx: Vec<usize> = (0..self.ambient())
            .filter(|&k| self.vectors().iter().any(|v| !v[k].is_zero()))
            .collect();
        (idx.len() == self.dim()).then_some(idx)
    }
}

pub fn unit(dim: usize, i: usize) -> QVector {
    let mut v = vec![Rational::zero(); dim];
    v[i] = Rational::one();
    v
}

fn combine(vs: &[QVector], coef: &[Rational]) -> QVector {
    let n = vs.first().map(Vec::len).unwrap_or(0);
    let mut out = vec![Rational::zero(); n];
    for (v, c) in vs.iter().zip(coef) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

impl LieAlgebra {
    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(labels: Vec<String>, c: Vec<Vec<QVector>>) -> Result<LieAlgebra, LieError> {
        let n = labels.len();
        assert!(c.len() == n && c.iter().all(|r| r.len() == n && r.iter().all(|v| v.len() == n)));
        for i in 0..n {
            for j in 0..n {
                if (0..n).any(|k| c[i][j][k] != -c[j][i][k].clone()) {
                    return Err(LieError::NotAntisymmetric(i, j));
                }
            }
        }
        let g = LieAlgebra { labels, c };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                    let s = add3(
                        &g.bracket(&ei, &g.bracket(&ej, &ek)),
                        &g.bracket(&ej, &g.bracket(&ek, &ei)),
                        &g.bracket(&ek, &g.bracket(&ei, &ej)),
                    );
                    if s.iter().any(|x| !x.is_zero()) {
                        return Err(LieError::Jacobi(i, j, k));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Builds from a sparse table of brackets `(i, j, coords)` with `i < j`.
    pub fn from_brackets(labels: Vec<String>, brackets: &[(usize, usize, QVector)]) -> Result<LieAlgebra, LieError> {
        let n = labels.len();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for (i, j, v) in brackets {
            c[*i][*j] = v.clone();
            c[*j][*i] = v.iter().map(|x| -x.clone()).collect();
        }
        LieAlgebra::new(labels, c)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> QVector {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for k in 0..n {
                    if !self.c[i][j][k].is_zero() {
                        out[k] += &xy * &self.c[i][j][k];
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad(X)` acting on coordinate columns.
    pub fn ad(&self, x: &[Rational]) -> QMatrix {
        let n = self.dim();
        let mut m = QMatrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket(x, &unit(n, j));
            for k in 0..n {
                m[(k, j)] = col[k].clone();
            }
        }
        m
    }

    pub fn killing(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.ad(x).mul(&self.ad(y)).trace()
    }

    pub fn killing_form(&self) -> QMatrix {
        let n = self.dim();
        let ads: Vec<QMatrix> = (0..n).map(|i| self.ad(&unit(n, i))).collect();
        let mut k = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = ads[i].mul(&ads[j]).trace();
                k[(i, j)] = v.clone();
                k[(j, i)] = v;
            }
        }
        k
    }

    /// `[A, B]` for subspaces.
    pub fn bracket_spaces(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut rows = Vec::new();
        for x in a.vectors() {
            for y in b.vectors() {
                rows.push(self.bracket(&x, &y));
            }
        }
        Subspace::span(&rows, self.dim())
    }

    pub fn whole(&self) -> Subspace {
        Subspace::whole(self.dim())
    }

    pub fn derived_algebra(&self) -> Subspace {
        self.bracket_spaces(&self.whole(), &self.whole())
    }

    /// `span{e_i, [e_i, e_j]}`, a variant that contains the basis itself.
    pub fn generators_and_brackets(&self) -> Subspace {
        self.whole().sum(&self.derived_algebra())
    }

    /// `g, [g,g], [[g,g],[g,g]], …` until the chain stabilizes.
    pub fn derived_series_of(&self, s: &Subspace) -> Vec<Subspace> {
        let mut out = vec![s.clone()];
        loop {
            let last = out.last().unwrap();
            let next = self.bracket_spaces(last, last);
            if next == *last {
                return out;
            }
            let done = next.dim() == 0;
            out.push(next);
            if done {
                return out;
            }
        }
    }

    pub fn derived_series(&self) -> Vec<Subspace> {
        self.derived_series_of(&self.whole())
    }

    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let g = self.whole();
        let mut out = vec![g.clone()];
        loop {
            let last = out.last().unwrap();
            let next = self.bracket_spaces(&g, last);
            if next == *last {
                return out;
            }
            let done = next.dim() == 0;
            out.push(next);
            if done {
                return out;
            }
        }
    }

    pub fn is_solvable_subspace(&self, s: &Subspace) -> bool {
        self.derived_series_of(s).last().map(|x| x.dim() == 0).unwrap_or(true)
    }

    pub fn is_solvable(&self) -> bool {
        self.is_solvable_subspace(&self.whole())
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().map(|x| x.dim() == 0).unwrap_or(true)
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> bool {
        s.contains_subspace(&self.bracket_spaces(s, s))
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        s.contains_subspace(&self.bracket_spaces(&self.whole(), s))
    }

    /// Radical as the Killing-orthogonal complement of `[g, g]`, self-checked.
    pub fn radical(&self) -> Result<Subspace, LieError> {
        let n = self.dim();
        let k = self.killing_form();
        let d = self.derived_algebra();
        let rows: Vec<QVector> = d.vectors().iter().map(|v| k.mul_vec(v)).collect();
        let r = if rows.is_empty() {
            self.whole()
        } else {
            Subspace::span(&QMatrix::from_rows(&rows, n).nullspace(), n)
        };
        if !self.is_ideal(&r) {
            return Err(LieError::SelfCheck("radical is not an ideal".into()));
        }
        if !self.is_solvable_subspace(&r) {
            return Err(LieError::SelfCheck("radical is not solvable".into()));
        }
        Ok(r)
    }

    pub fn is_semisimple(&self) -> bool {
        self.radical().map(|r| r.dim() == 0).unwrap_or(false)
    }

    /// Subalgebra complementary to `r`: coordinate subsets first (in
    /// lexicographic order), then the complement spanned by the non-pivot
    /// basis vectors of `r`.
    pub fn levi_complement(&self, r: &Subspace) -> Result<Subspace, LieError> {
        let n = self.dim();
        let m = n - r.dim();
        let ok = |s: &Subspace| s.dim() == m && s.intersection(r).dim() == 0 && self.is_subalgebra(s);
        for subset in combinations(n, m) {
            let s = Subspace::coordinate(&subset, n);
            if ok(&s) {
                return Ok(s);
            }
        }
        let (_, pivots) = r.basis.rref();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let s = Subspace::coordinate(&free, n);
        if ok(&s) {
            return Ok(s);
        }
        Err(LieError::NoCoordinateComplement)
    }

    /// `g / ideal` on coset representatives of the non-pivot basis vectors.
    pub fn quotient(&self, ideal: &Subspace) -> Result<LieAlgebra, LieError> {
        if !self.is_ideal(ideal) {
            return Err(LieError::NotIdeal);
        }
        let n = self.dim();
        let (_, pivots) = ideal.basis.rref();
        let reps: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let m = reps.len();
        // columns: representatives then ideal basis
        let mut cols: Vec<QVector> = reps.iter().map(|&i| unit(n, i)).collect();
        cols.extend(ideal.vectors());
        let basis = QMatrix::from_rows(&cols, n).transpose();
        let mut c = vec![vec![vec![Rational::zero(); m]; m]; m];
        for a in 0..m {
            for b in 0..m {
                let br = self.bracket(&unit(n, reps[a]), &unit(n, reps[b]));
                let coords = basis.solve(&br).expect("basis spans the algebra");
                c[a][b] = coords[..m].to_vec();
            }
        }
        let labels = (1..=m).map(|i| format!("w{i}")).collect();
        LieAlgebra::new(labels, c)
    }

    /// `{X : [X, s] = 0 for all s in S}`.
    pub fn centralizer(&self, s: &Subspace) -> Subspace {
        self.centralizer_within(s, &self.whole())
    }

    /// Centralizer of `s` intersected with `within`.
    pub fn centralizer_within(&self, s: &Subspace, within: &Subspace) -> Subspace {
        let n = self.dim();
        let w = within.vectors();
        if w.is_empty() {
            return Subspace::zero(n);
        }
        // rows: for each s_b and coordinate k, Σ_a α_a [w_a, s_b]_k = 0
        let mut rows = Vec::new();
        let images: Vec<Vec<QVector>> = s
            .vectors()
            .iter()
            .map(|sb| w.iter().map(|wa| self.bracket(wa, sb)).collect())
            .collect();
        for img in &images {
            for k in 0..n {
                rows.push(img.iter().map(|v| v[k].clone()).collect::<QVector>());
            }
        }
        if rows.is_empty() {
            return within.clone();
        }
        let ns = QMatrix::from_rows(&rows, w.len()).nullspace();
        let vs: Vec<QVector> = ns.iter().map(|a| combine(&w, a)).collect();
        Subspace::span(&vs, n)
    }

    /// Smallest ideal containing `s`: iterate `s ← s + [g, s]`.
    pub fn minimal_ideal_containing(&self, s: &Subspace) -> Subspace {
        let mut cur = s.clone();
        loop {
            let next = cur.sum(&self.bracket_spaces(&self.whole(), &cur));
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }

    /// Subalgebra spanned by `s` as an algebra in its own right, on the RREF basis.
    pub fn restrict(&self, s: &Subspace) -> Result<LieAlgebra, LieError> {
        if !self.is_subalgebra(s) {
            return Err(LieError::NotClosed {
                i: 0,
                j: 0,
                bracket: "subspace is not a subalgebra".into(),
            });
        }
        let vs = s.vectors();
        let m = vs.len();
        let basis = QMatrix::from_rows(&vs, self.dim()).transpose();
        let mut c = vec![vec![vec![Rational::zero(); m]; m]; m];
        for a in 0..m {
            for b in 0..m {
                c[a][b] = basis.solve(&self.bracket(&vs[a], &vs[b])).expect("closed");
            }
        }
        let labels = vs.iter().map(|v| self.format_element(v)).collect();
        LieAlgebra::new(labels, c)
    }

    /// Human-readable linear combination of basis labels.
    pub fn format_element(&self, v: &[Rational]) -> String {
        let mut s = String::new();
        for (k, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let label = &self.labels[k];
            let neg = x < &Rational::zero();
            let mag = if neg { -x.clone() } else { x.clone() };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mag.is_one() {
                s.push_str(label);
            } else {
                s.push_str(&format!("{mag}*{label}"));
            }
        }
        if s.is_empty() {
            "0".into()
        } else {
            s
        }
    }

    /// Entry `[i][j]` renders `[e_i, e_j]`.
    pub fn bracket_table(&self) -> Vec<Vec<String>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.format_element(&self.c[i][j])).collect())
            .collect()
    }
}

fn add3(a: &[Rational], b: &[Rational], c: &[Rational]) -> QVector {
    a.iter().zip(b).zip(c).map(|((x, y), z)| x + y + z).collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Exact structure constants of polynomial vector fields; fails if a
/// bracket leaves the span.
pub fn structure_constants(basis: &[VectorField], labels: &[String]) -> Result<LieAlgebra, LieError> {
    let n = basis.len();
    let mut brackets: Vec<Vec<VectorField>> = vec![Vec::with_capacity(n); n];
    for (i, row) in brackets.iter_mut().enumerate() {
        for w in basis {
            row.push(basis[i].bracket(w));
        }
    }
    let degree = basis
        .iter()
        .chain(brackets.iter().flatten())
        .flat_map(|v| v.components().into_iter().cloned().collect::<Vec<_>>())
        .map(|c| {
            c.poly_coeffs(&[crate::jet::x(), crate::jet::t(), crate::jet::u()])
                .ok()
                .map(|m| m.keys().map(|k| k.degree()).max().unwrap_or(0))
        })
        .try_fold(0u32, |acc, d| d.map(|d| acc.max(d)));
    let Some(degree) = degree else {
        let bad = basis
            .iter()
            .position(|v| field_coordinates(v, &ansatz_monomials(8)).is_none())
            .unwrap_or(0);
        return Err(LieError::NotPolynomial(bad));
    };
    let monos = ansatz_monomials(degree);
    let coords: Vec<QVector> = basis
        .iter()
        .enumerate()
        .map(|(i, v)| field_coordinates(v, &monos).ok_or(LieError::NotPolynomial(i)))
        .collect::<Result<_, _>>()?;
    let width = 3 * monos.len();
    let b = QMatrix::from_rows(&coords, width).transpose();
    if b.rank() != n {
        return Err(LieError::Dependent);
    }
    let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            let br = &brackets[i][j];
            let target = field_coordinates(br, &monos).ok_or(LieError::NotPolynomial(i))?;
            let sol = b.solve(&target).ok_or_else(|| LieError::NotClosed {
                i,
                j,
                bracket: br.to_string(),
            })?;
            c[i][j] = sol;
        }
    }
    LieAlgebra::new(labels.to_vec(), c)
}

pub fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

/// Serializable summary of the structure analysis.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub labels: Vec<String>,
    pub brackets: Vec<Vec<String>>,
    pub killing: Vec<Vec<String>>,
    pub derived_series: Vec<Vec<String>>,
    pub derived_algebra_with_generators: Vec<String>,
    pub lower_central_series: Vec<Vec<String>>,
    pub solvable: bool,
    pub nilpotent: bool,
    pub semisimple: bool,
    pub radical_basis: Vec<String>,
    pub levi_basis: Vec<String>,
    pub quotient_brackets: Vec<Vec<String>>,
    pub centralizers: Vec<(String, Vec<String>)>,
}

fn fmt_space(g: &LieAlgebra, s: &Subspace) -> Vec<String> {
    s.vectors().iter().map(|v| g.format_element(v)).collect()
}

pub fn structure_report(g: &LieAlgebra) -> Result<StructureReport, LieError> {
    let r = g.radical()?;
    let levi = g.levi_complement(&r)?;
    let q = g.quotient(&r)?;
    let k = g.killing_form();
    let n = g.dim();
    Ok(StructureReport {
        labels: g.labels.clone(),
        brackets: g.bracket_table(),
        killing: (0..n).map(|i| (0..n).map(|j| k[(i, j)].to_string()).collect()).collect(),
        derived_series: g.derived_series().iter().map(|s| fmt_space(g, s)).collect(),
        derived_algebra_with_generators: fmt_space(g, &g.generators_and_brackets()),
        lower_central_series: g.lower_central_series().iter().map(|s| fmt_space(g, s)).collect(),
        solvable: g.is_solvable(),
        nilpotent: g.is_nilpotent(),
        semisimple: r.dim() == 0,
        radical_basis: fmt_space(g, &r),
        levi_basis: fmt_space(g, &levi),
        quotient_brackets: q.bracket_table(),
        centralizers: vec![
            ("levi in g".into(), fmt_space(g, &g.centralizer(&levi))),
            ("radical in g".into(), fmt_space(g, &g.centralizer(&r))),
            ("radical in radical".into(), fmt_space(g, &g.centralizer_within(&r, &r))),
        ],
    })
}

/// Killing form restricted to `s` (Gram matrix on its RREF basis).
pub fn killing_on(g: &LieAlgebra, s: &Subspace) -> QMatrix {
    let vs = s.vectors();
    let k = g.killing_form();
    let m = vs.len();
    let mut out = QMatrix::zeros(m, m);
    for a in 0..m {
        let kv = k.mul_vec(&vs[a]);
        for b in 0..m {
            out[(a, b)] = dot(&kv, &vs[b]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;
    use crate::symmetry::born_infeld_generators;

    fn bi() -> LieAlgebra {
        structure_constants(&born_infeld_generators(), &default_labels(7)).unwrap()
    }

    fn coord(ix: &[usize]) -> Subspace {
        Subspace::coordinate(&ix.iter().map(|i| i - 1).collect::<Vec<_>>(), 7)
    }

    #[test]
    fn bracket_examples() {
        let g = born_infeld_generators();
        assert_eq!(g[3].bracket(&g[4]), g[5]);
        assert!(g[0].bracket(&g[0]).is_zero());
        assert_eq!(g[0].bracket(&g[3]), g[1]);
    }

    #[test]
    fn table_matches_hand_computation() {
        let t = bi().bracket_table();
        let expect = [
            ["0", "0", "0", "v2", "v3", "0", "v1"],
            ["0", "0", "0", "v1", "0", "v3", "v2"],
            ["0", "0", "0", "0", "-v1", "v2", "v3"],
            ["-v2", "-v1", "0", "0", "v6", "v5", "0"],
            ["-v3", "0", "v1", "-v6", "0", "v4", "0"],
            ["0", "-v3", "-v2", "-v5", "-v4", "0", "0"],
            ["-v1", "-v2", "-v3", "0", "0", "0", "0"],
        ];
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(t[i][j], expect[i][j], "[v{}, v{}]", i + 1, j + 1);
            }
        }
    }

    #[test]
    fn small_algebras() {
        let g = born_infeld_generators();
        let so = structure_constants(&g[3..6], &default_labels(3)).unwrap();
        assert_eq!(so.bracket_table()[0][1], "v3");
        assert_eq!(so.bracket_table()[0][2], "v2");
        assert_eq!(so.bracket_table()[1][2], "v1");
        let k = so.killing_form();
        assert_eq!(k, QMatrix::from_i64(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, 2]]));
        assert_eq!(so.radical().unwrap().dim(), 0);
        assert!(!so.is_solvable());
        assert_eq!(so.derived_algebra(), so.whole());
        let ab = structure_constants(&g[..3], &default_labels(3)).unwrap();
        assert!(ab.killing_form().is_zero());
        assert_eq!(ab.derived_series().len(), 2);
        assert_eq!(ab.radical().unwrap(), ab.whole());
        assert_eq!(ab.levi_complement(&ab.whole()).unwrap().dim(), 0);
        assert_eq!(so.levi_complement(&Subspace::zero(3)).unwrap(), so.whole());
    }

    #[test]
    fn not_closed_is_reported() {
        let g = born_infeld_generators();
        let err = structure_constants(&[g[0].clone(), g[3].clone()], &default_labels(2)).unwrap_err();
        assert!(matches!(err, LieError::NotClosed { i: 0, j: 1, .. }));
    }

    #[test]
    fn born_infeld_structure() {
        let g = bi();
        let r = g.radical().unwrap();
        assert_eq!(r, coord(&[1, 2, 3, 7]));
        assert_eq!(g.levi_complement(&r).unwrap(), coord(&[4, 5, 6]));
        assert_eq!(g.derived_algebra(), coord(&[1, 2, 3, 4, 5, 6]));
        assert_eq!(g.generators_and_brackets(), g.whole());
        let rs = g.derived_series_of(&r);
        assert_eq!(rs[1], coord(&[1, 2, 3]));
        assert_eq!(rs.last().unwrap().dim(), 0);
        assert_eq!(g.centralizer(&coord(&[4, 5, 6])), coord(&[7]));
        assert_eq!(g.centralizer(&r).dim(), 0);
        assert_eq!(g.centralizer_within(&r, &r).dim(), 0);
        assert_eq!(g.centralizer(&Subspace::zero(7)), g.whole());
        assert_eq!(g.minimal_ideal_containing(&coord(&[4, 5, 6])), coord(&[1, 2, 3, 4, 5, 6]));
        assert_eq!(g.minimal_ideal_containing(&coord(&[3])), coord(&[1, 2, 3]));
        assert_eq!(g.minimal_ideal_containing(&g.whole()), g.whole());
        let k = g.killing_form();
        assert_eq!(k[(3, 3)], rat(4, 1));
        assert_eq!(k[(6, 6)], rat(3, 1));
        assert!(k.rank() < 7);
    }

    #[test]
    fn quotients() {
        let g = bi();
        let r = g.radical().unwrap();
        let q = g.quotient(&r).unwrap();
        let t = q.bracket_table();
        assert_eq!((t[0][1].as_str(), t[0][2].as_str(), t[1][2].as_str()), ("w3", "w2", "w1"));
        assert!(q.is_semisimple());
        assert_eq!(g.quotient(&g.whole()).unwrap().dim(), 0);
        assert_eq!(g.quotient(&coord(&[1, 2, 3])).unwrap().dim(), 4);
        assert!(matches!(g.quotient(&coord(&[4])), Err(LieError::NotIdeal)));
    }

    #[test]
    fn killing_invariance_and_symmetry() {
        let g = bi();
        let k = g.killing_form();
        assert_eq!(k, k.transpose());
        for a in 0..7 {
            for b in 0..7 {
                for c in 0..7 {
                    let (x, y, z) = (unit(7, a), unit(7, b), unit(7, c));
                    assert_eq!(g.killing(&g.bracket(&x, &y), &z), g.killing(&x, &g.bracket(&y, &z)));
                }
            }
        }
    }

    #[test]
    fn radical_contains_solvable_coordinate_ideals() {
        let g = bi();
        let r = g.radical().unwrap();
        for k in 1..=7 {
            for s in combinations(7, k) {
                let sub = Subspace::coordinate(&s, 7);
                if g.is_ideal(&sub) && g.is_solvable_subspace(&sub) {
                    assert!(r.contains_subspace(&sub), "{s:?}");
                }
            }
        }
    }

    #[test]
    fn jacobi_violation_detected() {
        let l = default_labels(3);
        // [e1,e2]=e3, [e1,e3]=e1 breaks Jacobi
        let err = LieAlgebra::from_brackets(l, &[(0, 1, unit(3, 2)), (0, 2, unit(3, 0))]).unwrap_err();
        assert!(matches!(err, LieError::Jacobi(..)));
    }

    #[test]
    fn restrict_to_subalgebra() {
        let g = bi();
        let s = g.restrict(&coord(&[4, 5, 6])).unwrap();
        assert_eq!(s.labels, ["v4", "v5", "v6"]);
        assert_eq!(killing_on(&g, &coord(&[4, 5, 6]))[(0, 0)], rat(4, 1));
    }
}
