//! Adjoint representation: `Ad(exp(ε e_i)) = exp(−ε ad e_i)`, its matrices,
//! Ad-invariant quantities and a heuristic orbit simplifier.

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::expr::{Expr, Rational, Symbol};
use crate::liealg::{unit, LieAlgebra};
use crate::linalg::{QMatrix, QVector};

pub type Mat = Vec<Vec<f64>>;

/// Matrix of `ad(X)` on coordinate columns.
pub fn ad_matrix(g: &LieAlgebra, x: &[Rational]) -> QMatrix {
    g.ad(x)
}

/// `ad(e_i)` is nilpotent iff its `dim`-th power vanishes.
pub fn is_nilpotent_generator(g: &LieAlgebra, i: usize) -> bool {
    g.ad(&unit(g.dim(), i)).pow(g.dim() as u32).is_zero()
}

fn ad_f64(g: &LieAlgebra, i: usize) -> Mat {
    g.ad(&unit(g.dim(), i)).to_f64()
}

fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for k in 0..b.len() {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn norm1(a: &Mat) -> f64 {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor core; the series
/// is cut once a term falls below `1e−17` relative, well under the `1e−12` budget.
pub fn expm(a: &Mat) -> Mat {
    let n = a.len();
    let nrm = norm1(a);
    let s = if nrm > 0.5 { (nrm / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(s);
    let a: Mat = a.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
    let mut out = identity(n);
    let mut term = identity(n);
    for k in 1..40 {
        term = matmul(&term, &a);
        let kf = k as f64;
        term.iter_mut().for_each(|r| r.iter_mut().for_each(|x| *x /= kf));
        let tn = norm1(&term);
        for i in 0..n {
            for j in 0..n {
                out[i][j] += term[i][j];
            }
        }
        if tn < 1e-17 {
            break;
        }
    }
    for _ in 0..s {
        out = matmul(&out, &out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjointMode {
    /// Finite series of a nilpotent `ad`.
    Exact,
    /// Scaling and squaring.
    Numeric,
}

/// Row `j` holds the coordinates of `Ad(exp(ε e_i)) e_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdjointMatrix {
    pub generator: usize,
    pub epsilon: f64,
    pub mode: AdjointMode,
    pub rows: Mat,
}

impl AdjointMatrix {
    /// Image of a coordinate row vector.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        (0..n).map(|k| (0..n).map(|j| y[j] * self.rows[j][k]).sum()).collect()
    }
}

/// `exp(−ε A)` as an exact polynomial in `ε` for nilpotent `A`.
fn nilpotent_series(a: &QMatrix) -> Option<Vec<QMatrix>> {
    let n = a.nrows();
    let mut powers = vec![QMatrix::identity(n)];
    for _ in 0..n {
        let next = powers.last().unwrap().mul(a);
        if next.is_zero() {
            return Some(powers);
        }
        powers.push(next);
    }
    None
}

fn factorial(k: usize) -> Rational {
    (1..=k).fold(Rational::one(), |acc, i| acc * Rational::from_integer(i.into()))
}

/// Row-convention matrix with entries polynomial in the symbol `eps`; `None`
/// unless `ad(e_i)` is nilpotent.
pub fn adjoint_matrix_symbolic(g: &LieAlgebra, i: usize) -> Option<Vec<Vec<Expr>>> {
    let n = g.dim();
    let series = nilpotent_series(&g.ad(&unit(n, i)))?;
    let eps = Expr::sym(&Symbol::parameter("eps"));
    let mut out = vec![vec![Expr::zero(); n]; n];
    for (k, ak) in series.iter().enumerate() {
        let c = Expr::rational(if k % 2 == 0 { factorial(k).recip() } else { -factorial(k).recip() });
        let ek = c * eps.clone().powi(k as i64);
        for (j, row) in out.iter_mut().enumerate() {
            for (m, cell) in row.iter_mut().enumerate() {
                // row j, column m = (exp(−εA))[m][j]
                if !ak[(m, j)].is_zero() {
                    *cell = cell.clone() + ek.clone() * Expr::rational(ak[(m, j)].clone());
                }
            }
        }
    }
    Some(out.into_iter().map(|r| r.into_iter().map(|e| e.normalize()).collect()).collect())
}

/// Exact image of `y` for nilpotent generators and rational `ε`.
pub fn adjoint_apply_exact(g: &LieAlgebra, i: usize, eps: &Rational, y: &[Rational]) -> Option<QVector> {
    let series = nilpotent_series(&g.ad(&unit(g.dim(), i)))?;
    let mut out = vec![Rational::zero(); g.dim()];
    let mut coef = Rational::one();
    for (k, ak) in series.iter().enumerate() {
        if k > 0 {
            coef = -coef * eps / Rational::from_integer((k as i64).into());
        }
        for (o, v) in out.iter_mut().zip(ak.mul_vec(y)) {
            *o += &coef * v;
        }
    }
    Some(out)
}

pub fn adjoint_matrix(g: &LieAlgebra, i: usize, eps: f64) -> AdjointMatrix {
    let n = g.dim();
    let a = g.ad(&unit(n, i));
    if let Some(series) = nilpotent_series(&a) {
        let mut e = vec![vec![0.0; n]; n];
        let mut coef = 1.0;
        for (k, ak) in series.iter().enumerate() {
            if k > 0 {
                coef *= -eps / k as f64;
            }
            let akf = ak.to_f64();
            for r in 0..n {
                for c in 0..n {
                    e[r][c] += coef * akf[r][c];
                }
            }
        }
        return AdjointMatrix {
            generator: i,
            epsilon: eps,
            mode: AdjointMode::Exact,
            rows: transpose(&e),
        };
    }
    let scaled: Mat = ad_f64(g, i).iter().map(|r| r.iter().map(|x| -eps * x).collect()).collect();
    AdjointMatrix {
        generator: i,
        epsilon: eps,
        mode: AdjointMode::Numeric,
        rows: transpose(&expm(&scaled)),
    }
}

/// `exp(−ε ad e_i) Y`.
pub fn adjoint_apply(g: &LieAlgebra, i: usize, eps: f64, y: &[f64]) -> Vec<f64> {
    adjoint_matrix(g, i, eps).apply(y)
}

/// Applies `(generator, ε)` steps left to right.
pub fn simplify_by_adjoint(g: &LieAlgebra, x: &[f64], schedule: &[(usize, f64)]) -> Vec<f64> {
    schedule.iter().fold(x.to_vec(), |acc, (i, e)| adjoint_apply(g, *i, *e, &acc))
}

fn nonzero_count(v: &[f64], tol: f64) -> usize {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    v.iter().filter(|x| x.abs() > tol * scale).count()
}

/// Heuristic search: each step tries every generator at grid values of `ε`
/// and at roots of each coordinate as a function of `ε`, keeping the move
/// that most reduces the number of nonzero coordinates.
pub fn greedy_simplify(g: &LieAlgebra, x: &[f64], grid: &[f64], max_steps: usize) -> (Vec<f64>, Vec<(usize, f64)>) {
    let tol = 1e-10;
    let mut cur = x.to_vec();
    let mut schedule = Vec::new();
    for _ in 0..max_steps {
        let base = nonzero_count(&cur, tol);
        let mut best: Option<(usize, f64, f64, Vec<f64>)> = None;
        for i in 0..g.dim() {
            let mut cands: Vec<f64> = grid.to_vec();
            cands.extend(coordinate_roots(g, i, &cur));
            for e in cands {
                if e == 0.0 {
                    continue;
                }
                let y = adjoint_apply(g, i, e, &cur);
                let score = nonzero_count(&y, tol);
                let l1: f64 = y.iter().map(|v| v.abs()).sum();
                let better = match &best {
                    None => score < base,
                    Some((_, _, bl1, by)) => {
                        let bs = nonzero_count(by, tol);
                        score < bs || (score == bs && l1 < *bl1 - 1e-12)
                    }
                };
                if better && score < base {
                    best = Some((i, e, l1, y));
                }
            }
        }
        match best {
            Some((i, e, _, y)) => {
                schedule.push((i, e));
                cur = y.into_iter().map(|v| if v.abs() < 1e-11 { 0.0 } else { v }).collect();
            }
            None => break,
        }
    }
    (cur, schedule)
}

/// Values of `ε ∈ [−4, 4]` at which some coordinate of `Ad(exp(ε e_i)) y` vanishes.
fn coordinate_roots(g: &LieAlgebra, i: usize, y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let samples: Vec<f64> = (0..=160).map(|k| -4.0 + 0.05 * k as f64).collect();
    let values: Vec<Vec<f64>> = samples.iter().map(|&e| adjoint_apply(g, i, e, y)).collect();
    let mut roots = Vec::new();
    for k in 0..n {
        for w in 0..samples.len() - 1 {
            let (a, b) = (values[w][k], values[w + 1][k]);
            if a == 0.0 || a * b > 0.0 {
                continue;
            }
            let (mut lo, mut hi) = (samples[w], samples[w + 1]);
            let mut flo = a;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = adjoint_apply(g, i, mid, y)[k];
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    roots
}

/// Ad-invariant data of an element.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitInvariants {
    pub killing: f64,
    pub ad_rank: usize,
    /// `det(λI − ad X)`, highest degree first.
    pub charpoly: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOrbitInvariants {
    pub killing: Rational,
    pub ad_rank: usize,
    pub charpoly: QVector,
}

impl ExactOrbitInvariants {
    pub fn to_f64(&self) -> OrbitInvariants {
        OrbitInvariants {
            killing: self.killing.to_f64().unwrap_or(f64::NAN),
            ad_rank: self.ad_rank,
            charpoly: self.charpoly.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect(),
        }
    }
}

pub fn orbit_invariants_exact(g: &LieAlgebra, x: &[Rational]) -> ExactOrbitInvariants {
    let a = g.ad(x);
    ExactOrbitInvariants {
        killing: a.mul(&a).trace(),
        ad_rank: a.rank(),
        charpoly: a.charpoly(),
    }
}

fn ad_of(g: &LieAlgebra, x: &[f64]) -> Mat {
    let n = g.dim();
    let mut out = vec![vec![0.0; n]; n];
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0.0 {
            continue;
        }
        let a = ad_f64(g, i);
        for r in 0..n {
            for c in 0..n {
                out[r][c] += xi * a[r][c];
            }
        }
    }
    out
}

fn numeric_rank(a: &Mat) -> usize {
    let mut m = a.clone();
    let (rows, cols) = (m.len(), m[0].len());
    let scale = m.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let tol = 1e-9 * scale;
    let mut r = 0;
    for c in 0..cols {
        let p = (r..rows).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()));
        let Some(p) = p else { break };
        if m[p][c].abs() <= tol {
            continue;
        }
        m.swap(r, p);
        for i in r + 1..rows {
            let f = m[i][c] / m[r][c];
            for j in c..cols {
                m[i][j] -= f * m[r][j];
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn charpoly_f64(a: &Mat) -> Vec<f64> {
    let n = a.len();
    let mut coeffs = vec![1.0];
    let mut m = vec![vec![0.0; n]; n];
    for k in 1..=n {
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[k - 1];
        }
        m = next;
        let am = matmul(a, &m);
        let tr: f64 = (0..n).map(|i| am[i][i]).sum();
        coeffs.push(-tr / k as f64);
    }
    coeffs
}

pub fn orbit_invariants(g: &LieAlgebra, x: &[f64]) -> OrbitInvariants {
    let a = ad_of(g, x);
    let a2 = matmul(&a, &a);
    OrbitInvariants {
        killing: (0..a.len()).map(|i| a2[i][i]).sum(),
        ad_rank: numeric_rank(&a),
        charpoly: charpoly_f64(&a),
    }
}

/// Largest relative deviation between two invariant records; rank changes count as infinite.
pub fn invariant_drift(a: &OrbitInvariants, b: &OrbitInvariants) -> f64 {
    if a.ad_rank != b.ad_rank {
        return f64::INFINITY;
    }
    let rel = |x: f64, y: f64| (x - y).abs() / (1.0 + x.abs().max(y.abs()));
    a.charpoly
        .iter()
        .zip(&b.charpoly)
        .map(|(x, y)| rel(*x, *y))
        .fold(rel(a.killing, b.killing), f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;
    use crate::liealg::{default_labels, structure_constants};
    use crate::symmetry::born_infeld_generators;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn bi() -> &'static LieAlgebra {
        static G: OnceLock<LieAlgebra> = OnceLock::new();
        G.get_or_init(|| structure_constants(&born_infeld_generators(), &default_labels(7)).unwrap())
    }

    fn e(i: usize) -> Vec<f64> {
        let mut v = vec![0.0; 7];
        v[i] = 1.0;
        v
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn ad_examples() {
        let g = bi();
        let a7 = ad_matrix(g, &unit(7, 6));
        let mut d = QMatrix::zeros(7, 7);
        for i in 0..3 {
            d[(i, i)] = rat(-1, 1);
        }
        assert_eq!(a7, d);
        assert!(ad_matrix(g, &vec![Rational::zero(); 7]).is_zero());
        let a1 = ad_matrix(g, &unit(7, 0));
        assert!(!a1.pow(2).is_zero() || a1.pow(3).is_zero());
        assert!(a1.pow(3).is_zero());
        assert!((0..3).all(|i| is_nilpotent_generator(g, i)));
        assert!((3..7).all(|i| !is_nilpotent_generator(g, i)));
    }

    #[test]
    fn adjoint_apply_examples() {
        let g = bi();
        let eps: f64 = 0.7;
        assert!(close(&adjoint_apply(g, 6, eps, &e(0)), &[eps.exp(), 0., 0., 0., 0., 0., 0.], 1e-12));
        let y = adjoint_apply(g, 3, eps, &e(0));
        assert!(close(&y, &[eps.cosh(), eps.sinh(), 0., 0., 0., 0., 0.], 1e-12));
        let z = [0.3, -1.0, 2.0, 0.5, 0.1, 0.0, 4.0];
        for i in 0..7 {
            assert!(close(&adjoint_apply(g, i, 0.0, &z), &z, 0.0));
        }
    }

    #[test]
    fn nilpotent_matrices_are_polynomials() {
        let g = bi();
        let m1 = adjoint_matrix_symbolic(g, 0).unwrap();
        let p = |s: &str| crate::expr::parse(s).unwrap();
        assert_eq!(m1[3][1], p("-eps"));
        assert_eq!(m1[4][2], p("-eps"));
        assert_eq!(m1[6][0], p("-eps"));
        let m3 = adjoint_matrix_symbolic(g, 2).unwrap();
        assert_eq!(m3[4][0], p("eps"));
        assert!(adjoint_matrix_symbolic(g, 3).is_none());
    }

    #[test]
    fn m6_is_hyperbolic() {
        let g = bi();
        let m = adjoint_matrix(g, 5, 0.4);
        let (c, s) = (0.4f64.cosh(), 0.4f64.sinh());
        assert!((m.rows[1][1] - c).abs() < 1e-12 && (m.rows[1][2] - s).abs() < 1e-12);
        assert!((m.rows[2][1] - s).abs() < 1e-12 && (m.rows[2][2] - c).abs() < 1e-12);
        assert!((m.rows[3][3] - c).abs() < 1e-12 && (m.rows[3][4] - s).abs() < 1e-12);
        assert!((m.rows[4][3] - s).abs() < 1e-12 && (m.rows[4][4] - c).abs() < 1e-12);
    }

    #[test]
    fn invariants_examples() {
        let g = bi();
        assert_eq!(orbit_invariants_exact(g, &unit(7, 0)).killing, rat(0, 1));
        assert_eq!(orbit_invariants_exact(g, &unit(7, 6)).killing, rat(3, 1));
        // exact invariance in nilpotent directions
        let x5: QVector = [1, 2, 1, 0, 0, -1, 0].iter().map(|v| rat(*v, 1)).collect();
        let before = orbit_invariants_exact(g, &x5);
        let moved = adjoint_apply_exact(g, 1, &rat(3, 7), &adjoint_apply_exact(g, 0, &rat(-2, 1), &x5).unwrap()).unwrap();
        assert_eq!(orbit_invariants_exact(g, &moved), before);
    }

    #[test]
    fn simplify_examples() {
        let g = bi();
        let x = [0.0, 0.37, 0.0, 1.0, 0.0, 0.0, 0.0];
        // Ad(exp(δ v1)) v4 = v4 − δ v2 cancels the v2 component
        let y = simplify_by_adjoint(g, &x, &[(0, 0.37)]);
        assert!(close(&y, &e(3), 1e-14));
        assert_eq!(simplify_by_adjoint(g, &x, &[]), x.to_vec());
        let (z, sched) = greedy_simplify(g, &x, &[-1.0, 1.0], 4);
        assert!(!sched.is_empty());
        assert_eq!(nonzero_count(&z, 1e-10), 1);
        let x4 = [0.0, 2.0, -0.5, 0.0, 0.0, 0.0, 1.5];
        let w = simplify_by_adjoint(g, &x4, &[(0, 0.8), (0, -0.3)]);
        assert!(w[3..6].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn expm_matches_closed_form() {
        let a = vec![vec![0.0, 2.0], vec![2.0, 0.0]];
        let m = expm(&a);
        assert!((m[0][0] - 2f64.cosh()).abs() < 1e-12);
        assert!((m[0][1] - 2f64.sinh()).abs() < 1e-12);
    }

    fn coords() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-2.0f64..2.0, 7)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn group_law(i in 0usize..7, a in -1.5f64..1.5, b in -1.5f64..1.5) {
            let g = bi();
            let ma = adjoint_matrix(g, i, a);
            let mb = adjoint_matrix(g, i, b);
            let mab = adjoint_matrix(g, i, a + b);
            let prod = matmul(&ma.rows, &mb.rows);
            for r in 0..7 {
                prop_assert!(close(&prod[r], &mab.rows[r], 1e-9));
            }
        }

        #[test]
        fn automorphism(i in 0usize..7, eps in -1.2f64..1.2, x in coords(), y in coords()) {
            let g = bi();
            let br = |p: &[f64], q: &[f64]| -> Vec<f64> {
                let mut out = vec![0.0; 7];
                for a in 0..7 { for b in 0..7 { for k in 0..7 {
                    let c = g.structure_constant(a, b, k).to_f64().unwrap();
                    out[k] += p[a] * q[b] * c;
                }}}
                out
            };
            let lhs = adjoint_apply(g, i, eps, &br(&x, &y));
            let rhs = br(&adjoint_apply(g, i, eps, &x), &adjoint_apply(g, i, eps, &y));
            prop_assert!(close(&lhs, &rhs, 1e-8));
        }

        #[test]
        fn killing_invariance(i in 0usize..7, eps in -1.2f64..1.2, x in coords(), y in coords()) {
            let g = bi();
            let k = g.killing_form().to_f64();
            let kf = |p: &[f64], q: &[f64]| -> f64 {
                (0..7).map(|a| (0..7).map(|b| p[a] * k[a][b] * q[b]).sum::<f64>()).sum()
            };
            let before = kf(&x, &y);
            let after = kf(&adjoint_apply(g, i, eps, &x), &adjoint_apply(g, i, eps, &y));
            prop_assert!((before - after).abs() <= 1e-8 * (1.0 + before.abs()));
        }

        #[test]
        fn derivative_at_identity(i in 0usize..7, y in coords()) {
            let g = bi();
            // Richardson extrapolation of the one-sided difference quotient
            let dq = |h: f64| -> Vec<f64> {
                adjoint_apply(g, i, h, &y).iter().zip(&y).map(|(a, b)| (a - b) / h).collect()
            };
            let (d1, d2) = (dq(1e-3), dq(5e-4));
            let rich: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| 2.0 * b - a).collect();
            let yq: QVector = y.iter().map(|v| Rational::from_float(*v).unwrap()).collect();
            let target: Vec<f64> = g.bracket(&unit(7, i), &yq).iter().map(|v| -v.to_f64().unwrap()).collect();
            prop_assert!(close(&rich, &target, 1e-6));
        }

        #[test]
        fn invariants_survive_compositions(x in coords(), steps in prop::collection::vec((0usize..7, -0.3f64..0.3), 1..20)) {
            let g = bi();
            let before = orbit_invariants(g, &x);
            let after = orbit_invariants(g, &simplify_by_adjoint(g, &x, &steps));
            prop_assert!(invariant_drift(&before, &after) <= 1e-7);
        }
    }
}
