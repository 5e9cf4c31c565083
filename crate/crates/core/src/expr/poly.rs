//! Sparse multivariate polynomials over ℚ in atomic subterms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{Expr, FuncTag, Rational, Symbol};

/// Indeterminate of the polynomial ring: a symbol, a function application with
/// normalized argument, or the `q`-th root of a normalized polynomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Sym(Symbol),
    Func(FuncTag, Arc<Expr>),
    Root(Arc<Expr>, u32),
}

impl Atom {
    pub(crate) fn contains_symbol(&self, s: &Symbol) -> bool {
        match self {
            Atom::Sym(a) => a == s,
            Atom::Func(_, e) | Atom::Root(e, _) => e.contains_symbol(s),
        }
    }
}

/// Power product of atoms, sorted by atom, exponents positive.
/// Ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub(crate) struct Mono(pub(crate) Vec<(Atom, u32)>);

impl Mono {
    pub(crate) fn one() -> Self {
        Mono(Vec::new())
    }

    pub(crate) fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            Mono::one()
        } else {
            Mono(vec![(a, e)])
        }
    }

    pub(crate) fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn exponent(&self, a: &Atom) -> u32 {
        self.0
            .iter()
            .find(|(b, _)| b == a)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub(crate) fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// `self / other` when every exponent of `other` fits.
    pub(crate) fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (a, e) in &self.0 {
            if j < other.0.len() && &other.0[j].0 == a {
                let f = other.0[j].1;
                if f > *e {
                    return None;
                }
                if f < *e {
                    out.push((a.clone(), e - f));
                }
                j += 1;
            } else if j < other.0.len() && other.0[j].0 < *a {
                return None;
            } else {
                out.push((a.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    /// Drops `a` from the monomial, returning its former exponent.
    pub(crate) fn remove(&self, a: &Atom) -> (Mono, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|(b, f)| {
                if b == a {
                    e = *f;
                    false
                } else {
                    true
                }
            })
            .cloned()
            .collect();
        (Mono(rest), e)
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for ((a, e), (b, f)) in self.0.iter().zip(other.0.iter()) {
            match a.cmp(b) {
                // positive exponent on an earlier atom wins
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => match e.cmp(f) {
                    Ordering::Equal => {}
                    o => return o,
                },
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Mono, Rational>,
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub(crate) fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub(crate) fn atom(a: Atom) -> Self {
        Poly::monomial(Mono::atom(a, 1), Rational::one())
    }

    pub(crate) fn monomial(m: Mono, c: Rational) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub(crate) fn leading(&self) -> Option<(&Mono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub(crate) fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub(crate) fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub(crate) fn mul_mono(&self, m: &Mono, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c * k)).collect(),
        }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }

    pub(crate) fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub(crate) fn atoms(&self) -> BTreeSet<Atom> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for (a, _) in &m.0 {
                s.insert(a.clone());
            }
        }
        s
    }

    pub(crate) fn degree_in(&self, a: &Atom) -> u32 {
        self.terms.keys().map(|m| m.exponent(a)).max().unwrap_or(0)
    }

    /// Views the polynomial as univariate in `a` with polynomial coefficients.
    pub(crate) fn split(&self, a: &Atom) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.remove(a);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out
    }

    pub(crate) fn leading_coeff_in(&self, a: &Atom) -> (u32, Poly) {
        let split = self.split(a);
        let (d, c) = split.into_iter().next_back().unwrap_or((0, Poly::zero()));
        (d, c)
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub(crate) fn div_exact(&self, other: &Poly) -> Option<Poly> {
        if other.is_zero() {
            return None;
        }
        if let Some(c) = other.as_constant() {
            return Some(self.scale(&(Rational::one() / c)));
        }
        let (lm, lc) = other.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            rem = rem.sub(&other.mul_mono(&qm, &qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    /// Scales so the leading coefficient is one.
    pub(crate) fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => self.scale(&(Rational::one() / c)),
            None => Poly::zero(),
        }
    }

    pub(crate) fn leading_is_negative(&self) -> bool {
        self.leading().map(|(_, c)| c.is_negative()).unwrap_or(false)
    }

    /// Greatest common divisor, monic; constants have gcd one.
    pub(crate) fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self == other {
            return self.monic();
        }
        let atoms: BTreeSet<Atom> = self.atoms().union(&other.atoms()).cloned().collect();
        let var = atoms.into_iter().next_back().expect("nonconstant");
        let da = self.degree_in(&var);
        let db = other.degree_in(&var);
        if da == 0 {
            return self.gcd(&other.content_in(&var));
        }
        if db == 0 {
            return other.gcd(&self.content_in(&var));
        }
        let ca = self.content_in(&var);
        let cb = other.content_in(&var);
        let content = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = other.div_exact(&cb).expect("content divides");
        if da < db {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() && b.degree_in(&var) > 0 {
            let r = a.prem(&b, &var);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_in(&var) };
        }
        let g = if b.is_zero() { a } else { Poly::one() };
        let g = if g.degree_in(&var) == 0 { Poly::one() } else { g };
        g.mul(&content).monic()
    }

    fn content_in(&self, var: &Atom) -> Poly {
        let mut g = Poly::zero();
        for c in self.split(var).values() {
            g = g.gcd(c);
            if g.is_constant() && !g.is_zero() {
                return Poly::one();
            }
        }
        g
    }

    fn primitive_in(&self, var: &Atom) -> Poly {
        let c = self.content_in(var);
        self.div_exact(&c).expect("content divides")
    }

    /// Pseudo-remainder of `self` by `b` as univariate polynomials in `var`.
    fn prem(&self, b: &Poly, var: &Atom) -> Poly {
        let (db, lcb) = b.leading_coeff_in(var);
        let mut r = self.clone();
        loop {
            let (dr, lcr) = r.leading_coeff_in(var);
            if r.is_zero() || dr < db {
                return r;
            }
            let shift = Mono::atom(var.clone(), dr - db);
            let t = b.mul(&lcr).mul_mono(&shift, &Rational::one());
            r = r.mul(&lcb).sub(&t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: &str) -> Atom {
        Atom::Sym(Symbol::independent(n))
    }

    fn p(terms: &[(&[(&str, u32)], i64)]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in terms {
            let mut mono = Mono::one();
            for (n, e) in m.iter() {
                mono = mono.mul(&Mono::atom(sym(n), *e));
            }
            out.add_term(mono, Rational::from_integer((*c).into()));
        }
        out
    }

    #[test]
    fn grlex_order() {
        let x = Mono::atom(sym("x"), 1);
        let t = Mono::atom(sym("t"), 1);
        let xx = Mono::atom(sym("x"), 2);
        let xt = x.mul(&t);
        assert!(x > t);
        assert!(xx > xt);
        assert!(xt > t.mul(&t));
        assert!(t > Mono::one());
    }

    #[test]
    fn exact_division_and_gcd() {
        // (x+t)(x-t) and (x+t)^2
        let a = p(&[(&[("x", 2)], 1), (&[("t", 2)], -1)]);
        let b = p(&[(&[("x", 2)], 1), (&[("x", 1), ("t", 1)], 2), (&[("t", 2)], 1)]);
        let g = a.gcd(&b);
        assert_eq!(g, p(&[(&[("x", 1)], 1), (&[("t", 1)], 1)]));
        let q = a.div_exact(&g).unwrap();
        assert_eq!(q, p(&[(&[("x", 1)], 1), (&[("t", 1)], -1)]));
        assert!(a.div_exact(&b).is_none());
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = p(&[(&[("x", 2)], 1), (&[], 1)]);
        let b = p(&[(&[("t", 1)], 1), (&[], 1)]);
        assert_eq!(a.gcd(&b), Poly::one());
    }
}
