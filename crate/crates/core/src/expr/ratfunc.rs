use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{Atom, Mono, Poly};
use super::{Expr, ExprError, FuncTag, Rational, Symbol};

/// Quotient of two polynomials. Arithmetic does not reduce; call
/// [`RatFunc::canonical`] (done by `to_expr`) to reach the normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RatFunc {
    pub(crate) num: Poly,
    pub(crate) den: Poly,
}

impl RatFunc {
    pub(crate) fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub(crate) fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub(crate) fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub(crate) fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub(crate) fn atom(a: Atom) -> Self {
        Self::from_poly(Poly::atom(a))
    }

    pub(crate) fn symbol(s: &Symbol) -> Self {
        Self::atom(Atom::Sym(s.clone()))
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub(crate) fn as_constant(&self) -> Option<Rational> {
        let n = self.num.as_constant()?;
        if n.is_zero() {
            return Some(n);
        }
        // num and den both constant, or den a constant multiple of a nonzero-free poly
        let d = self.den.as_constant()?;
        Some(n / d)
    }

    pub(crate) fn add(&self, o: &RatFunc) -> RatFunc {
        if self.num.is_zero() {
            return o.clone();
        }
        if o.num.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc {
                num: self.num.add(&o.num),
                den: self.den.clone(),
            };
        }
        if let Some(c) = self.den.as_constant() {
            if let Some(d) = o.den.as_constant() {
                return RatFunc::from_poly(
                    self.num.scale(&(Rational::one() / c)).add(&o.num.scale(&(Rational::one() / d))),
                );
            }
        }
        if let Some(k) = o.den.div_exact(&self.den) {
            return RatFunc {
                num: self.num.mul(&k).add(&o.num),
                den: o.den.clone(),
            };
        }
        if let Some(k) = self.den.div_exact(&o.den) {
            return RatFunc {
                num: self.num.add(&o.num.mul(&k)),
                den: self.den.clone(),
            };
        }
        RatFunc {
            num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            den: self.den.mul(&o.den),
        }
    }

    pub(crate) fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub(crate) fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub(crate) fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.num.is_zero() || o.num.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.mul(&o.num),
            den: self.den.mul(&o.den),
        }
    }

    pub(crate) fn scale(&self, k: &Rational) -> RatFunc {
        RatFunc {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub(crate) fn inv(&self) -> Result<RatFunc, ExprError> {
        if self.num.is_zero() {
            return Err(ExprError::DivisionByZero("reciprocal of zero".into()));
        }
        Ok(RatFunc {
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub(crate) fn powi(&self, n: i64) -> Result<RatFunc, ExprError> {
        let base = if n < 0 { self.inv()? } else { self.clone() };
        let k = n.unsigned_abs() as u32;
        Ok(RatFunc {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    /// Converts a tree to a reduced fraction.
    pub(crate) fn from_expr(e: &Expr) -> Result<RatFunc, ExprError> {
        Ok(Self::build(e)?.canonical())
    }

    fn build(e: &Expr) -> Result<RatFunc, ExprError> {
        Ok(match e {
            Expr::Rational(r) => RatFunc::constant(r.clone()),
            Expr::Symbol(s) => RatFunc::symbol(s),
            Expr::Sum(v) => {
                let mut acc = RatFunc::zero();
                for t in v {
                    acc = acc.add(&Self::build(t)?);
                }
                acc
            }
            Expr::Product(v) => {
                let mut acc = RatFunc::one();
                for t in v {
                    acc = acc.mul(&Self::build(t)?);
                    if acc.is_zero() {
                        // remaining factors still need to be well-defined
                        for rest in v {
                            Self::build(rest)?;
                        }
                        return Ok(RatFunc::zero());
                    }
                }
                acc
            }
            Expr::Power(b, r) => {
                let base = Self::build(b)?.canonical();
                if r.is_integer() {
                    let n = r.to_integer().to_i64().expect("exponent fits in i64");
                    base.powi(n)
                        .map_err(|_| ExprError::DivisionByZero(format!("{e}")))?
                } else {
                    rational_power(&base, r).map_err(|_| ExprError::DivisionByZero(format!("{e}")))?
                }
            }
            Expr::Func(tag, a) => {
                let arg = Self::build(a)?.canonical();
                func_app(*tag, arg)?
            }
        })
    }

    /// Normal form: relations applied, common factors cancelled, monic denominator.
    pub(crate) fn canonical(&self) -> RatFunc {
        let mut num = reduce_relations(&self.num);
        let mut den = reduce_relations(&self.den);
        if num.is_zero() {
            return RatFunc::zero();
        }
        (num, den) = rationalize(num, den);
        if let Some(c) = den.as_constant() {
            return RatFunc::from_poly(num.scale(&(Rational::one() / c)));
        }
        if let Some(q) = num.div_exact(&den) {
            return RatFunc::from_poly(q);
        }
        let g = num.gcd(&den);
        if !g.is_constant() {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero denominator");
        let k = Rational::one() / lc;
        RatFunc {
            num: num.scale(&k),
            den: den.scale(&k),
        }
    }

    pub(crate) fn to_expr(&self) -> Expr {
        let rf = self.canonical();
        rf.to_expr_raw()
    }

    /// Tree for an already canonical fraction.
    pub(crate) fn to_expr_raw(&self) -> Expr {
        let num = poly_to_expr(&self.num);
        if self.den.is_constant() {
            return num;
        }
        let den = Expr::Power(Box::new(poly_to_expr(&self.den)), -Rational::one());
        match num {
            Expr::Rational(r) if r.is_one() => den,
            Expr::Product(mut v) => {
                v.push(den);
                Expr::Product(v)
            }
            other => Expr::Product(vec![other, den]),
        }
    }

    pub(crate) fn diff(&self, s: &Symbol) -> RatFunc {
        let dn = diff_poly(&self.num, s);
        if self.den.is_constant() {
            return dn.scale(&(Rational::one() / self.den.as_constant().unwrap()));
        }
        let dd = diff_poly(&self.den, s);
        let den = RatFunc::from_poly(self.den.clone());
        let num = RatFunc::from_poly(self.num.clone());
        // (n' d - n d') / d^2
        dn.mul(&den)
            .sub(&num.mul(&dd))
            .mul(&RatFunc {
                num: Poly::one(),
                den: self.den.pow(2),
            })
    }

}

fn diff_poly(p: &Poly, s: &Symbol) -> RatFunc {
    let mut acc = RatFunc::zero();
    for (m, c) in &p.terms {
        for (a, e) in &m.0 {
            let da = diff_atom(a, s);
            if da.is_zero() {
                continue;
            }
            let (rest, _) = m.remove(a);
            let rest = rest.mul(&Mono::atom(a.clone(), e - 1));
            let coeff = c * Rational::from_integer(BigInt::from(*e));
            let term = RatFunc::from_poly(Poly::monomial(rest, coeff));
            acc = acc.add(&term.mul(&da));
        }
    }
    acc
}

fn diff_atom(a: &Atom, s: &Symbol) -> RatFunc {
    match a {
        Atom::Sym(t) => {
            if t == s {
                RatFunc::one()
            } else if let Some(d) = t.unknown_raise(s.name()) {
                if s.kind() == &super::SymbolKind::Independent || s.kind() == &super::SymbolKind::Dependent {
                    RatFunc::symbol(&d)
                } else {
                    RatFunc::zero()
                }
            } else {
                RatFunc::zero()
            }
        }
        Atom::Func(tag, arg) => {
            let inner = arg.ratfunc();
            let darg = inner.diff(s);
            if darg.is_zero() {
                return RatFunc::zero();
            }
            let outer = match tag {
                FuncTag::Exp => RatFunc::atom(a.clone()),
                FuncTag::Log => inner.inv().expect("log of zero"),
                FuncTag::Sin => RatFunc::atom(Atom::Func(FuncTag::Cos, arg.clone())),
                FuncTag::Cos => RatFunc::atom(Atom::Func(FuncTag::Sin, arg.clone())).neg(),
                FuncTag::Tan => {
                    let t = RatFunc::atom(a.clone());
                    RatFunc::one().add(&t.mul(&t))
                }
                FuncTag::Arctan => RatFunc::one()
                    .add(&inner.mul(&inner))
                    .inv()
                    .expect("1 + a^2 is nonzero"),
                FuncTag::Sinh => RatFunc::atom(Atom::Func(FuncTag::Cosh, arg.clone())),
                FuncTag::Cosh => RatFunc::atom(Atom::Func(FuncTag::Sinh, arg.clone())),
                FuncTag::Sqrt => unreachable!("sqrt is normalized to a rational power"),
            };
            outer.mul(&darg)
        }
        Atom::Root(base, q) => {
            // d b^(1/q) = b^(1/q) b' / (q b)
            let b = base.ratfunc();
            let db = b.diff(s);
            if db.is_zero() {
                return RatFunc::zero();
            }
            RatFunc::atom(a.clone())
                .mul(&db)
                .mul(&b.inv().expect("root of zero"))
                .scale(&Rational::new(BigInt::one(), BigInt::from(*q)))
        }
    }
}

/// `base^(p/q)` for a non-integer exponent, as a product of root atoms.
/// Clears root atoms that divide every denominator term by multiplying
/// through with the complementary power, so `1/sqrt(b)` becomes `sqrt(b)/b`.
fn rationalize(mut num: Poly, mut den: Poly) -> (Poly, Poly) {
    loop {
        let Some((first, _)) = den.terms.iter().next() else {
            return (num, den);
        };
        let common = first.0.iter().find_map(|(a, _)| {
            let Atom::Root(_, q) = a else { return None };
            let k = den.terms.keys().map(|m| m.exponent(a)).min().unwrap_or(0);
            (k > 0).then(|| (a.clone(), q - k % q))
        });
        let Some((a, e)) = common else {
            return (num, den);
        };
        let m = Poly::monomial(Mono::atom(a, e), Rational::one());
        num = reduce_relations(&num.mul(&m));
        den = reduce_relations(&den.mul(&m));
    }
}

fn rational_power(base: &RatFunc, r: &Rational) -> Result<RatFunc, ExprError> {
    let num = root_power(&base.num, r)?;
    let den = root_power(&base.den, r)?;
    Ok(num.mul(&den.inv()?))
}

/// `p^r` for polynomial `p` and non-integer rational `r`.
fn root_power(p: &Poly, r: &Rational) -> Result<RatFunc, ExprError> {
    if p.is_zero() {
        if r.is_positive() {
            return Ok(RatFunc::zero());
        }
        return Err(ExprError::DivisionByZero("0 to a negative power".into()));
    }
    let q = r.denom().to_u32().expect("root index fits in u32");
    let e = r.numer().to_i64().expect("exponent fits in i64");
    if let Some(c) = p.as_constant() {
        if let Some(root) = exact_root(&c, q) {
            return RatFunc::constant(root).powi(e);
        }
    }
    // p^(e/q) = p^k * root(p)^rem with 0 <= rem < q
    let qi = q as i64;
    let (k, rem) = e.div_mod_floor(&qi);
    let whole = RatFunc::from_poly(p.clone()).powi(k)?;
    let mut root = RatFunc::one();
    if rem > 0 {
        root = RatFunc::from_poly(root_atom_power(p, q, rem as u32));
    }
    Ok(whole.mul(&root))
}

/// `root(p, q)^e` with the index reduced by `gcd(e, q)`.
fn root_atom_power(p: &Poly, q: u32, e: u32) -> Poly {
    let g = e.gcd(&q);
    let (q, e) = (q / g, e / g);
    let base = RatFunc::from_poly(p.clone()).to_expr_raw();
    Poly::monomial(Mono::atom(Atom::Root(Arc::new(base), q), e), Rational::one())
}

fn exact_root(c: &Rational, q: u32) -> Option<Rational> {
    if c.is_negative() && q % 2 == 0 {
        return None;
    }
    let n = int_root(&c.numer().abs(), q)?;
    let d = int_root(c.denom(), q)?;
    let r = Rational::new(n, d);
    Some(if c.is_negative() { -r } else { r })
}

fn int_root(n: &BigInt, q: u32) -> Option<BigInt> {
    let r = n.nth_root(q);
    (num_traits::pow(r.clone(), q as usize) == *n).then_some(r)
}

fn func_app(tag: FuncTag, arg: RatFunc) -> Result<RatFunc, ExprError> {
    if tag == FuncTag::Sqrt {
        return rational_power(&arg, &Rational::new(BigInt::one(), BigInt::from(2)));
    }
    if arg.is_zero() {
        return match tag {
            FuncTag::Exp | FuncTag::Cos | FuncTag::Cosh => Ok(RatFunc::one()),
            FuncTag::Log => Err(ExprError::Domain("log(0)".into())),
            _ => Ok(RatFunc::zero()),
        };
    }
    if tag == FuncTag::Log && arg.as_constant().map(|c| c.is_one()).unwrap_or(false) {
        return Ok(RatFunc::zero());
    }
    let negative = arg.num.leading_is_negative();
    let (arg, sign) = if negative && tag != FuncTag::Log {
        (arg.neg(), true)
    } else {
        (arg, false)
    };
    let atom = RatFunc::atom(Atom::Func(tag, Arc::new(arg.to_expr_raw())));
    if !sign {
        return Ok(atom);
    }
    Ok(match tag {
        FuncTag::Sin | FuncTag::Tan | FuncTag::Arctan | FuncTag::Sinh => atom.neg(),
        FuncTag::Cos | FuncTag::Cosh => atom,
        FuncTag::Exp => atom.inv()?,
        FuncTag::Log | FuncTag::Sqrt => unreachable!(),
    })
}

/// Applies `cos² = 1 − sin²`, `cosh² = 1 + sinh²` and `root(b,q)^q = b` until stable.
fn reduce_relations(p: &Poly) -> Poly {
    let needs = p.terms.keys().any(|m| {
        m.0.iter().any(|(a, e)| match a {
            Atom::Func(FuncTag::Cos, _) | Atom::Func(FuncTag::Cosh, _) => *e >= 2,
            Atom::Root(_, q) => *e >= *q,
            _ => false,
        })
    });
    if !needs {
        return p.clone();
    }
    let mut out = Poly::zero();
    for (m, c) in &p.terms {
        let mut acc = Poly::monomial(Mono::one(), c.clone());
        for (a, e) in &m.0 {
            let factor = match a {
                Atom::Func(tag @ (FuncTag::Cos | FuncTag::Cosh), arg) if *e >= 2 => {
                    let companion = if *tag == FuncTag::Cos {
                        FuncTag::Sin
                    } else {
                        FuncTag::Sinh
                    };
                    let s2 = Poly::atom(Atom::Func(companion, arg.clone())).pow(2);
                    let sq = if *tag == FuncTag::Cos {
                        Poly::one().sub(&s2)
                    } else {
                        Poly::one().add(&s2)
                    };
                    sq.pow(e / 2).mul(&Poly::monomial(Mono::atom(a.clone(), e % 2), Rational::one()))
                }
                Atom::Root(base, q) if *e >= *q => {
                    let b = base.ratfunc().num;
                    b.pow(e / q).mul(&Poly::monomial(Mono::atom(a.clone(), e % q), Rational::one()))
                }
                _ => Poly::monomial(Mono::atom(a.clone(), *e), Rational::one()),
            };
            acc = acc.mul(&factor);
        }
        out = out.add(&acc);
    }
    reduce_relations(&out)
}

fn atom_expr(a: &Atom, e: u32) -> Expr {
    match a {
        Atom::Sym(s) => pow_expr(Expr::Symbol(s.clone()), e),
        Atom::Func(tag, arg) => pow_expr(Expr::Func(*tag, Box::new((**arg).clone())), e),
        Atom::Root(base, q) => Expr::Power(
            Box::new((**base).clone()),
            Rational::new(BigInt::from(e), BigInt::from(*q)),
        ),
    }
}

fn pow_expr(b: Expr, e: u32) -> Expr {
    if e == 1 {
        b
    } else {
        Expr::Power(Box::new(b), Rational::from_integer(BigInt::from(e)))
    }
}

fn mono_expr(m: &Mono, c: &Rational) -> Expr {
    if m.is_one() {
        return Expr::Rational(c.clone());
    }
    let mut factors = Vec::with_capacity(m.0.len() + 1);
    if !c.is_one() {
        factors.push(Expr::Rational(c.clone()));
    }
    for (a, e) in &m.0 {
        factors.push(atom_expr(a, *e));
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Product(factors)
    }
}

pub(crate) fn poly_to_expr(p: &Poly) -> Expr {
    let mut terms: Vec<Expr> = p.terms.iter().rev().map(|(m, c)| mono_expr(m, c)).collect();
    match terms.len() {
        0 => Expr::zero(),
        1 => terms.pop().unwrap(),
        _ => Expr::Sum(terms),
    }
}
