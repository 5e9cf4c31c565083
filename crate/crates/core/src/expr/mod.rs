//! Symbolic expressions over exact rationals.
//!
//! An [`Expr`] is an immutable tree. Every public operation returns trees in
//! canonical form: a single fraction of two expanded polynomials whose
//! indeterminates are symbols, function applications and rational roots.
//! Two expressions that agree as rational functions of those indeterminates
//! normalize to identical trees.

mod deriv;
mod diff;
mod eval;
mod parse;
mod poly;
mod print;
mod ratfunc;
mod subst;
mod symbol;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use eval::{eval_numeric, NumericEnv};
pub use parse::{parse, parse_with, ParseContext, ParseError};
pub use subst::Monomial;
pub use symbol::{var_rank, MultiIndex, Symbol, SymbolKind};

pub(crate) use ratfunc::RatFunc;

pub type Rational = BigRational;

/// Exact rational from a small numerator and denominator.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncTag {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Arctan,
    Sinh,
    Cosh,
    Sqrt,
}

impl FuncTag {
    pub fn name(self) -> &'static str {
        match self {
            FuncTag::Exp => "exp",
            FuncTag::Log => "log",
            FuncTag::Sin => "sin",
            FuncTag::Cos => "cos",
            FuncTag::Tan => "tan",
            FuncTag::Arctan => "arctan",
            FuncTag::Sinh => "sinh",
            FuncTag::Cosh => "cosh",
            FuncTag::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<FuncTag> {
        Some(match name {
            "exp" => FuncTag::Exp,
            "log" | "ln" => FuncTag::Log,
            "sin" => FuncTag::Sin,
            "cos" => FuncTag::Cos,
            "tan" => FuncTag::Tan,
            "arctan" | "atan" => FuncTag::Arctan,
            "sinh" => FuncTag::Sinh,
            "cosh" => FuncTag::Cosh,
            "sqrt" => FuncTag::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Rational(Rational),
    Symbol(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, Rational),
    Func(FuncTag, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("division by zero in {0}")]
    DivisionByZero(String),
    #[error("cyclic substitution through {0}")]
    CyclicBinding(String),
    #[error("unbound symbol {0}")]
    Unbound(String),
    #[error("domain error in {0}")]
    Domain(String),
    #[error("expression is not polynomial in {vars}: {expr}")]
    NotPolynomial { vars: String, expr: String },
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Rational(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Rational(Rational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Rational(Rational::from_integer(BigInt::from(n)))
    }

    pub fn rational(r: Rational) -> Expr {
        Expr::Rational(r)
    }

    pub fn sym(s: &Symbol) -> Expr {
        Expr::Symbol(s.clone())
    }

    pub fn func(tag: FuncTag, arg: Expr) -> Expr {
        Expr::Func(tag, Box::new(arg))
    }

    pub fn pow(self, r: Rational) -> Expr {
        Expr::Power(Box::new(self), r)
    }

    pub fn powi(self, n: i64) -> Expr {
        self.pow(Rational::from_integer(BigInt::from(n)))
    }

    pub fn sqrt(self) -> Expr {
        self.pow(rat(1, 2))
    }

    /// Canonical form. Panics on a symbolic division by the zero expression;
    /// use [`Expr::try_normalize`] when the input is untrusted.
    pub fn normalize(&self) -> Expr {
        self.try_normalize().unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn try_normalize(&self) -> Result<Expr, ExprError> {
        Ok(RatFunc::from_expr(self)?.to_expr())
    }

    pub(crate) fn ratfunc(&self) -> RatFunc {
        RatFunc::from_expr(self).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Expr::Rational(r) => r.is_zero(),
            _ => self.ratfunc().is_zero(),
        }
    }

    /// Exact equality as rational functions.
    pub fn equiv(&self, other: &Expr) -> bool {
        (self.clone() - other.clone()).is_zero()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Expr::Rational(r) => Some(r.clone()),
            _ => self.ratfunc().as_constant(),
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self {
            Expr::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Rational(_) => {}
            Expr::Symbol(s) => {
                out.insert(s.clone());
            }
            Expr::Sum(v) | Expr::Product(v) => v.iter().for_each(|e| e.collect_symbols(out)),
            Expr::Power(b, _) | Expr::Func(_, b) => b.collect_symbols(out),
        }
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        match self {
            Expr::Rational(_) => false,
            Expr::Symbol(t) => t == s,
            Expr::Sum(v) | Expr::Product(v) => v.iter().any(|e| e.contains_symbol(s)),
            Expr::Power(b, _) | Expr::Func(_, b) => b.contains_symbol(s),
        }
    }

    pub fn contains_any(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.free_symbols().iter().any(pred)
    }

    /// Partial derivative treating every other symbol as constant.
    pub fn differentiate(&self, s: &Symbol) -> Expr {
        self.ratfunc().diff(s).to_expr()
    }

    /// Derivative without normalization; equal to [`Expr::differentiate`]
    /// as a function but not canonical. Meant for numeric evaluation.
    pub fn differentiate_structural(&self, s: &Symbol) -> Expr {
        deriv::derivative(self, s)
    }

    /// Simultaneous substitution followed by normalization.
    pub fn substitute(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        subst::substitute(self, bindings)
    }

    /// Simultaneous substitution that accepts bindings referring to each other.
    pub fn substitute_parallel(&self, bindings: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        subst::substitute_parallel(self, bindings)
    }

    pub fn subs(&self, s: &Symbol, value: &Expr) -> Expr {
        let mut b = BTreeMap::new();
        b.insert(s.clone(), value.clone());
        subst::substitute(self, &b).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Decomposes into monomials in `vars` with `vars`-free coefficients.
    pub fn poly_coeffs(&self, vars: &[Symbol]) -> Result<BTreeMap<Monomial, Expr>, ExprError> {
        subst::poly_coeffs(self, vars)
    }

    pub fn eval(&self, env: &NumericEnv) -> Result<f64, ExprError> {
        eval_numeric(self, env)
    }

    /// Numerator and denominator of the canonical fraction.
    pub fn numer_denom(&self) -> (Expr, Expr) {
        let rf = self.ratfunc();
        (
            RatFunc::from_poly(rf.num.clone()).to_expr(),
            RatFunc::from_poly(rf.den.clone()).to_expr(),
        )
    }

    /// Greatest common divisor of two polynomial normal forms, treating every
    /// atom as a variable. `None` if either side has a nonconstant denominator.
    pub fn poly_gcd(&self, other: &Expr) -> Option<Expr> {
        let (a, b) = (self.ratfunc(), other.ratfunc());
        if !a.den.is_constant() || !b.den.is_constant() {
            return None;
        }
        Some(RatFunc::from_poly(a.num.gcd(&b.num)).to_expr())
    }

    /// Exact polynomial quotient `self / other`, if it exists.
    pub fn poly_div_exact(&self, other: &Expr) -> Option<Expr> {
        let (a, b) = (self.ratfunc(), other.ratfunc());
        if !a.den.is_constant() || !b.den.is_constant() || b.is_zero() {
            return None;
        }
        let q = a.num.div_exact(&b.num)?;
        let k = b.den.as_constant()? / a.den.as_constant()?;
        Some(RatFunc::from_poly(q.scale(&k)).to_expr())
    }

    /// Rewrites `f(a + b)` by the addition formulas for exp, sin, cos, sinh and
    /// cosh, and `f(n·a)` for integer `n` as an iterated sum. Used by group-law
    /// checks where one-parameter composition adds the group parameters.
    pub fn expand_addition_formulas(&self) -> Expr {
        diff::expand_addition(self).normalize()
    }

    /// Degree-one coefficient and remainder: `self = a·s + b`.
    /// `None` when `self` is not affine in `s`.
    pub fn affine_in(&self, s: &Symbol) -> Option<(Expr, Expr)> {
        let coeffs = self.poly_coeffs(std::slice::from_ref(s)).ok()?;
        let mut a = Expr::zero();
        let mut b = Expr::zero();
        for (m, c) in coeffs {
            match m.0[0] {
                0 => b = c,
                1 => a = c,
                _ => return None,
            }
        }
        Some((a, b))
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.as_rational().and_then(|r| r.to_f64())
    }

    pub fn is_negative_constant(&self) -> bool {
        self.as_rational().map(|r| r.is_negative()).unwrap_or(false)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<&Symbol> for Expr {
    fn from(s: &Symbol) -> Expr {
        Expr::sym(s)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Expr {
        Expr::Symbol(s)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::Rational(r)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Sum(mut a), Expr::Sum(b)) => {
                a.extend(b);
                Expr::Sum(a)
            }
            (Expr::Sum(mut a), b) => {
                a.push(b);
                Expr::Sum(a)
            }
            (a, b) => Expr::Sum(vec![a, b]),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Product(mut a), Expr::Product(b)) => {
                a.extend(b);
                Expr::Product(a)
            }
            (Expr::Product(mut a), b) => {
                a.push(b);
                Expr::Product(a)
            }
            (a, b) => Expr::Product(vec![a, b]),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::int(-1) * self
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        self * rhs.powi(-1)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::fmt_expr(self, f)
    }
}

/// Sum of the given terms, normalized.
pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
    Expr::Sum(terms.into_iter().collect()).normalize()
}

#[cfg(test)]
mod tests;
