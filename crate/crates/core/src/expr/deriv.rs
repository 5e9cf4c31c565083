//! Structural derivative for numeric evaluation. Unlike
//! [`Expr::differentiate`] the result is not brought to canonical form, so
//! its size stays linear in the input even when normalization would expand
//! nested roots and exponentials.

use num_traits::{One, Zero};

use super::{Expr, FuncTag, Rational, Symbol};

fn is_zero(e: &Expr) -> bool {
    matches!(e, Expr::Rational(r) if r.is_zero())
}

fn is_one(e: &Expr) -> bool {
    matches!(e, Expr::Rational(r) if r.is_one())
}

fn sum(terms: Vec<Expr>) -> Expr {
    let mut v: Vec<Expr> = terms.into_iter().filter(|t| !is_zero(t)).collect();
    match v.len() {
        0 => Expr::zero(),
        1 => v.pop().unwrap(),
        _ => Expr::Sum(v),
    }
}

fn product(factors: Vec<Expr>) -> Expr {
    if factors.iter().any(is_zero) {
        return Expr::zero();
    }
    let mut v: Vec<Expr> = factors.into_iter().filter(|f| !is_one(f)).collect();
    match v.len() {
        0 => Expr::one(),
        1 => v.pop().unwrap(),
        _ => Expr::Product(v),
    }
}

fn power(b: Expr, r: Rational) -> Expr {
    if r.is_zero() {
        Expr::one()
    } else if r.is_one() {
        b
    } else {
        Expr::Power(Box::new(b), r)
    }
}

pub(super) fn derivative(e: &Expr, s: &Symbol) -> Expr {
    match e {
        Expr::Rational(_) => Expr::zero(),
        Expr::Symbol(t) => {
            if t == s {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Sum(v) => sum(v.iter().map(|t| derivative(t, s)).collect()),
        Expr::Product(v) => sum(
            (0..v.len())
                .map(|i| {
                    let d = derivative(&v[i], s);
                    if is_zero(&d) {
                        return d;
                    }
                    let mut fs = v.clone();
                    fs[i] = d;
                    product(fs)
                })
                .collect(),
        ),
        Expr::Power(b, r) => {
            let db = derivative(b, s);
            if is_zero(&db) {
                return Expr::zero();
            }
            product(vec![
                Expr::rational(r.clone()),
                power((**b).clone(), r - Rational::one()),
                db,
            ])
        }
        Expr::Func(tag, a) => {
            let da = derivative(a, s);
            if is_zero(&da) {
                return Expr::zero();
            }
            let a = (**a).clone();
            let half = Rational::new(1.into(), 2.into());
            let outer = match tag {
                FuncTag::Exp => e.clone(),
                FuncTag::Log => power(a, -Rational::one()),
                FuncTag::Sin => Expr::func(FuncTag::Cos, a),
                FuncTag::Cos => product(vec![Expr::int(-1), Expr::func(FuncTag::Sin, a)]),
                FuncTag::Tan => sum(vec![Expr::one(), power(e.clone(), Rational::from_integer(2.into()))]),
                FuncTag::Arctan => power(
                    sum(vec![Expr::one(), power(a, Rational::from_integer(2.into()))]),
                    -Rational::one(),
                ),
                FuncTag::Sinh => Expr::func(FuncTag::Cosh, a),
                FuncTag::Cosh => Expr::func(FuncTag::Sinh, a),
                FuncTag::Sqrt => product(vec![Expr::rational(half.clone()), power(a, -half)]),
            };
            product(vec![outer, da])
        }
    }
}
