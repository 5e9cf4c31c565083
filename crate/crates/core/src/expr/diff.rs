//! Addition-formula expansion of transcendental function applications.

use num_traits::{One, Signed, ToPrimitive};

use super::{Expr, FuncTag};

pub(super) fn expand_addition(e: &Expr) -> Expr {
    match e {
        Expr::Rational(_) | Expr::Symbol(_) => e.clone(),
        Expr::Sum(v) => Expr::Sum(v.iter().map(expand_addition).collect()),
        Expr::Product(v) => Expr::Product(v.iter().map(expand_addition).collect()),
        Expr::Power(b, r) => Expr::Power(Box::new(expand_addition(b)), r.clone()),
        Expr::Func(tag, arg) => {
            let arg = expand_addition(arg).normalize();
            expand_func(*tag, &arg)
        }
    }
}

fn splits(tag: FuncTag) -> bool {
    matches!(
        tag,
        FuncTag::Exp | FuncTag::Sin | FuncTag::Cos | FuncTag::Sinh | FuncTag::Cosh
    )
}

/// Splits `arg` into `a + b` when it is a sum or an integer multiple.
fn split_arg(arg: &Expr) -> Option<(Expr, Expr)> {
    match arg {
        Expr::Sum(v) if v.len() >= 2 => {
            let a = v[0].clone();
            let b = Expr::Sum(v[1..].to_vec()).normalize();
            Some((a, b))
        }
        Expr::Product(v) => {
            let (n, rest) = v.split_first()?;
            let n = match n {
                Expr::Rational(r) if r.is_integer() && r.abs() > One::one() => r.to_integer().to_i64()?,
                _ => return None,
            };
            let r = if rest.len() == 1 {
                rest[0].clone()
            } else {
                Expr::Product(rest.to_vec())
            };
            let b = (Expr::int(n - 1) * r.clone()).normalize();
            Some((r, b))
        }
        _ => None,
    }
}

fn expand_func(tag: FuncTag, arg: &Expr) -> Expr {
    if !splits(tag) {
        return Expr::func(tag, arg.clone());
    }
    let Some((a, b)) = split_arg(arg) else {
        return Expr::func(tag, arg.clone());
    };
    let f = |t: FuncTag, x: &Expr| expand_func(t, &x.normalize());
    use FuncTag::*;
    match tag {
        Exp => f(Exp, &a) * f(Exp, &b),
        Sin => f(Sin, &a) * f(Cos, &b) + f(Cos, &a) * f(Sin, &b),
        Cos => f(Cos, &a) * f(Cos, &b) - f(Sin, &a) * f(Sin, &b),
        Sinh => f(Sinh, &a) * f(Cosh, &b) + f(Cosh, &a) * f(Sinh, &b),
        Cosh => f(Cosh, &a) * f(Cosh, &b) + f(Sinh, &a) * f(Sinh, &b),
        _ => unreachable!(),
    }
}
