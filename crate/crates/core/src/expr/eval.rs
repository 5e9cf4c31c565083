use std::collections::HashMap;

use num_traits::ToPrimitive;

use super::{Expr, ExprError, FuncTag};

/// Numeric values keyed by symbol name.
pub type NumericEnv = HashMap<String, f64>;

/// IEEE-double evaluation of `e` with every free symbol bound in `env`.
pub fn eval_numeric(e: &Expr, env: &NumericEnv) -> Result<f64, ExprError> {
    Ok(match e {
        Expr::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
        Expr::Symbol(s) => *env
            .get(s.name())
            .ok_or_else(|| ExprError::Unbound(s.name().to_string()))?,
        Expr::Sum(v) => {
            let mut acc = 0.0;
            for t in v {
                acc += eval_numeric(t, env)?;
            }
            acc
        }
        Expr::Product(v) => {
            let mut acc = 1.0;
            for t in v {
                acc *= eval_numeric(t, env)?;
            }
            acc
        }
        Expr::Power(b, r) => {
            let base = eval_numeric(b, env)?;
            if r.is_integer() {
                let n = r.to_integer().to_i32().unwrap_or(i32::MAX);
                if base == 0.0 && n < 0 {
                    return Err(ExprError::Domain(format!("division by zero in {e}")));
                }
                base.powi(n)
            } else {
                let q_odd = r.denom().to_u64().map(|q| q % 2 == 1).unwrap_or(false);
                let p = r.to_f64().unwrap_or(f64::NAN);
                if base < 0.0 {
                    if !q_odd {
                        return Err(ExprError::Domain(format!("even root of negative value in {e}")));
                    }
                    let mag = (-base).powf(p);
                    let p_odd = r.numer().to_i64().map(|n| n % 2 != 0).unwrap_or(false);
                    if p_odd {
                        -mag
                    } else {
                        mag
                    }
                } else if base == 0.0 && p < 0.0 {
                    return Err(ExprError::Domain(format!("division by zero in {e}")));
                } else {
                    base.powf(p)
                }
            }
        }
        Expr::Func(tag, a) => {
            let x = eval_numeric(a, env)?;
            match tag {
                FuncTag::Exp => x.exp(),
                FuncTag::Log => {
                    if x <= 0.0 {
                        return Err(ExprError::Domain(format!("log of nonpositive value in {e}")));
                    }
                    x.ln()
                }
                FuncTag::Sin => x.sin(),
                FuncTag::Cos => x.cos(),
                FuncTag::Tan => x.tan(),
                FuncTag::Arctan => x.atan(),
                FuncTag::Sinh => x.sinh(),
                FuncTag::Cosh => x.cosh(),
                FuncTag::Sqrt => {
                    if x < 0.0 {
                        return Err(ExprError::Domain(format!("sqrt of negative value in {e}")));
                    }
                    x.sqrt()
                }
            }
        }
    })
}
