use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::{Expr, Rational};

pub(super) fn fmt_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str(&render(e))
}

fn render(e: &Expr) -> String {
    match e {
        Expr::Rational(r) => render_rational(r),
        Expr::Symbol(s) => s.name().to_string(),
        Expr::Sum(v) => {
            let mut out = String::new();
            for (i, t) in v.iter().enumerate() {
                let (neg, body) = split_sign(t);
                if i == 0 {
                    if neg {
                        out.push('-');
                    }
                } else {
                    out.push_str(if neg { " - " } else { " + " });
                }
                out.push_str(&body);
            }
            out
        }
        Expr::Product(_) => {
            let (neg, body) = split_sign(e);
            if neg {
                format!("-{body}")
            } else {
                body
            }
        }
        Expr::Power(b, r) => render_power(b, r),
        Expr::Func(tag, a) => format!("{}({})", tag.name(), render(a)),
    }
}

fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders a term with its leading sign stripped.
fn split_sign(e: &Expr) -> (bool, String) {
    match e {
        Expr::Rational(r) if r.is_negative() => (true, render_rational(&-r)),
        Expr::Product(v) => {
            let mut neg = false;
            let mut coeff = None;
            let mut num = Vec::new();
            let mut den = Vec::new();
            for factor in v {
                match factor {
                    Expr::Rational(r) => {
                        let r = if r.is_negative() {
                            neg = !neg;
                            -r
                        } else {
                            r.clone()
                        };
                        coeff = Some(r);
                    }
                    Expr::Power(b, r) if r.is_negative() => den.push(render_power(b, &-r)),
                    other => num.push(factor_str(other)),
                }
            }
            let mut out = String::new();
            match &coeff {
                Some(c) if !c.is_one() => {
                    out.push_str(&render_rational(c));
                    if !num.is_empty() {
                        out.push('*');
                    }
                }
                _ => {
                    if num.is_empty() {
                        out.push('1');
                    }
                }
            }
            out.push_str(&num.join("*"));
            if !den.is_empty() {
                if den.len() == 1 {
                    write!(out, "/{}", den[0]).unwrap();
                } else {
                    write!(out, "/({})", den.join("*")).unwrap();
                }
            }
            (neg, out)
        }
        other => (false, render(other)),
    }
}

fn factor_str(e: &Expr) -> String {
    match e {
        Expr::Sum(_) => format!("({})", render(e)),
        Expr::Rational(r) if r.is_negative() || !r.is_integer() => format!("({})", render(e)),
        Expr::Product(_) => format!("({})", render(e)),
        _ => render(e),
    }
}

fn render_power(b: &Expr, r: &Rational) -> String {
    let base = match b {
        Expr::Symbol(_) | Expr::Func(..) => render(b),
        Expr::Rational(q) if q.is_integer() && !q.is_negative() => render(b),
        _ => format!("({})", render(b)),
    };
    if r.is_one() {
        return base;
    }
    if r.is_integer() && r.is_positive() {
        format!("{base}^{}", r.numer())
    } else {
        format!("{base}^({})", render_rational(r))
    }
}
