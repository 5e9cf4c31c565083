use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn x() -> Symbol {
    Symbol::independent("x")
}
fn t() -> Symbol {
    Symbol::independent("t")
}
fn ux() -> Symbol {
    Symbol::jet("u", ["x"])
}
fn ut() -> Symbol {
    Symbol::jet("u", ["t"])
}

fn env(pairs: &[(&str, f64)]) -> NumericEnv {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn parses_born_infeld_left_side() {
    let e = p("(1-u_t^2)*u_xx + 2*u_x*u_t*u_xt - (1+u_x^2)*u_tt");
    let uxx = Expr::sym(&Symbol::jet("u", ["x", "x"]));
    let uxt = Expr::sym(&Symbol::jet("u", ["x", "t"]));
    let utt = Expr::sym(&Symbol::jet("u", ["t", "t"]));
    let (u_x, u_t) = (Expr::sym(&ux()), Expr::sym(&ut()));
    let built = (Expr::one() - u_t.clone().powi(2)) * uxx + Expr::int(2) * u_x.clone() * u_t * uxt
        - (Expr::one() + u_x.powi(2)) * utt;
    assert_eq!(e, built.normalize());
    let mut syms: Vec<String> = e.free_symbols().iter().map(|s| s.name().to_string()).collect();
    syms.sort();
    assert_eq!(syms, ["u_t", "u_tt", "u_x", "u_xt", "u_xx"]);
}

#[test]
fn parses_trivial_inputs() {
    assert_eq!(p("0"), Expr::zero());
    assert_eq!(p("u_xt - u_tx"), Expr::zero());
    assert_eq!(p("0.25"), Expr::Rational(rat(1, 4)));
    assert_eq!(p("x^(1/2)"), p("sqrt(x)"));
    assert_eq!(p("2^-1"), Expr::Rational(rat(1, 2)));
    assert_eq!(p("-x^2"), p("-(x^2)"));
}

#[test]
fn parse_errors_carry_positions() {
    match parse("x + * t") {
        Err(parse::ParseError::Syntax { pos, .. }) => assert_eq!(pos, 4),
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(parse("frob(x+1)"), Err(parse::ParseError::UnknownFunction { .. })));
    assert!(matches!(parse("u_xq"), Err(parse::ParseError::MalformedJet { .. })));
    assert!(matches!(parse("u_"), Err(parse::ParseError::MalformedJet { .. })));
    assert!(parse("(x + t").is_err());
    assert!(parse("x/0").is_err());
}

#[test]
fn unknown_function_syntax() {
    let e = p("f(x,t) + xi1 + eta_xu");
    let names: Vec<String> = e.free_symbols().iter().map(|s| s.name().to_string()).collect();
    assert!(names.contains(&"f".to_string()));
    assert!(names.contains(&"eta_xu".to_string()));
    let f = e.free_symbols().into_iter().find(|s| s.name() == "f").unwrap();
    assert!(matches!(f.kind(), SymbolKind::UnknownFunction { .. }));
    // xi1 depends on x: its x-derivative is the tagged symbol xi1_x
    assert_eq!(p("xi1").differentiate(&x()), p("xi1_x"));
    assert_eq!(p("f(x,t)").differentiate(&Symbol::dependent("u")), Expr::zero());
}

#[test]
fn normalize_examples() {
    assert!(p("(x+u)^2 - x^2 - 2*x*u - u^2").is_zero());
    assert_eq!(p("sin(x)*cos(x)*2"), p("2*cos(x)*sin(x)"));
    // hand-expanded numerator
    let a = p("((1-u_t^2)*u_xx + 2*u_x*u_t*u_xt)/(1+u_x^2)");
    let b = p("(u_xx - u_t^2*u_xx + 2*u_x*u_t*u_xt)/(1+u_x^2)");
    assert!((a - b).is_zero());
}

#[test]
fn normal_form_shape() {
    fn check(e: &Expr) {
        match e {
            Expr::Sum(v) | Expr::Product(v) => {
                assert!(v.len() >= 2, "short node in {e}");
                for c in v {
                    assert!(std::mem::discriminant(c) != std::mem::discriminant(e), "nested node in {e}");
                    check(c);
                }
            }
            Expr::Power(b, _) | Expr::Func(_, b) => check(b),
            Expr::Rational(r) => assert!(r.denom() > &num_bigint::BigInt::from(0)),
            Expr::Symbol(_) => {}
        }
    }
    for s in [
        "(x+t)^3/(x-t)",
        "x*t*u/(x*t)",
        "sin(x+t)^2 + cos(x+t)^2",
        "(1+u_x^2)^(-2)*u_t",
        "exp(-x)*exp(x)",
    ] {
        check(&p(s));
    }
}

#[test]
fn rational_functions_cancel() {
    assert_eq!(p("(x^2 - t^2)/(x - t)"), p("x + t"));
    assert_eq!(p("(x^2 + 2*x*t + t^2)/(x^2 - t^2)"), p("(x+t)/(x-t)"));
    assert_eq!(p("x/x"), Expr::one());
}

#[test]
fn trig_and_hyperbolic_identities() {
    assert_eq!(p("sin(x)^2 + cos(x)^2"), Expr::one());
    assert_eq!(p("cosh(eps)^2 - sinh(eps)^2"), Expr::one());
    assert_eq!(p("sin(-x)"), p("-sin(x)"));
    assert_eq!(p("cosh(-x)"), p("cosh(x)"));
    assert_eq!(p("exp(-x)*exp(x)"), Expr::one());
    assert_eq!(p("sqrt(x)^2"), p("x"));
    assert_eq!(p("sqrt(4)"), Expr::int(2));
}

#[test]
fn addition_formulas_expand() {
    let e = p("cosh(a+b) - cosh(a)*cosh(b) - sinh(a)*sinh(b)");
    assert!(e.expand_addition_formulas().is_zero());
    let e = p("exp(2*a) - exp(a)^2");
    assert!(e.expand_addition_formulas().is_zero());
    let e = p("sin(a - b) - sin(a)*cos(b) + cos(a)*sin(b)");
    assert!(e.expand_addition_formulas().is_zero());
}

#[test]
fn differentiate_examples() {
    let e = p("(1+u_x^2)*u_tt");
    assert_eq!(e.differentiate(&ux()), p("2*u_x*u_tt"));
    assert_eq!(p("sinh(x)").differentiate(&x()), p("cosh(x)"));
    assert_eq!(p("x").differentiate(&t()), Expr::zero());
    assert_eq!(p("arctan(x^2)").differentiate(&x()), p("2*x/(1+x^4)"));
    assert_eq!(p("sqrt(t^2-x^2)").differentiate(&x()), p("-x/sqrt(t^2-x^2)"));
    assert_eq!(p("log(x)").differentiate(&x()), p("1/x"));
    assert_eq!(p("tan(x)").differentiate(&x()), p("1 + tan(x)^2"));
}

#[test]
fn substitute_examples() {
    let mut b = BTreeMap::new();
    b.insert(x(), Expr::sym(&t()));
    assert_eq!(p("x + t").substitute(&b).unwrap(), p("2*t"));

    let mut b = BTreeMap::new();
    b.insert(x(), p("x + eps"));
    assert_eq!(p("x^2").substitute(&b).unwrap(), p("x^2 + 2*x*eps + eps^2"));

    let mut cyc = BTreeMap::new();
    cyc.insert(x(), Expr::sym(&t()));
    cyc.insert(t(), Expr::sym(&x()));
    assert!(matches!(p("x").substitute(&cyc), Err(ExprError::CyclicBinding(_))));
}

#[test]
fn eval_examples() {
    assert_eq!(p("x + t").eval(&env(&[("x", 1.0), ("t", 2.0)])).unwrap(), 3.0);
    let v = p("cosh(eps)*cosh(eps) - sinh(eps)*sinh(eps)");
    assert!((v.eval(&env(&[("eps", 0.7)])).unwrap() - 1.0).abs() < 1e-12);
    // jets of u = sqrt(t^2 - x^2) written out by hand
    let (xv, tv) = (0.3f64, 1.0f64);
    let u = (tv * tv - xv * xv).sqrt();
    let jets = env(&[
        ("u_x", -xv / u),
        ("u_t", tv / u),
        ("u_xx", -tv * tv / u.powi(3)),
        ("u_xt", xv * tv / u.powi(3)),
        ("u_tt", -xv * xv / u.powi(3)),
    ]);
    let bi = p("(1-u_t^2)*u_xx + 2*u_x*u_t*u_xt - (1+u_x^2)*u_tt");
    assert!(bi.eval(&jets).unwrap().abs() < 1e-9);
}

#[test]
fn eval_errors() {
    assert!(matches!(p("x + q").eval(&env(&[("x", 1.0)])), Err(ExprError::Unbound(n)) if n == "q"));
    assert!(matches!(p("log(x)").eval(&env(&[("x", -1.0)])), Err(ExprError::Domain(_))));
    assert!(matches!(p("sqrt(x)").eval(&env(&[("x", -1.0)])), Err(ExprError::Domain(_))));
    assert!(matches!(p("1/x").eval(&env(&[("x", 0.0)])), Err(ExprError::Domain(_))));
}

#[test]
fn poly_coeffs_examples() {
    let e = p("a*u_x^2 + b*u_x*u_t");
    let c = e.poly_coeffs(&[ux(), ut()]).unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(c[&Monomial(vec![2, 0])], p("a"));
    assert_eq!(c[&Monomial(vec![1, 1])], p("b"));
    assert!(Expr::zero().poly_coeffs(&[ux()]).unwrap().is_empty());
    assert!(p("1/u_x").poly_coeffs(&[ux()]).is_err());
    assert!(p("sin(u_x)").poly_coeffs(&[ux()]).is_err());
    // coefficients may carry a denominator free of the variables
    let c = p("u_x/(1+a^2)").poly_coeffs(&[ux()]).unwrap();
    assert_eq!(c[&Monomial(vec![1])], p("1/(1+a^2)"));
}

#[test]
fn printing_round_trips() {
    for s in [
        "(1-u_t^2)*u_xx + 2*u_x*u_t*u_xt - (1+u_x^2)*u_tt",
        "-x/sqrt(t^2-x^2)",
        "3/4*x - 1/2",
        "exp(-eps)*x",
        "(x+t)/(x-t)^2",
        "arctan((x^2-t^2+2)/sqrt((x^2-t^2)*(t^2-x^2-4)))",
    ] {
        let e = p(s);
        let back = parse(&e.to_string()).unwrap();
        assert_eq!(back, e, "round trip of {s} via {e}");
    }
}

// ---- property tests ----

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-3i64..4).prop_map(Expr::int),
        Just(Expr::sym(&x())),
        Just(Expr::sym(&t())),
        Just(Expr::sym(&Symbol::dependent("u"))),
        Just(Expr::sym(&ux())),
        Just(Expr::sym(&Symbol::parameter("a"))),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Product),
            (inner.clone(), 0i64..3).prop_map(|(b, n)| b.powi(n)),
            inner.clone().prop_map(|a| Expr::func(FuncTag::Sin, a)),
            inner.prop_map(|a| Expr::func(FuncTag::Exp, a)),
        ]
    })
}

/// Polynomial expressions only, for coefficient and evaluation checks.
fn arb_poly() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Product),
            (inner, 0i64..3).prop_map(|(b, n)| b.powi(n)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(e in arb_expr()) {
        let n = e.normalize();
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn product_rule(f in arb_expr(), g in arb_expr()) {
        let s = x();
        let lhs = (f.clone() * g.clone()).differentiate(&s);
        let rhs = f.differentiate(&s) * g.clone() + f * g.differentiate(&s);
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn differentiation_is_linear(f in arb_expr(), g in arb_expr(), k in -3i64..4) {
        let s = Symbol::dependent("u");
        let lhs = (f.clone() + Expr::int(k) * g.clone()).differentiate(&s);
        let rhs = f.differentiate(&s) + Expr::int(k) * g.differentiate(&s);
        prop_assert!((lhs - rhs).is_zero());
    }

    #[test]
    fn parse_print_round_trip(e in arb_expr()) {
        let n = e.normalize();
        let back = parse(&n.to_string()).unwrap();
        prop_assert!(back.equiv(&n), "{} reparsed as {}", n, back);
    }

    #[test]
    fn poly_coeffs_reassemble(e in arb_poly()) {
        let vars = [x(), Symbol::dependent("u")];
        let coeffs = e.poly_coeffs(&vars).unwrap();
        let rebuilt = sum(coeffs.iter().map(|(m, c)| m.to_expr(&vars) * c.clone()));
        prop_assert!(rebuilt.equiv(&e));
        for c in coeffs.values() {
            prop_assert!(!vars.iter().any(|v| c.contains_symbol(v)));
        }
    }

    #[test]
    fn eval_respects_normalization(
        e in arb_poly(),
        xs in -2.0f64..2.0, ts in -2.0f64..2.0, us in -2.0f64..2.0,
        uxs in -2.0f64..2.0, a in -2.0f64..2.0,
    ) {
        let en = env(&[("x", xs), ("t", ts), ("u", us), ("u_x", uxs), ("a", a)]);
        let v1 = e.eval(&en).unwrap();
        let v2 = e.normalize().eval(&en).unwrap();
        prop_assert!((v1 - v2).abs() <= 1e-9 * (1.0 + v1.abs()), "{} vs {}", v1, v2);
    }
}

#[test]
fn gcd_and_exact_division() {
    let a = p("(x + y)*(x - t)");
    let b = p("(x + y)*(u + 1)");
    let g = a.poly_gcd(&b).unwrap();
    assert!(g.poly_div_exact(&p("x + y")).unwrap().as_rational().is_some());
    assert_eq!(a.poly_div_exact(&p("x - t")).unwrap(), p("x + y"));
    assert!(a.poly_div_exact(&p("u")).is_none());
    assert!(p("1/x").poly_gcd(&a).is_none());
    assert_eq!(p("2*x").poly_div_exact(&p("x/3")).unwrap(), p("6"));
}

#[test]
fn parallel_substitution_swaps() {
    let b: BTreeMap<Symbol, Expr> = [(x(), p("t")), (t(), p("x"))].into_iter().collect();
    assert!(p("x - 2*t").substitute(&b).is_err());
    assert_eq!(p("x - 2*t").substitute_parallel(&b).unwrap(), p("t - 2*x"));
}

#[test]
fn structural_derivative_agrees_numerically() {
    let en = env(&[("x", 0.3), ("t", 1.4), ("c1", 1.1)]);
    for s in [
        "sqrt(2*c1*exp(x/c1) + 8*c1^3*exp(-x/c1) + 4*t^2)",
        "c1*arctan((x^2 - t^2 + 2*c1^2)/sqrt((x^2 - t^2)*(-x^2 + t^2 - 4*c1^2)))",
        "log(t + x^2)*tan(x) - cosh(x*t)/sinh(t)",
        "x*t^3 - 5",
    ] {
        let e = p(s);
        for v in [x(), t()] {
            let a = e.differentiate(&v).eval(&en).unwrap();
            let b = e.differentiate_structural(&v).eval(&en).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{s}: {a} vs {b}");
        }
    }
    assert_eq!(p("x + 2").differentiate_structural(&t()), Expr::zero());
}
