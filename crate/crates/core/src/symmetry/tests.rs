use proptest::prelude::*;

use super::*;
use crate::expr::parse;
use crate::jet::jet;

fn p(s: &str) -> Expr {
    parse(s).unwrap()
}

fn vf(a: &str, b: &str, c: &str) -> VectorField {
    VectorField::parse(a, b, c).unwrap()
}

#[test]
fn characteristic_examples() {
    let g = born_infeld_generators();
    assert_eq!(g[2].characteristic(), Expr::one());
    assert_eq!(g[6].characteristic(), p("u - x*u_x - t*u_t"));
    assert_eq!(g[3].characteristic(), p("-t*u_x - x*u_t"));
}

#[test]
fn prolongation_examples() {
    let g = born_infeld_generators();
    let pr7 = prolong(&g[6], 2);
    assert!(pr7.coeffs[&jet("x")].is_zero());
    assert!(pr7.coeffs[&jet("t")].is_zero());
    assert_eq!(pr7.coeffs[&jet("xx")], p("-u_xx"));
    let pr1 = prolong(&g[0], 2);
    assert!(pr1.coeffs.values().all(Expr::is_zero));
    assert_eq!(pr1.coeffs.len(), 5);
    let pr5 = prolong(&g[4], 2);
    assert_eq!(pr5.coeffs[&jet("x")], p("1 + u_x^2"));
    assert_eq!(pr5.coeffs[&jet("t")], p("u_x*u_t"));
}

#[test]
fn prolongations_agree_on_generators_and_unknowns() {
    let mut fields = born_infeld_generators();
    fields.push(VectorField::unknown());
    fields.push(vf("x^2*u", "sin(t)", "exp(x)*u^2"));
    for v in fields {
        let a = prolong(&v, 2);
        let b = prolong_recursive(&v, 2);
        for (s, phi) in &a.coeffs {
            assert!((phi.clone() - b.coeffs[s].clone()).is_zero(), "{s:?} for {v}");
        }
    }
}

#[test]
fn apply_prolonged_examples() {
    let pde = Pde::born_infeld();
    let g = born_infeld_generators();
    assert!(apply_prolonged(&prolong(&g[0], 2), &pde).is_zero());
    assert!(verify_symmetry(&g[6], &pde).unwrap().exact_zero);
    let uscale = vf("0", "0", "u");
    let chk = verify_symmetry(&uscale, &pde).unwrap();
    assert!(!chk.exact_zero);
}

#[test]
fn verify_symmetry_examples() {
    let pde = Pde::born_infeld();
    for (i, v) in born_infeld_generators().iter().enumerate() {
        assert!(verify_symmetry(v, &pde).unwrap().exact_zero, "v{}", i + 1);
    }
    assert!(!verify_symmetry(&vf("x", "0", "0"), &pde).unwrap().exact_zero);
}

#[test]
fn born_infeld_determining_system() {
    let pde = Pde::born_infeld();
    let ds = determining_system(&pde).unwrap();
    assert!(!ds.raw.is_empty());
    assert!(ds.reduced.len() <= ds.raw.len());
    // every generator satisfies every equation
    for v in born_infeld_generators() {
        for eq in ds.raw.iter().chain(&ds.reduced) {
            let val = eq.terms.iter().map(|(s, c)| {
                let (base, idx) = determining::unknown_parts(s).unwrap();
                let comp = match base {
                    "xi1" => &v.xi1,
                    "xi2" => &v.xi2,
                    _ => &v.eta,
                };
                let d = idx.iter().fold(comp.clone(), |acc, var| {
                    let sym = if var == "u" { crate::jet::u() } else { Symbol::independent(var) };
                    acc.differentiate(&sym)
                });
                c.clone() * d
            });
            assert!(crate::expr::sum(val).is_zero());
        }
    }
}

#[test]
fn ansatz_dimensions() {
    let pde = Pde::born_infeld();
    let ds = determining_system(&pde).unwrap();
    let gens = born_infeld_generators();
    let d0 = solve_ansatz(&ds, 0);
    assert_eq!(d0.dimension, 3);
    assert!(span_equal(&d0.basis, &gens[..3]));
    let d1 = solve_ansatz(&ds, 1);
    assert_eq!(d1.dimension, 7);
    assert!(span_equal(&d1.basis, &gens));
    let d2 = solve_ansatz(&ds, 2);
    assert_eq!(d2.dimension, 7);
    assert!(span_equal(&d2.basis, &gens));
    for v in &d2.basis {
        assert!(verify_symmetry(v, &pde).unwrap().exact_zero);
    }
}

#[test]
fn wave_and_heat_sanity() {
    let wave = Pde::with_default_principal(p("u_tt - u_xx")).unwrap();
    let ds = determining_system(&wave).unwrap();
    let sol = solve_ansatz(&ds, 1);
    for v in [vf("1", "0", "0"), vf("0", "1", "0"), vf("0", "0", "u")] {
        assert!(verify_symmetry(&v, &wave).unwrap().exact_zero);
        let mut with = sol.basis.clone();
        with.push(v);
        assert!(span_equal(&with, &sol.basis));
    }
    let heat = Pde::new(p("u_t - u_xx"), jet("t")).unwrap();
    assert!(!verify_symmetry(&vf("t", "0", "0"), &heat).unwrap().exact_zero);
    let ds = determining_system(&heat).unwrap();
    let sol = solve_ansatz(&ds, 1);
    let mut with = sol.basis.clone();
    with.push(vf("t", "0", "0"));
    assert!(!span_equal(&with, &sol.basis));
}

#[test]
fn brackets_close_on_ansatz_basis() {
    let pde = Pde::born_infeld();
    let basis = solve_ansatz(&determining_system(&pde).unwrap(), 1).basis;
    for a in &basis {
        for b in &basis {
            let mut with = basis.clone();
            with.push(a.bracket(b));
            assert!(span_equal(&with, &basis));
        }
    }
}

#[test]
fn display_is_readable() {
    let g = born_infeld_generators();
    assert_eq!(g[4].to_string(), "-u∂x + x∂u");
    assert_eq!(g[0].to_string(), "∂x");
    assert_eq!(VectorField::zero().to_string(), "0");
}

fn arb_poly_xtu() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-2i64..3).prop_map(Expr::int),
        Just(p("x")),
        Just(p("t")),
        Just(p("u")),
    ];
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::Sum),
            prop::collection::vec(inner, 2..3).prop_map(Expr::Product),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dual_prolongation_agrees(a in arb_poly_xtu(), b in arb_poly_xtu(), c in arb_poly_xtu()) {
        let v = VectorField::new(a, b, c);
        let x = prolong(&v, 2);
        let y = prolong_recursive(&v, 2);
        for (s, phi) in &x.coeffs {
            prop_assert!((phi.clone() - y.coeffs[s].clone()).is_zero());
        }
    }
}
