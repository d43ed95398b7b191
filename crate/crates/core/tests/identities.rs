use std::collections::BTreeMap;

use qverify_core::catalog::{evaluate_identity_exact, has_terminating_parameter, swap_map};
use qverify_core::engine::term_exact;
use qverify_core::*;
use rug::Rational;

fn env(s: &str) -> Assignment {
    Assignment::parse(s).unwrap()
}

fn exact(v: SeriesValue) -> LaurentSeries {
    match v {
        SeriesValue::Exact(s) => s,
        SeriesValue::Numeric(_) => panic!("expected a series"),
    }
}

fn coeffs_of(s: &LaurentSeries, n: i64) -> Vec<Rational> {
    (0..=n).map(|k| s.coeff_through(k).unwrap()).collect()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from(*x)).collect()
}

#[test]
fn catalog_listing() {
    let ids: Vec<&str> = list_identities().iter().map(|e| e.id).collect();
    let expected = [
        "RECIP2",
        "RECIP4",
        "RECIP5",
        "BAILEY_6PSI6",
        "WATSON_8W7",
        "WATSON_LIMIT",
        "WATSON_ZQ",
        "RHO4_REPS",
        "RHO5_TERM",
        "FIN_RS",
        "FIN_A",
        "FIN_C",
        "PFAFF_FIN",
        "GOULD_181",
        "SYM_QM",
        "RF_GEN",
        "RF_SYM",
        "PARTIAL_D",
        "PARTIAL_1",
        "XI_RECIP",
        "XI_REPS",
        "XI_BILATERAL",
        "JACKSON",
        "THREE_TERM",
        "QUINT_2VAR",
        "QUINT",
        "DEGEN_5TO4",
        "DEGEN_5TO2",
    ];
    assert_eq!(ids, expected);
    assert!(lookup("RECIP5").unwrap().anchor.contains("Theorem 1.3"));
    assert!(matches!(lookup("NOPE"), Err(Error::UnknownIdentity(_))));
}

#[test]
fn rho2_at_symmetry_point() {
    let e = lookup("RECIP2").unwrap();
    let res = residual_exact(e, &env("a=2, b=2"), 30).unwrap();
    assert!(res[0].is_zero());
    let s = evaluate_identity_exact(e, &env("a=2, b=2"), 30).unwrap();
    assert!(s.lhs.is_zero() && s.rhs.is_zero());
}

#[test]
fn rho4_representations_agree() {
    let a = env("a=2, b=3, c=q, d=q");
    let ra = exact(rho(4, RhoRep::RepA, &a, Precision::Order(30)).unwrap());
    let rb = exact(rho(4, RhoRep::RepB, &a, Precision::Order(30)).unwrap());
    let rc = exact(rho(4, RhoRep::RepC, &a, Precision::Order(30)).unwrap());
    assert_eq!(ra, rb);
    assert_eq!(ra, rc);
}

#[test]
fn rho5_direct_and_rho0_agree_termwise() {
    let direct = match rho_expr(5, RhoRep::Direct).unwrap() {
        Expr::Sum(s) => *s,
        _ => unreachable!(),
    };
    let a = env("a=-2/3, b=5/7, c=3*q, d=-1/2*q, e=2*q^2");
    let rho0 = SeriesSpec::unilateral("c*d*e/(a*b*q)")
        .kernel("a*q/b")
        .num("-q/b")
        .num("-a*q/c")
        .num("-a*q/d")
        .num("-a*q/e")
        .den("-a*q")
        .den_at("-c/b", 1, 1)
        .den_at("-d/b", 1, 1)
        .den_at("-e/b", 1, 1);
    let factor = LaurentSeries::one(30).series_add(&LaurentSeries::monomial(Rational::from((7, 5)), 0, 30));
    for k in 0..=8 {
        let t = term_exact(&direct, &a, k, 30).unwrap();
        let u = &term_exact(&rho0, &a, k, 30).unwrap() * &factor;
        assert_eq!(t, u.truncate(30), "k = {k}");
    }
}

#[test]
fn terminating_representation_needs_a_terminating_parameter() {
    let a = env("a=2, b=3, c=q, d=q, e=q");
    assert!(!has_terminating_parameter(&a).unwrap());
    assert_eq!(rho(5, RhoRep::Terminating, &a, Precision::Order(10)).unwrap_err(), Error::TerminationRequired);
    assert!(matches!(rho(3, RhoRep::Two, &a, Precision::Order(10)), Err(Error::ConstraintViolation(_))));
}

#[test]
fn xi_values() {
    let n = 10;
    let at_zero = exact(xi("a", "x", XiForm::Sum, &env("a=3, x=0"), Precision::Order(n)).unwrap());
    assert_eq!(at_zero, LaurentSeries::one(n));
    let s = exact(xi("a", "x", XiForm::Sum, &env("a=3, x=q"), Precision::Order(25)).unwrap());
    let b = exact(xi("a", "x", XiForm::Binom, &env("a=3, x=q"), Precision::Order(25)).unwrap());
    assert_eq!(s, b);
    // brute-force expansion of sum (q;q)_k q^k
    let qq = exact(xi("a", "x", XiForm::Sum, &env("a=q, x=q"), Precision::Order(4)).unwrap());
    assert_eq!(coeffs_of(&qq, 4), ints(&[1, 1, 0, 0, -1]));
}

#[test]
fn evaluate_identity_examples() {
    let g = evaluate_identity_exact(lookup("GOULD_181").unwrap(), &env("n=1"), 5).unwrap();
    assert_eq!(g.lhs, LaurentSeries::monomial(Rational::from(4), 0, 5));
    assert_eq!(g.rhs, g.lhs);
    let f = evaluate_identity_exact(lookup("PFAFF_FIN").unwrap(), &env("r=0, s=0, x=5"), 5).unwrap();
    assert_eq!(f.lhs, LaurentSeries::one(5));
    assert_eq!(f.rhs, LaurentSeries::one(5));
    let r5 = residual_exact(lookup("RECIP5").unwrap(), &env("a=2, b=3, c=q, d=q, e=q"), 40).unwrap();
    assert!(r5[0].is_zero_through(40).unwrap());
}

#[test]
fn residual_examples() {
    let r = residual_exact(lookup("RECIP2").unwrap(), &env("a=2, b=3"), 40).unwrap();
    assert!(r[0].is_zero_through(40).unwrap());
    let r = residual_exact(lookup("RECIP4").unwrap(), &env("a=2, b=2, c=q, d=q"), 40).unwrap();
    assert!(r.iter().all(|s| s.is_zero()));
    let r = residual_exact(lookup("QUINT").unwrap(), &env("a=2*q"), 50).unwrap();
    assert!(r[0].is_zero_through(50).unwrap());
}

#[test]
fn reciprocity_is_antisymmetric() {
    for (id, a) in
        [("RECIP2", "a=2, b=-1/2*q"), ("RECIP4", "a=2, b=3, c=q, d=2*q^2"), ("RECIP5", "a=-2, b=3, c=q, d=q, e=2/3*q")]
    {
        let e = lookup(id).unwrap();
        let orig = env(a);
        let mut swapped = orig.clone();
        swapped.values.insert("a".into(), orig.get("b").unwrap().clone());
        swapped.values.insert("b".into(), orig.get("a").unwrap().clone());
        let s = evaluate_identity_exact(e, &orig, 30).unwrap();
        let t = evaluate_identity_exact(e, &swapped, 30).unwrap();
        assert!(!s.lhs.is_zero_through(30).unwrap(), "{id}");
        assert_eq!(s.lhs, -&t.lhs, "{id}");
        assert!(residual_exact(e, &swapped, 30).unwrap()[0].is_zero_through(30).unwrap());
    }
}

#[test]
fn symmetric_finite_sums_swap_exactly() {
    let e = lookup("SYM_QM").unwrap();
    for m in 0..=6 {
        let a = env(&format!("a=2, b=-1/2*q, d=3, e=5/7*q, m={m}"));
        let l = evaluate_exact(&e.lhs, &a, 30).unwrap();
        let r = evaluate_exact(&e.lhs.subst(&swap_map("a", "b")), &a, 30).unwrap();
        assert_eq!(l, r, "m = {m}");
    }
}

/// The finite identity with a q-binomial at `q = 1` and `c = 1/(1-x)`
/// is the Pfaff-type binomial identity.
#[test]
fn finite_identity_at_q_one_is_the_binomial_identity() {
    let x = Rational::from((3, 7));
    let c = Rational::from(1) / (Rational::from(1) - x.clone());
    let fin_c = lookup("FIN_C").unwrap();
    let pfaff = lookup("PFAFF_FIN").unwrap();
    for r in 0..=6 {
        for s in 0..=6 {
            let a = env(&format!("c={c}, r={r}, s={s}"));
            let lhs = evaluate_exact(&fin_c.lhs, &a, 400).unwrap().eval_at(&Rational::from(1));
            let rhs = evaluate_exact(&fin_c.rhs, &a, 400).unwrap().eval_at(&Rational::from(1));
            assert_eq!(lhs, rhs);
            let b = env(&format!("x={x}, r={r}, s={s}"));
            let p = evaluate_identity_exact(pfaff, &b, 0).unwrap();
            assert_eq!(p.lhs, p.rhs);
            assert_eq!(lhs, p.lhs.coeff_through(0).unwrap());
            assert_eq!(rhs, p.rhs.coeff_through(0).unwrap());
        }
    }
}

#[test]
fn coefficient_tables() {
    let t = coeffs(lookup("QUINT").unwrap(), &env("a=2*q"), 10).unwrap();
    assert!(t.column("residual").unwrap().iter().all(|(_, c)| *c == 0));
    let t = coeffs(lookup("XI_REPS").unwrap(), &env("a=3, x=q"), 6).unwrap();
    let l = t.column("lhs").unwrap();
    assert_eq!(l, t.column("rhs").unwrap());
    let oracle = ints(&[1, -2, -2, 4, 4, 10, -8]);
    assert_eq!(l.iter().map(|(_, c)| c.clone()).collect::<Vec<_>>(), oracle);
    let m = coeffs_expr(&p("-3/2*q^4"), &Assignment::default(), 10).unwrap();
    assert_eq!(m.rows.len(), 1);
}

#[test]
fn degeneration_reproduces_four_parameter_terms() {
    let (five, four) = qverify_core::catalog::degeneration_pair();
    let a = env("a=2, b=3, c=q, d=2*q^2");
    for k in 0..=12 {
        assert_eq!(term_exact(&five, &a, k, 30).unwrap(), term_exact(&four, &a, k, 30).unwrap(), "k = {k}");
    }
}

#[test]
fn substitution_is_consistent() {
    let mut m = BTreeMap::new();
    m.insert("d".to_string(), p("-a*q^(1+r)"));
    let e = lookup("RHO5_TERM").unwrap();
    let a = env("a=2, b=3, c=q, e=q, r=3");
    let direct = evaluate_exact(&rho_expr(5, RhoRep::Direct).unwrap().subst(&m), &a, 30).unwrap();
    assert_eq!(direct, evaluate_exact(&e.lhs, &a, 30).unwrap());
}
