//! Strategies and property checks for the series and Pochhammer primitives.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use qverify_core::qfunc::qbinom_coeffs;
use qverify_core::{poch, poch_mono, qbinom, LaurentSeries, PochIndex, QMonomial};
use rug::{Integer, Rational};

pub type Check = Result<(), TestCaseError>;

const N: i64 = 18;

pub fn rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_filter("nonzero", |(p, _)| *p != 0).prop_map(|(p, q)| Rational::from((p, q)))
}

pub fn mono() -> impl Strategy<Value = QMonomial> {
    (rat(), -2i64..=3).prop_map(|(c, e)| QMonomial::new(c, e))
}

pub fn series() -> impl Strategy<Value = LaurentSeries> {
    (prop::collection::vec((-3i64..=8, rat()), 0..6), 6i64..=14)
        .prop_map(|(terms, trunc)| LaurentSeries::from_terms(terms, trunc))
}

/// Series with a nonzero leading coefficient well below its truncation.
pub fn unit_like() -> impl Strategy<Value = LaurentSeries> {
    (rat(), -2i64..=2, prop::collection::vec((1i64..=6, rat()), 0..4)).prop_map(|(lead, v, rest)| {
        let mut terms = vec![(v, lead)];
        terms.extend(rest.into_iter().map(|(e, c)| (v + e, c)));
        LaurentSeries::from_terms(terms, v + 14)
    })
}

fn agree(a: &LaurentSeries, b: &LaurentSeries) -> bool {
    let n = a.trunc_order().min(b.trunc_order());
    (a - b).is_zero_through(n).unwrap()
}

/// Value of `(m; q)_n` with zero factors kept, through `N`.
fn pv(m: &QMonomial, n: i64) -> LaurentSeries {
    let v = poch_mono(m, n, 1, N + 40).unwrap();
    match v.zeros {
        0 => v.value,
        z if z > 0 => LaurentSeries::zero(N + 40),
        _ => panic!("pole"),
    }
}

fn no_pole(m: &QMonomial, n: i64) -> bool {
    poch_mono(m, n, 1, 4).unwrap().zeros >= 0
}

fn binomial(n: i64, k: i64) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

pub fn poch_recurrence(m: QMonomial, n: i64) -> Check {
    prop_assume!(no_pole(&m, n) && no_pole(&m, n + 1));
    let lhs = pv(&m, n + 1);
    let rhs = pv(&m, n).mul_binomial(m.coeff(), m.exponent() + n);
    prop_assert!(agree(&lhs.truncate(N), &rhs.truncate(N)));
    Ok(())
}

pub fn poch_splitting(m: QMonomial, a: i64, b: i64) -> Check {
    let whole = pv(&m, a + b);
    let split = &pv(&m, a) * &pv(&m.shift(a), b);
    prop_assert!(agree(&whole.truncate(N), &split.truncate(N)));
    Ok(())
}

/// `(a)_{-n} (q^{-n} a)_n = 1`
pub fn negative_index_involution(m: QMonomial, n: i64) -> Check {
    let shifted = m.shift(-n);
    prop_assume!(no_pole(&m, -n) && no_pole(&shifted, n));
    let prod = &pv(&m, -n) * &pv(&shifted, n);
    prop_assert!(agree(&prod.truncate(N), &LaurentSeries::one(N)));
    Ok(())
}

pub fn general_base_matches_monomial(m: QMonomial, n: i64) -> Check {
    let s = m.to_series(N + 40);
    let v = poch(&s, PochIndex::Finite(n), N).unwrap();
    prop_assert!(agree(&v, &pv(&m, n).truncate(N)));
    Ok(())
}

/// Symmetry and `[n,k] = [n-1,k-1] + q^k [n-1,k]`.
pub fn qbinom_symmetry_and_pascal(n: i64, k: i64) -> Check {
    prop_assume!(k <= n);
    prop_assert_eq!(qbinom(n, k, 200), qbinom(n, n - k, 200));
    if n >= 1 && k >= 1 {
        let rhs = &qbinom(n - 1, k - 1, 200) + &qbinom(n - 1, k, 200).scale(&QMonomial::q_pow(k));
        prop_assert_eq!(qbinom(n, k, 200), rhs);
    }
    Ok(())
}

pub fn qbinom_at_one_is_binomial(n: i64, k: i64) -> Check {
    prop_assume!(k <= n);
    let total: Integer = qbinom_coeffs(n, k).into_iter().sum();
    prop_assert_eq!(total, binomial(n, k));
    prop_assert_eq!(qbinom(n, k, 500).eval_at(&Rational::from(1)), Rational::from(binomial(n, k)));
    Ok(())
}

pub fn ring_commutative(a: LaurentSeries, b: LaurentSeries) -> Check {
    prop_assert_eq!(&a + &b, &b + &a);
    prop_assert_eq!(&a * &b, &b * &a);
    Ok(())
}

pub fn ring_associative(a: LaurentSeries, b: LaurentSeries, c: LaurentSeries) -> Check {
    prop_assert!(agree(&(&(&a + &b) + &c), &(&a + &(&b + &c))));
    prop_assert!(agree(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
    Ok(())
}

pub fn ring_distributive(a: LaurentSeries, b: LaurentSeries, c: LaurentSeries) -> Check {
    prop_assert!(agree(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
    Ok(())
}

#[allow(clippy::eq_op)]
pub fn additive_inverse_and_identity(a: LaurentSeries) -> Check {
    prop_assert!((&a - &a).is_zero_through(a.trunc_order()).unwrap());
    prop_assert_eq!(&a * &LaurentSeries::one(1 << 30), a.clone());
    Ok(())
}

pub fn division_undoes_multiplication(a: LaurentSeries, b: LaurentSeries) -> Check {
    let q = (&a * &b).series_div(&b).unwrap();
    prop_assert!(q.trunc_order() >= a.min_order() + 6);
    prop_assert!(agree(&q, &a));
    Ok(())
}
