//! q-shifted factorials `(a;q^s)_n` for finite, negative and infinite `n`,
//! Gaussian binomials and the scaled Pochhammer limit.
//!
//! Negative indices go through
//! `(a;p)_{-n} = (-p/a)^n p^{n(n-1)/2} / (p/a;p)_n` with `p = q^s`.

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::series::{LaurentSeries, QMonomial};

/// Truncation order used for values that are exact polynomials.
pub(crate) const EXACT: i64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PochIndex {
    Finite(i64),
    Infinite,
}

/// Finite Pochhammer of a monomial base, split into the product of its
/// nonzero factors and a signed count of exactly-zero factors
/// (positive: zero in the numerator, negative: zero in a denominator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PochValue {
    pub value: LaurentSeries,
    pub zeros: i32,
}

/// Factor layout of `(m; q^step)_n` for a monomial base.
struct FactorPlan {
    prefactor: QMonomial,
    /// (coefficient, exponent) of each `1 - c q^e`
    factors: Vec<(Rational, i64)>,
    inverted: bool,
}

fn factor_plan(m: &QMonomial, n: i64, step: i64) -> FactorPlan {
    if m.is_zero() || n == 0 {
        return FactorPlan { prefactor: QMonomial::one(), factors: vec![], inverted: false };
    }
    if n > 0 {
        let factors = (0..n).map(|j| (m.coeff().clone(), m.exponent() + step * j)).collect();
        return FactorPlan { prefactor: QMonomial::one(), factors, inverted: false };
    }
    let n = -n;
    // p/a with p = q^step
    let b = QMonomial::q_pow(step).div(m).expect("nonzero base");
    let prefactor = b.neg().pow(n).expect("nonzero").shift(step * n * (n - 1) / 2);
    let factors = (0..n).map(|j| (b.coeff().clone(), b.exponent() + step * j)).collect();
    FactorPlan { prefactor, factors, inverted: true }
}

/// q-order and zero count of `(m; q^step)_n` without expanding it.
pub fn poch_order(m: &QMonomial, n: i64, step: i64) -> (i64, i32) {
    let plan = factor_plan(m, n, step);
    let mut order = 0;
    let mut zeros = 0;
    for (c, e) in &plan.factors {
        if *e == 0 && *c == 1 {
            zeros += 1;
        } else {
            order += (*e).min(0);
        }
    }
    let pre = plan.prefactor.order().unwrap_or(0);
    if plan.inverted {
        (pre - order, -zeros)
    } else {
        (order, zeros)
    }
}

/// Dense product of binomials `1 - c q^e`, exact through `order`.
fn binomial_product(factors: &[(Rational, i64)], order: i64) -> (LaurentSeries, i32) {
    let neg_total: i64 = factors.iter().map(|(_, e)| (*e).min(0)).sum();
    let lo_min = neg_total;
    let cap = (order - neg_total).max(0);
    let width = (cap - lo_min + 1) as usize;
    let mut buf = vec![Rational::new(); width];
    let at = |x: i64| (x - lo_min) as usize;
    buf[at(0)] = Rational::from(1);
    let (mut lo, mut hi) = (0i64, 0i64);
    let mut zeros = 0;
    for (c, e) in factors {
        let e = *e;
        if e == 0 {
            if *c == 1 {
                zeros += 1;
                continue;
            }
            let f = 1 - c.clone();
            for x in lo..=hi {
                buf[at(x)] *= &f;
            }
            continue;
        }
        let nlo = lo.min(lo + e);
        let nhi = hi.max(hi + e).min(cap);
        if e > 0 {
            for x in (nlo..=nhi).rev() {
                let src = x - e;
                if src >= lo && src <= hi {
                    let t = Rational::from(c * &buf[at(src)]);
                    buf[at(x)] -= t;
                }
            }
        } else {
            for x in nlo..=nhi {
                let src = x - e;
                if src >= lo && src <= hi {
                    let t = Rational::from(c * &buf[at(src)]);
                    buf[at(x)] -= t;
                }
            }
        }
        lo = nlo;
        hi = nhi;
    }
    let series = LaurentSeries::from_terms(
        buf.into_iter().enumerate().map(|(i, c)| (i as i64 + lo_min, c)).filter(|(e, _)| *e <= order),
        order,
    );
    (series, zeros)
}

/// `(m; q^step)_n` for a monomial base and any finite `n`, exact through
/// `order`, with zero factors split off.
pub fn poch_mono(m: &QMonomial, n: i64, step: i64, order: i64) -> Result<PochValue> {
    let plan = factor_plan(m, n, step);
    if !plan.inverted {
        let (value, zeros) = binomial_product(&plan.factors, order);
        return Ok(PochValue { value, zeros });
    }
    let pre_order = plan.prefactor.exponent();
    let inner_order = (order - pre_order).max(0);
    let (den, zeros) = binomial_product(&plan.factors, inner_order);
    let inv = LaurentSeries::one(EXACT).series_div(&den)?;
    let value = inv.scale(&plan.prefactor).truncate(order);
    Ok(PochValue { value, zeros: -zeros })
}

/// `(m; q^step)_inf` for a monomial base. Bases of negative q-order
/// contribute finitely many Laurent factors.
pub fn poch_mono_inf(m: &QMonomial, step: i64, order: i64) -> Result<LaurentSeries> {
    if step < 1 {
        return Err(Error::ConstraintViolation(format!("infinite product needs a positive step, got {step}")));
    }
    let Some(v) = m.order() else {
        return Ok(LaurentSeries::one(order));
    };
    let neg_total: i64 = (0..).map(|j| v + step * j).take_while(|e| *e < 0).sum();
    let mut factors = Vec::new();
    let mut j = 0;
    loop {
        let e = v + step * j;
        if e > order - neg_total {
            break;
        }
        if e == 0 && *m.coeff() == 1 {
            return Err(Error::PochInfiniteZero(format!("({m}; q^{step})_inf")));
        }
        factors.push((m.coeff().clone(), e));
        j += 1;
    }
    Ok(binomial_product(&factors, order).0)
}

fn one_minus(a: &LaurentSeries) -> LaurentSeries {
    &LaurentSeries::one(EXACT) - a
}

/// `(a; q)_idx` for an arbitrary Laurent-series base.
pub fn poch(a: &LaurentSeries, idx: PochIndex, n: i64) -> Result<LaurentSeries> {
    poch_step(a, idx, 1, n)
}

/// `(a; q^step)_idx` for an arbitrary Laurent-series base, through `q^n`.
pub fn poch_step(a: &LaurentSeries, idx: PochIndex, step: i64, n: i64) -> Result<LaurentSeries> {
    let shifted = |j: i64| a.scale(&QMonomial::q_pow(step * j));
    match idx {
        PochIndex::Finite(m) if m >= 0 => {
            let mut acc = LaurentSeries::one(EXACT);
            for j in 0..m {
                acc = &acc * &one_minus(&shifted(j));
            }
            Ok(acc.truncate(n))
        }
        PochIndex::Finite(m) => {
            let m = -m;
            let p = LaurentSeries::one(EXACT).scale(&QMonomial::q_pow(step));
            let b = p.series_div(a)?;
            let mut den = LaurentSeries::one(EXACT);
            for j in 0..m {
                let f = one_minus(&b.scale(&QMonomial::q_pow(step * j)));
                den = &den * &f;
            }
            let mut pre = LaurentSeries::one(EXACT);
            let neg_b = -&b;
            for _ in 0..m {
                pre = &pre * &neg_b;
            }
            let pre = pre.scale(&QMonomial::q_pow(step * m * (m - 1) / 2));
            Ok(pre.series_div(&den)?.truncate(n))
        }
        PochIndex::Infinite => {
            if step < 1 {
                return Err(Error::ConstraintViolation("infinite product needs step >= 1".into()));
            }
            if a.is_zero() {
                return Ok(LaurentSeries::one(n));
            }
            let v = a.min_order();
            let neg_total: i64 = (0..).map(|j| v + step * j).take_while(|e| *e < 0).sum();
            let mut acc = LaurentSeries::one(EXACT);
            let mut j = 0;
            while v + step * j <= n - neg_total {
                let f = one_minus(&shifted(j));
                if f.is_zero() {
                    return Err(Error::PochInfiniteZero(format!("factor {j} vanishes")));
                }
                acc = &acc * &f;
                j += 1;
            }
            Ok(acc.truncate(n))
        }
    }
}

/// `(a_1, ..., a_m; q)_idx`.
pub fn poch_multi(bases: &[LaurentSeries], idx: PochIndex, n: i64) -> Result<LaurentSeries> {
    let mut acc = LaurentSeries::one(EXACT);
    for b in bases {
        acc = &acc * &poch(b, idx, n)?;
    }
    Ok(acc.truncate(n))
}

/// Gaussian polynomial coefficients, index = exponent of q.
pub fn qbinom_coeffs(n: i64, k: i64) -> Vec<Integer> {
    if k < 0 || n < 0 || k > n {
        return vec![];
    }
    let k = k.min(n - k) as usize;
    let n = n as usize;
    // row[j] holds [i, j] for the current i
    let mut row: Vec<Vec<Integer>> = vec![vec![Integer::from(1)]];
    for i in 1..=n {
        let mut next: Vec<Vec<Integer>> = Vec::with_capacity(k + 1);
        for j in 0..=k.min(i) {
            // [i, j] = [i-1, j-1] + q^j [i-1, j]
            let mut p: Vec<Integer> = if j >= 1 { row[j - 1].clone() } else { vec![] };
            if j < row.len() && j < i {
                let src = &row[j];
                if p.len() < src.len() + j {
                    p.resize(src.len() + j, Integer::new());
                }
                for (t, c) in src.iter().enumerate() {
                    p[t + j] += c;
                }
            }
            next.push(p);
        }
        row = next;
    }
    row.swap_remove(k)
}

/// `[n, k]_q`: zero outside `0 <= k <= n`.
pub fn qbinom(n: i64, k: i64, order: i64) -> LaurentSeries {
    LaurentSeries::from_terms(
        qbinom_coeffs(n, k).into_iter().enumerate().map(|(e, c)| (e as i64, Rational::from(c))),
        order,
    )
}

/// `lim_{t -> 0} (u/t; q)_k t^k = prod_{j<k} (-u q^j)`.
pub fn poch_scaled_limit(u: &LaurentSeries, k: i64, order: i64) -> LaurentSeries {
    let mut acc = LaurentSeries::one(EXACT);
    let neg_u = -u;
    for j in 0..k {
        acc = &acc * &neg_u.scale(&QMonomial::q_pow(j));
    }
    acc.truncate(order)
}

/// Monomial form of [`poch_scaled_limit`]: `(-u)^k q^{k(k-1)/2}`.
pub fn poch_scaled_limit_mono(u: &QMonomial, k: i64) -> QMonomial {
    u.neg().pow(k).expect("k >= 0").shift(k * (k - 1) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::parse_rational;

    fn r(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn mono(c: &str, e: i64, n: i64) -> LaurentSeries {
        LaurentSeries::monomial(r(c), e, n)
    }

    fn poly(cs: &[i64], trunc: i64) -> LaurentSeries {
        LaurentSeries::from_terms(cs.iter().enumerate().map(|(i, c)| (i as i64, Rational::from(*c))), trunc)
    }

    #[test]
    fn empty_product() {
        assert_eq!(poch(&mono("7", 3, 10), PochIndex::Finite(0), 10).unwrap(), LaurentSeries::one(10));
        assert_eq!(poch_multi(&[], PochIndex::Finite(5), 10).unwrap(), LaurentSeries::one(10));
    }

    #[test]
    fn q_pochhammer_three() {
        let expected = &(&poly(&[1, -1], 30) * &poly(&[1, 0, -1], 30)) * &poly(&[1, 0, 0, -1], 30);
        let got = poch(&mono("1", 1, 30), PochIndex::Finite(3), 30).unwrap();
        assert_eq!(got, expected.truncate(30));
        let fast = poch_mono(&QMonomial::q_pow(1), 3, 1, 30).unwrap();
        assert_eq!(fast.value, got);
        assert_eq!(fast.zeros, 0);
    }

    #[test]
    fn negative_index_matches_definition() {
        // (2;q)_{-1} = 1/(2/q;q)_1 = 1/(1 - 2/q) = -q/2 / (1 - q/2)
        let n = 12;
        let via_formula = poch(&mono("2", 0, 40), PochIndex::Finite(-1), n).unwrap();
        let def =
            LaurentSeries::one(40).series_div(&(&LaurentSeries::one(40) - &mono("2", -1, 40))).unwrap().truncate(n);
        assert_eq!(via_formula, def);
        let expected =
            mono("-1/2", 1, 40).series_div(&(&LaurentSeries::one(40) - &mono("1/2", 1, 40))).unwrap().truncate(n);
        assert_eq!(via_formula, expected);
        let fast = poch_mono(&QMonomial::constant(r("2")), -1, 1, n).unwrap();
        assert_eq!(fast.value, def);
    }

    #[test]
    fn pair_of_linear_factors() {
        let q = mono("1", 1, 20);
        let got = poch_multi(&[q.clone(), q], PochIndex::Finite(1), 20).unwrap();
        assert_eq!(got, poly(&[1, -2, 1], 20));
    }

    #[test]
    fn multi_is_product() {
        let a = mono("3/2", 0, 15);
        let b = mono("-2", 1, 15);
        let lhs = poch_multi(&[a.clone(), b.clone()], PochIndex::Finite(2), 15).unwrap();
        let rhs = &poch(&a, PochIndex::Finite(2), 15).unwrap() * &poch(&b, PochIndex::Finite(2), 15).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gaussian_small_cases() {
        assert_eq!(qbinom(5, 0, 20), LaurentSeries::one(20));
        assert_eq!(qbinom(3, 1, 20), poly(&[1, 1, 1], 20));
        assert_eq!(qbinom(4, 2, 20), poly(&[1, 1, 2, 1, 1], 20));
        assert!(qbinom(4, 5, 20).is_zero());
        assert!(qbinom(4, -1, 20).is_zero());
    }

    #[test]
    fn gaussian_matches_subset_count() {
        // [n,k]_q = sum over k-subsets S of {0..n-1} of q^{sum(S) - k(k-1)/2}
        for n in 0..9i64 {
            for k in 0..=n {
                let mut counts = vec![0i64; (k * (n - k) + 1) as usize];
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as i64 != k {
                        continue;
                    }
                    let s: i64 = (0..n).filter(|i| mask & (1 << i) != 0).sum();
                    counts[(s - k * (k - 1) / 2) as usize] += 1;
                }
                assert_eq!(qbinom(n, k, 100), poly(&counts, 100), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn scaled_limit_examples() {
        assert_eq!(poch_scaled_limit(&mono("5", 2, 20), 0, 20), LaurentSeries::one(20));
        // u = -a q with a = 3, k = 2 -> a^2 q^3
        let got = poch_scaled_limit(&mono("-3", 1, 20), 2, 20);
        assert_eq!(got, mono("9", 3, 20));
        let x = mono("7/3", 1, 20);
        assert_eq!(poch_scaled_limit(&x, 1, 20), -&x);
        let m = QMonomial::new(r("-3"), 1);
        assert_eq!(poch_scaled_limit_mono(&m, 2), QMonomial::new(r("9"), 3));
    }

    #[test]
    fn scaled_limit_is_a_limit() {
        // (u/t;q)_k t^k at shrinking t approaches the limit coefficientwise
        let u = QMonomial::new(r("2"), 0);
        let k = 3;
        let target = poch_scaled_limit_mono(&u, k).to_series(20);
        let mut last_err = None;
        for t in ["1/100", "1/10000"] {
            let t = r(t);
            let base = QMonomial::new(Rational::from(u.coeff() / &t), 0);
            let p = poch_mono(&base, k, 1, 20).unwrap().value;
            let scaled = p.scale(&QMonomial::new(crate::series::rat_pow(&t, k), 0));
            let diff = &scaled - &target;
            let err: Rational = diff.terms().map(|(_, c)| c.clone().abs()).fold(Rational::new(), |a, b| a + b);
            if let Some(prev) = last_err {
                assert!(err < prev);
            }
            last_err = Some(err);
        }
    }

    #[test]
    fn infinite_zero_detected() {
        assert!(matches!(poch_mono_inf(&QMonomial::one(), 1, 10), Err(Error::PochInfiniteZero(_))));
        assert!(matches!(poch_mono_inf(&QMonomial::q_pow(-2), 1, 10), Err(Error::PochInfiniteZero(_))));
        assert!(poch(&LaurentSeries::one(10), PochIndex::Infinite, 10).is_err());
    }

    #[test]
    fn infinite_negative_order_base() {
        // (q^-1/4; q)_inf = (1 - q^-1/4) (1/4; q)_inf
        let m = QMonomial::new(r("1/4"), -1);
        let got = poch_mono_inf(&m, 1, 20).unwrap();
        let tail = poch_mono_inf(&QMonomial::constant(r("1/4")), 1, 25).unwrap();
        let expected = tail.mul_binomial(&r("1/4"), -1).truncate(20);
        assert_eq!(got, expected);
        let generic = poch(&m.to_series(60), PochIndex::Infinite, 20).unwrap();
        assert_eq!(generic, got);
    }

    #[test]
    fn infinite_step_two_matches_definition() {
        let m = QMonomial::new(r("4"), 3);
        let got = poch_mono_inf(&m, 2, 30).unwrap();
        let mut acc = LaurentSeries::one(EXACT);
        for j in 0..20 {
            acc = acc.mul_binomial(&r("4"), 3 + 2 * j);
        }
        assert_eq!(got, acc.truncate(30));
    }

    #[test]
    fn zero_counts() {
        // (q^-2; q)_4 contains the factor 1 - q^0
        let v = poch_mono(&QMonomial::q_pow(-2), 4, 1, 10).unwrap();
        assert_eq!(v.zeros, 1);
        assert_eq!(poch_order(&QMonomial::q_pow(-2), 4, 1), (-3, 1));
        // (q;q)_{-2} = 1/(q^-1;q)_2 has a zero in its denominator
        let w = poch_mono(&QMonomial::q_pow(1), -2, 1, 10).unwrap();
        assert_eq!(w.zeros, -1);
        assert_eq!(poch_order(&QMonomial::q_pow(1), -2, 1).1, -1);
    }

    #[test]
    fn order_prediction_matches_series() {
        for (c, e, n, s) in [("3", -2, 5, 1), ("1/2", 1, -4, 1), ("-2", 0, -3, 1), ("5", 3, 6, -1), ("2", -1, -2, 2)] {
            let m = QMonomial::new(r(c), e);
            let (ord, zeros) = poch_order(&m, n, s);
            assert_eq!(zeros, 0);
            let v = poch_mono(&m, n, s, 30).unwrap();
            assert_eq!(v.value.min_order(), ord, "{c} q^{e} n={n} s={s}");
        }
    }
}
