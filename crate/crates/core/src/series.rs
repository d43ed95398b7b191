//! Exact rationals, q-monomials and the truncated Laurent-series ring Q((q)).
//!
//! A [`LaurentSeries`] carries a truncation order `N`: every coefficient of
//! exponent `<= N` is exact, everything above is unknown. Each operation
//! computes the tightest order its inputs can support and records it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Parses a rational written as `p`, `p/q` or a finite decimal such as `-0.35`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((int_part, frac)) = s.split_once('.') {
        let neg = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac);
        let num: Integer = digits.parse().map_err(|_| Error::Parse(format!("bad decimal `{s}`")))?;
        let den = Integer::from(10).pow(frac.len() as u32);
        let r = Rational::from((num, den));
        return Ok(if neg { -r } else { r });
    }
    s.parse::<Rational>().map_err(|_| Error::Parse(format!("bad rational `{s}`")))
}

/// Nonnegative integer power of a rational, negative powers invert.
pub fn rat_pow(r: &Rational, n: i64) -> Rational {
    if n >= 0 {
        Rational::from(r.pow(n as u32))
    } else {
        Rational::from(r.pow(n.unsigned_abs() as u32)).recip()
    }
}

/// Exact square root of a rational, if it has one.
pub fn rat_sqrt(r: &Rational) -> Option<Rational> {
    if *r < 0 {
        return None;
    }
    let (n, d) = (r.numer(), r.denom());
    if !n.is_perfect_square() || !d.is_perfect_square() {
        return None;
    }
    Some(Rational::from((n.clone().sqrt(), d.clone().sqrt())))
}

/// Longest unit inverse computed densely in one division.
const MAX_DENSE: i64 = 1 << 16;

/// A parameter value `r * q^m` with exact rational `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMonomial {
    coeff: Rational,
    exponent: i64,
}

impl QMonomial {
    pub fn new(coeff: Rational, exponent: i64) -> Self {
        if coeff == 0 {
            Self::zero()
        } else {
            QMonomial { coeff, exponent }
        }
    }

    pub fn zero() -> Self {
        QMonomial { coeff: Rational::new(), exponent: 0 }
    }

    pub fn one() -> Self {
        QMonomial { coeff: Rational::from(1), exponent: 0 }
    }

    pub fn constant(coeff: Rational) -> Self {
        Self::new(coeff, 0)
    }

    pub fn q_pow(exponent: i64) -> Self {
        QMonomial { coeff: Rational::from(1), exponent }
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == 0
    }

    /// q-order, `None` for the zero monomial.
    pub fn order(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.exponent)
    }

    pub fn mul(&self, other: &QMonomial) -> QMonomial {
        QMonomial::new(Rational::from(&self.coeff * &other.coeff), self.exponent + other.exponent)
    }

    pub fn div(&self, other: &QMonomial) -> Result<QMonomial> {
        if other.is_zero() {
            return Err(Error::DivisionByZeroSeries { trunc: 0 });
        }
        Ok(QMonomial::new(Rational::from(&self.coeff / &other.coeff), self.exponent - other.exponent))
    }

    pub fn neg(&self) -> QMonomial {
        QMonomial::new(-self.coeff.clone(), self.exponent)
    }

    pub fn shift(&self, by: i64) -> QMonomial {
        QMonomial::new(self.coeff.clone(), self.exponent + by)
    }

    pub fn pow(&self, n: i64) -> Result<QMonomial> {
        if self.is_zero() {
            return match n {
                0 => Ok(QMonomial::one()),
                n if n > 0 => Ok(QMonomial::zero()),
                _ => Err(Error::DivisionByZeroSeries { trunc: 0 }),
            };
        }
        Ok(QMonomial::new(rat_pow(&self.coeff, n), self.exponent * n))
    }

    /// `Some(m)` when the monomial equals `q^m`.
    pub fn as_q_power(&self) -> Option<i64> {
        (self.coeff == 1).then_some(self.exponent)
    }

    /// Square root as a monomial when the coefficient is a rational square
    /// and the exponent is even.
    pub fn sqrt(&self) -> Option<QMonomial> {
        if self.exponent % 2 != 0 {
            return None;
        }
        rat_sqrt(&self.coeff).map(|c| QMonomial::new(c, self.exponent / 2))
    }

    /// Value at a rational point `q = q0`.
    pub fn eval_at(&self, q0: &Rational) -> Rational {
        if self.is_zero() {
            return Rational::new();
        }
        Rational::from(&self.coeff * &rat_pow(q0, self.exponent))
    }

    pub fn to_series(&self, trunc: i64) -> LaurentSeries {
        LaurentSeries::monomial(self.coeff.clone(), self.exponent, trunc)
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*q^{}", self.coeff, self.exponent)
    }
}

/// Truncated Laurent series in `q` with exact rational coefficients.
///
/// Invariants: no stored exponent exceeds `trunc_order`; no stored
/// coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, Rational>,
    trunc_order: i64,
}

impl LaurentSeries {
    pub fn zero(trunc_order: i64) -> Self {
        LaurentSeries { coeffs: BTreeMap::new(), trunc_order }
    }

    pub fn one(trunc_order: i64) -> Self {
        Self::monomial(Rational::from(1), 0, trunc_order)
    }

    /// `r * q^m`, valid through `q^trunc_order`.
    pub fn monomial(r: Rational, m: i64, trunc_order: i64) -> Self {
        let mut s = Self::zero(trunc_order);
        if r != 0 && m <= trunc_order {
            s.coeffs.insert(m, r);
        }
        s
    }

    pub fn from_terms<I>(terms: I, trunc_order: i64) -> Self
    where
        I: IntoIterator<Item = (i64, Rational)>,
    {
        let mut s = Self::zero(trunc_order);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    fn add_term(&mut self, e: i64, c: Rational) {
        if e > self.trunc_order || c == 0 {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn trunc_order(&self) -> i64 {
        self.trunc_order
    }

    /// Lowest stored exponent; `trunc_order + 1` for the zero series.
    pub fn min_order(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.trunc_order + 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact coefficient of `q^n`.
    pub fn coeff_through(&self, n: i64) -> Result<Rational> {
        if n > self.trunc_order {
            return Err(Error::OrderExceeded { n, trunc: self.trunc_order });
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_default())
    }

    /// True iff every coefficient of exponent `<= n` vanishes.
    pub fn is_zero_through(&self, n: i64) -> Result<bool> {
        if n > self.trunc_order {
            return Err(Error::OrderExceeded { n, trunc: self.trunc_order });
        }
        Ok(self.coeffs.range(..=n).next().is_none())
    }

    /// The series is a single nonzero term (through its truncation order).
    pub fn as_monomial(&self) -> Option<QMonomial> {
        if self.coeffs.len() != 1 {
            return None;
        }
        let (e, c) = self.coeffs.iter().next()?;
        Some(QMonomial::new(c.clone(), *e))
    }

    /// Drops every coefficient above `n` and lowers the truncation order.
    pub fn truncate(&self, n: i64) -> LaurentSeries {
        let n = n.min(self.trunc_order);
        LaurentSeries { coeffs: self.coeffs.range(..=n).map(|(e, c)| (*e, c.clone())).collect(), trunc_order: n }
    }

    pub fn series_add(&self, other: &LaurentSeries) -> LaurentSeries {
        let trunc = self.trunc_order.min(other.trunc_order);
        let mut out = self.truncate(trunc);
        for (e, c) in other.coeffs.range(..=trunc) {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn series_neg(&self) -> LaurentSeries {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            trunc_order: self.trunc_order,
        }
    }

    pub fn series_sub(&self, other: &LaurentSeries) -> LaurentSeries {
        self.series_add(&other.series_neg())
    }

    /// Product. Valid through `min(N_a + v_b, N_b + v_a)` where `v` is the
    /// lowest stored exponent.
    pub fn series_mul(&self, other: &LaurentSeries) -> LaurentSeries {
        let trunc = (self.trunc_order + other.min_order()).min(other.trunc_order + self.min_order());
        let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                if e > trunc {
                    break;
                }
                let p = Rational::from(ca * cb);
                *acc.entry(e).or_default() += p;
            }
        }
        acc.retain(|_, c| *c != 0);
        LaurentSeries { coeffs: acc, trunc_order: trunc }
    }

    /// Multiplication by an exact monomial; shifts the truncation order.
    pub fn scale(&self, m: &QMonomial) -> LaurentSeries {
        if m.is_zero() {
            return LaurentSeries::zero(self.trunc_order);
        }
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + m.exponent(), Rational::from(c * m.coeff()))).collect(),
            trunc_order: self.trunc_order + m.exponent(),
        }
    }

    /// Multiplication by the exact binomial `1 - c q^e`.
    pub fn mul_binomial(&self, c: &Rational, e: i64) -> LaurentSeries {
        if *c == 0 {
            return self.clone();
        }
        let trunc = self.trunc_order.min(self.trunc_order + e);
        let mut out = self.truncate(trunc);
        for (ex, cx) in self.coeffs.range(..=trunc - e) {
            out.add_term(ex + e, -Rational::from(cx * c));
        }
        out
    }

    /// Laurent division: factor out the leading monomial of `other`, invert
    /// the remaining unit power series, multiply.
    pub fn series_div(&self, other: &LaurentSeries) -> Result<LaurentSeries> {
        let (&v, lead) = other.coeffs.iter().next().ok_or(Error::DivisionByZeroSeries { trunc: other.trunc_order })?;
        let lead_inv = lead.clone().recip();
        // unit u = other / (lead q^v), valid through other.trunc - v
        let unit_trunc = other.trunc_order - v;
        let mut result_trunc = self.trunc_order.min(unit_trunc + self.min_order()) - v;
        if other.coeffs.len() == 1 {
            return Ok(self.scale(&QMonomial::new(lead_inv, -v)).truncate(result_trunc));
        }
        let inv_len = (result_trunc + v - self.min_order()).min(unit_trunc).min(MAX_DENSE);
        result_trunc = result_trunc.min(inv_len + self.min_order() - v);
        let unit: Vec<(i64, Rational)> =
            other.coeffs.iter().skip(1).map(|(e, c)| (e - v, Rational::from(c * &lead_inv))).collect();
        let mut inv: Vec<Rational> = Vec::with_capacity(inv_len.max(0) as usize + 1);
        if inv_len >= 0 {
            inv.push(Rational::from(1));
            for n in 1..=inv_len {
                let mut s = Rational::new();
                for (i, u) in &unit {
                    if *i > n {
                        break;
                    }
                    s -= Rational::from(u * &inv[(n - i) as usize]);
                }
                inv.push(s);
            }
        }
        let inv_series =
            LaurentSeries::from_terms(inv.into_iter().enumerate().map(|(i, c)| (i as i64, c)), inv_len.max(-1));
        let out = self.series_mul(&inv_series);
        let scaled = out.scale(&QMonomial::new(lead_inv, -v));
        Ok(scaled.truncate(result_trunc))
    }

    /// Evaluates the stored coefficients at `q = q0`.
    pub fn eval_at(&self, q0: &Rational) -> Rational {
        let mut s = Rational::new();
        for (e, c) in &self.coeffs {
            s += Rational::from(c * &rat_pow(q0, *e));
        }
        s
    }
}

/// `r * q^m` valid through `q^n`.
pub fn make_monomial(r: Rational, m: i64, n: i64) -> LaurentSeries {
    LaurentSeries::monomial(r, m, n)
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.series_add(rhs)
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.series_sub(rhs)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.series_mul(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.series_neg()
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "O(q^{})", self.trunc_order + 1);
        }
        for (i, (e, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*q^{e}")?;
        }
        write!(f, " + O(q^{})", self.trunc_order + 1)
    }
}
