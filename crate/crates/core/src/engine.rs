//! Unilateral and bilateral basic hypergeometric sums over the exact
//! backend, the very-well-poised builder and the q-order growth check.
//!
//! A term is
//! `pre * z^k * prod (n_i; q^s)_{k+t} / prod (d_j; q^s)_{k+t} * extras(k)`.
//! Terms with `k < 0` use the negative-index Pochhammer, which is the
//! `k -> -k-1` rewrite applied factor by factor.

use serde::Serialize;

use crate::error::{Direction, Error, Result};
use crate::expr::{p, Affine, Assignment, IndexExpr, ParamExpr};
use crate::qfunc::{poch_mono, poch_order, poch_scaled_limit_mono, qbinom, EXACT};
use crate::series::{LaurentSeries, QMonomial};

/// `(base; q^step)_{k + shift}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PochTerm {
    pub base: ParamExpr,
    pub shift: i64,
    pub step: i64,
}

impl PochTerm {
    pub fn new(base: ParamExpr) -> Self {
        PochTerm { base, shift: 0, step: 1 }
    }
}

/// Per-term factors beyond the Pochhammer quotient.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtraFactor {
    /// `q^{(quad k^2 + lin k)/2}`
    QPower { quad: i64, lin: i64 },
    /// `1 - u q^{2k}`
    Kernel(ParamExpr),
    /// `(1 - u q^{2k}) / (1 - u)`
    WellPoised(ParamExpr),
    /// `lim_{t->0} (u/t; q)_k t^k`
    ScaledLimit(ParamExpr),
    /// Gaussian binomial `[n, m]_q` with affine `n`, `m`.
    QBinom { n: IndexExpr, m: IndexExpr },
    /// Ordinary binomial `C(n, m)`.
    Binom { n: IndexExpr, m: IndexExpr },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesKind {
    /// `k >= 0`, optionally stopping at an explicit upper index.
    Unilateral {
        upper: Option<IndexExpr>,
    },
    Bilateral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    pub kind: SeriesKind,
    pub numerators: Vec<PochTerm>,
    pub denominators: Vec<PochTerm>,
    pub argument: ParamExpr,
    pub prefactor: ParamExpr,
    pub extras: Vec<ExtraFactor>,
}

impl SeriesSpec {
    pub fn unilateral(argument: &str) -> Self {
        SeriesSpec {
            kind: SeriesKind::Unilateral { upper: None },
            numerators: vec![],
            denominators: vec![],
            argument: p(argument),
            prefactor: ParamExpr::one(),
            extras: vec![],
        }
    }

    pub fn bilateral(argument: &str) -> Self {
        SeriesSpec { kind: SeriesKind::Bilateral, ..Self::unilateral(argument) }
    }

    /// Sum over `0 <= k <= upper`.
    pub fn finite(argument: &str, upper: &str) -> Self {
        let upper = IndexExpr::parse(upper).expect("bad upper index");
        SeriesSpec { kind: SeriesKind::Unilateral { upper: Some(upper) }, ..Self::unilateral(argument) }
    }

    pub fn num(self, base: &str) -> Self {
        self.num_at(base, 0, 1)
    }

    pub fn den(self, base: &str) -> Self {
        self.den_at(base, 0, 1)
    }

    pub fn num_at(mut self, base: &str, shift: i64, step: i64) -> Self {
        self.numerators.push(PochTerm { base: p(base), shift, step });
        self
    }

    pub fn den_at(mut self, base: &str, shift: i64, step: i64) -> Self {
        self.denominators.push(PochTerm { base: p(base), shift, step });
        self
    }

    pub fn prefactor(mut self, pre: &str) -> Self {
        self.prefactor = p(pre);
        self
    }

    pub fn qpower(mut self, quad: i64, lin: i64) -> Self {
        self.extras.push(ExtraFactor::QPower { quad, lin });
        self
    }

    pub fn kernel(mut self, u: &str) -> Self {
        self.extras.push(ExtraFactor::Kernel(p(u)));
        self
    }

    pub fn well_poised(mut self, u: &str) -> Self {
        self.extras.push(ExtraFactor::WellPoised(p(u)));
        self
    }

    pub fn scaled_limit(mut self, u: &str) -> Self {
        self.extras.push(ExtraFactor::ScaledLimit(p(u)));
        self
    }

    pub fn qbinom(mut self, n: &str, m: &str) -> Self {
        let (n, m) = (IndexExpr::parse(n).expect("bad index"), IndexExpr::parse(m).expect("bad index"));
        self.extras.push(ExtraFactor::QBinom { n, m });
        self
    }

    pub fn binom(mut self, n: &str, m: &str) -> Self {
        let (n, m) = (IndexExpr::parse(n).expect("bad index"), IndexExpr::parse(m).expect("bad index"));
        self.extras.push(ExtraFactor::Binom { n, m });
        self
    }

    /// Applies a slot substitution to every parameter expression.
    pub fn subst(&self, map: &std::collections::BTreeMap<String, ParamExpr>) -> SeriesSpec {
        let pt = |t: &PochTerm| PochTerm { base: t.base.subst(map), ..t.clone() };
        SeriesSpec {
            kind: self.kind.clone(),
            numerators: self.numerators.iter().map(pt).collect(),
            denominators: self.denominators.iter().map(pt).collect(),
            argument: self.argument.subst(map),
            prefactor: self.prefactor.subst(map),
            extras: self
                .extras
                .iter()
                .map(|e| match e {
                    ExtraFactor::Kernel(u) => ExtraFactor::Kernel(u.subst(map)),
                    ExtraFactor::WellPoised(u) => ExtraFactor::WellPoised(u.subst(map)),
                    ExtraFactor::ScaledLimit(u) => ExtraFactor::ScaledLimit(u.subst(map)),
                    other => other.clone(),
                })
                .collect(),
        }
    }
}

/// Very-well-poised series in `a` with the given tail parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct VwpSpec {
    pub a: ParamExpr,
    pub tail: Vec<ParamExpr>,
    pub argument: ParamExpr,
    pub bilateral: bool,
}

/// Expands a very-well-poised spec. The pair `(q sqrt(a), -q sqrt(a))` over
/// `(sqrt(a), -sqrt(a))` is emitted as the kernel `(1 - a q^{2k})/(1 - a)`;
/// unilateral series also carry the `(a)_k / (q)_k` pair.
pub fn build_vwp(spec: &VwpSpec, env: &Assignment) -> Result<SeriesSpec> {
    let a = spec.a.eval_mono(env)?;
    if a.is_zero() || a.sqrt().is_none() {
        return Err(Error::NotAPerfectSquare(a.to_string()));
    }
    Ok(expand_vwp(spec))
}

/// The expansion of [`build_vwp`] without the perfect-square check, for
/// backends that never need `sqrt(a)` as a monomial.
pub fn expand_vwp(spec: &VwpSpec) -> SeriesSpec {
    let mut out = SeriesSpec {
        kind: if spec.bilateral { SeriesKind::Bilateral } else { SeriesKind::Unilateral { upper: None } },
        numerators: vec![],
        denominators: vec![],
        argument: spec.argument.clone(),
        prefactor: ParamExpr::one(),
        extras: vec![ExtraFactor::WellPoised(spec.a.clone())],
    };
    if !spec.bilateral {
        out.numerators.push(PochTerm::new(spec.a.clone()));
        out.denominators.push(PochTerm::new(p("q")));
    }
    for t in &spec.tail {
        out.numerators.push(PochTerm::new(t.clone()));
        let aq = ParamExpr::Mul(Box::new(spec.a.clone()), Box::new(p("q")));
        out.denominators.push(PochTerm::new(ParamExpr::Div(Box::new(aq), Box::new(t.clone()))));
    }
    out
}

/// How term q-orders behave beyond the fitted breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Growth {
    /// Explicit upper bound: `terms` summands.
    Finite { terms: i64 },
    /// Every term at index `|k| >= end` vanishes exactly.
    Terminating { end: i64 },
    /// Term order at `|k| = start + i` is `base + slope*i + curvature*i(i-1)/2`.
    Quadratic { start: i64, base: i64, slope: i64, curvature: i64 },
}

impl Growth {
    /// Order increase per unit step of `k` at the breakpoint.
    pub fn rate(&self) -> Option<i64> {
        match self {
            Growth::Quadratic { slope, .. } => Some(*slope),
            _ => None,
        }
    }

    /// First `|k|` beyond which every term has order `> n`.
    fn end(&self, n: i64) -> i64 {
        match *self {
            Growth::Finite { terms } => terms,
            Growth::Terminating { end } => end,
            Growth::Quadratic { start, base, slope, curvature } => {
                let mut i = 0i64;
                loop {
                    let order = base + slope * i + curvature * i * (i - 1) / 2;
                    if order > n && slope + curvature * i > 0 {
                        return start + i;
                    }
                    i += 1;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Admissibility {
    Admissible { forward: Growth, backward: Option<Growth> },
    Inadmissible { direction: Direction },
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible { .. })
    }
}

#[derive(Debug, Clone)]
enum RExtra {
    QPower(i64, i64),
    Kernel(QMonomial),
    WellPoised(QMonomial),
    ScaledLimit(QMonomial),
    QBinom(Affine, Affine),
    Binom(Affine, Affine),
}

#[derive(Debug, Clone)]
struct RPoch {
    base: QMonomial,
    shift: i64,
    step: i64,
}

/// A spec with every parameter expression evaluated to a monomial.
#[derive(Debug, Clone)]
struct Resolved {
    upper: Option<i64>,
    bilateral: bool,
    pre: QMonomial,
    arg: QMonomial,
    nums: Vec<RPoch>,
    dens: Vec<RPoch>,
    extras: Vec<RExtra>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Zero,
    Pole(String),
    Order(i64),
}

fn resolve(spec: &SeriesSpec, env: &Assignment) -> Result<Resolved> {
    let rp =
        |t: &PochTerm| -> Result<RPoch> { Ok(RPoch { base: t.base.eval_mono(env)?, shift: t.shift, step: t.step }) };
    let extras = spec
        .extras
        .iter()
        .map(|e| {
            Ok(match e {
                ExtraFactor::QPower { quad, lin } => RExtra::QPower(*quad, *lin),
                ExtraFactor::Kernel(u) => RExtra::Kernel(u.eval_mono(env)?),
                ExtraFactor::WellPoised(u) => RExtra::WellPoised(u.eval_mono(env)?),
                ExtraFactor::ScaledLimit(u) => RExtra::ScaledLimit(u.eval_mono(env)?),
                ExtraFactor::QBinom { n, m } => RExtra::QBinom(n.resolve(env)?, m.resolve(env)?),
                ExtraFactor::Binom { n, m } => RExtra::Binom(n.resolve(env)?, m.resolve(env)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (upper, bilateral) = match &spec.kind {
        SeriesKind::Unilateral { upper } => (upper.as_ref().map(|u| u.eval(env, 0)).transpose()?, false),
        SeriesKind::Bilateral => (None, true),
    };
    Ok(Resolved {
        upper,
        bilateral,
        pre: spec.prefactor.eval_mono(env)?,
        arg: spec.argument.eval_mono(env)?,
        nums: spec.numerators.iter().map(rp).collect::<Result<_>>()?,
        dens: spec.denominators.iter().map(rp).collect::<Result<_>>()?,
        extras,
    })
}

fn binom_int(n: i64, m: i64) -> rug::Integer {
    if m < 0 || n < 0 || m > n {
        return rug::Integer::new();
    }
    rug::Integer::from(rug::Integer::binomial_u(n as u32, m as u32))
}

impl Resolved {
    /// q-order of term `k`, or whether it vanishes or has a pole.
    fn shape(&self, k: i64) -> Result<Shape> {
        if self.pre.is_zero() {
            return Ok(Shape::Zero);
        }
        let mut order = self.pre.exponent();
        if self.arg.is_zero() {
            if k != 0 {
                return Ok(Shape::Zero);
            }
        } else {
            order += k * self.arg.exponent();
        }
        let (mut zeros, mut poles) = (0i32, 0i32);
        let mut pole_detail = String::new();
        for (list, sign) in [(&self.nums, 1i64), (&self.dens, -1i64)] {
            for t in list {
                let (o, z) = poch_order(&t.base, k + t.shift, t.step);
                order += sign * o;
                let z = if sign > 0 { z } else { -z };
                if z > 0 {
                    zeros += z;
                } else if z < 0 {
                    poles -= z;
                    pole_detail = format!("({}; q^{})_{} vanishes", t.base, t.step, k + t.shift);
                }
            }
        }
        for e in &self.extras {
            match e {
                RExtra::QPower(a2, a1) => order += (a2 * k * k + a1 * k) / 2,
                RExtra::Kernel(u) | RExtra::WellPoised(u) => {
                    if u.is_zero() {
                        continue;
                    }
                    let ex = u.exponent() + 2 * k;
                    if ex == 0 && *u.coeff() == 1 {
                        zeros += 1;
                    } else {
                        order += ex.min(0);
                    }
                    if let RExtra::WellPoised(_) = e {
                        if u.exponent() == 0 && *u.coeff() == 1 {
                            poles += 1;
                            pole_detail = "well-poised head equals 1".into();
                        } else {
                            order -= u.exponent().min(0);
                        }
                    }
                }
                RExtra::ScaledLimit(u) => {
                    if k < 0 {
                        return Err(Error::ConstraintViolation("scaled Pochhammer limit needs k >= 0".into()));
                    }
                    if u.is_zero() {
                        if k > 0 {
                            return Ok(Shape::Zero);
                        }
                    } else {
                        order += poch_scaled_limit_mono(u, k).exponent();
                    }
                }
                RExtra::QBinom(n, m) => {
                    let (n, m) = (n.at(k), m.at(k));
                    if m < 0 || n < 0 || m > n {
                        return Ok(Shape::Zero);
                    }
                }
                RExtra::Binom(n, m) => {
                    if binom_int(n.at(k), m.at(k)) == 0 {
                        return Ok(Shape::Zero);
                    }
                }
            }
        }
        Ok(match (zeros, poles) {
            (0, 0) => Shape::Order(order),
            (_, 0) => Shape::Zero,
            (0, _) => Shape::Pole(pole_detail),
            _ => Shape::Pole(format!("indeterminate 0/0 ({pole_detail})")),
        })
    }

    /// Index beyond which term orders follow their asymptotic pattern.
    fn breakpoint(&self) -> i64 {
        let mut m = 0i64;
        for t in self.nums.iter().chain(&self.dens) {
            m = m.max(t.base.exponent().abs() + t.shift.abs());
        }
        for e in &self.extras {
            match e {
                RExtra::Kernel(u) | RExtra::WellPoised(u) | RExtra::ScaledLimit(u) => m = m.max(u.exponent().abs()),
                RExtra::QBinom(n, mm) | RExtra::Binom(n, mm) => m = m.max(n.constant.abs()).max(mm.constant.abs()),
                RExtra::QPower(..) => {}
            }
        }
        4 + 2 * m
    }

    fn growth(&self, dir: Direction) -> Result<Option<Growth>> {
        let sgn = if dir == Direction::Forward { 1 } else { -1 };
        let start = self.breakpoint();
        let mut orders = Vec::with_capacity(5);
        let mut zero = 0;
        for i in 0..5 {
            let k = sgn * (start + i);
            match self.shape(k)? {
                Shape::Zero => zero += 1,
                Shape::Pole(_) => return Err(self.first_pole(sgn, k)),
                Shape::Order(o) => orders.push(o),
            }
        }
        if zero == 5 {
            return Ok(Some(Growth::Terminating { end: start }));
        }
        if zero > 0 {
            return Err(Error::ConstraintViolation(format!(
                "irregular vanishing pattern of terms in the {dir} direction"
            )));
        }
        let (o0, o1, o2, o3) = (orders[0], orders[1], orders[2], orders[3]);
        let slope = o1 - o0;
        let curvature = o2 - 2 * o1 + o0;
        debug_assert_eq!(o3 - 3 * o2 + 3 * o1 - o0, 0, "term orders are not quadratic in k");
        if curvature > 0 || (curvature == 0 && slope > 0) {
            Ok(Some(Growth::Quadratic { start, base: o0, slope, curvature }))
        } else {
            Ok(None)
        }
    }

    /// The pole closest to `k = 0` in direction `sgn`, up to `limit`.
    fn first_pole(&self, sgn: i64, limit: i64) -> Error {
        let from = if sgn > 0 { 0 } else { -1 };
        let mut k = from;
        loop {
            if let Ok(Shape::Pole(detail)) = self.shape(k) {
                return Error::PoleInTerm { k, detail };
            }
            if k == limit {
                unreachable!("pole at {limit} not found again");
            }
            k += sgn;
        }
    }

    /// First `k >= 0` at which a numerator factor vanishes for good, if
    /// that happens before any pole.
    fn termination(&self) -> Result<Option<i64>> {
        for k in 0..=self.breakpoint() + 4 {
            let dead = self.nums.iter().any(|t| k + t.shift > 0 && poch_order(&t.base, k + t.shift, t.step).1 > 0);
            if dead {
                return Ok(Some(k));
            }
            if let Shape::Pole(detail) = self.shape(k)? {
                return Err(Error::PoleInTerm { k, detail });
            }
        }
        Ok(None)
    }

    fn admissibility(&self) -> Result<Admissibility> {
        if let Some(u) = self.upper {
            return Ok(Admissibility::Admissible { forward: Growth::Finite { terms: (u + 1).max(0) }, backward: None });
        }
        if !self.bilateral {
            if let Some(end) = self.termination()? {
                return Ok(Admissibility::Admissible { forward: Growth::Terminating { end }, backward: None });
            }
        }
        let Some(forward) = self.growth(Direction::Forward)? else {
            return Ok(Admissibility::Inadmissible { direction: Direction::Forward });
        };
        if !self.bilateral {
            return Ok(Admissibility::Admissible { forward, backward: None });
        }
        match self.growth(Direction::Backward)? {
            Some(b) => Ok(Admissibility::Admissible { forward, backward: Some(b) }),
            None => Ok(Admissibility::Inadmissible { direction: Direction::Backward }),
        }
    }

    /// Monomial part of term `k`: prefactor, argument power, q-powers,
    /// scaled limits and ordinary binomials.
    fn term_monomial(&self, k: i64) -> Result<QMonomial> {
        let mut m = self.pre.clone();
        if !(self.arg.is_zero() && k == 0) {
            m = m.mul(&self.arg.pow(k)?);
        }
        for e in &self.extras {
            match e {
                RExtra::QPower(a2, a1) => m = m.shift((a2 * k * k + a1 * k) / 2),
                RExtra::ScaledLimit(u) => m = m.mul(&poch_scaled_limit_mono(u, k)),
                RExtra::Binom(n, mm) => {
                    let b = rug::Rational::from(binom_int(n.at(k), mm.at(k)));
                    m = m.mul(&QMonomial::constant(b));
                }
                _ => {}
            }
        }
        Ok(m)
    }

    /// Exact value of term `k` through `q^n`; `None` if it vanishes or has
    /// order above `n`.
    fn term(&self, k: i64, n: i64) -> Result<Option<LaurentSeries>> {
        match self.shape(k)? {
            Shape::Zero => return Ok(None),
            Shape::Pole(detail) => return Err(Error::PoleInTerm { k, detail }),
            Shape::Order(o) if o > n => return Ok(None),
            Shape::Order(_) => {}
        }
        let mono = self.term_monomial(k)?;
        let mut slack: i64 = 0;
        for t in self.nums.iter().chain(&self.dens) {
            slack -= poch_order(&t.base, k + t.shift, t.step).0.min(0);
        }
        let mut local = n - mono.exponent() + 2 * slack + 2;
        for _ in 0..6 {
            let v = self.term_series(k, local)?.scale(&mono);
            if v.trunc_order() >= n {
                return Ok(Some(v.truncate(n)));
            }
            local += (n - v.trunc_order()).max(4);
        }
        Err(Error::OrderBudget { needed: n, reached: local })
    }

    fn term_series(&self, k: i64, local: i64) -> Result<LaurentSeries> {
        let order = |t: &RPoch| poch_order(&t.base, k + t.shift, t.step).0;
        let mut total: i64 = self.nums.iter().map(order).sum::<i64>() - self.dens.iter().map(order).sum::<i64>();
        for e in &self.extras {
            if let RExtra::Kernel(u) | RExtra::WellPoised(u) = e {
                if !u.is_zero() {
                    total += (u.exponent() + 2 * k).min(0);
                }
            }
            if let RExtra::WellPoised(u) = e {
                total -= u.exponent().min(0);
            }
        }
        // each factor is needed to the same relative precision
        let rel = (local - total).max(0) + 2;
        let mut num = LaurentSeries::one(EXACT);
        let mut den = LaurentSeries::one(EXACT);
        for t in &self.nums {
            num = &num * &poch_mono(&t.base, k + t.shift, t.step, order(t) + rel)?.value;
        }
        for t in &self.dens {
            den = &den * &poch_mono(&t.base, k + t.shift, t.step, order(t) + rel)?.value;
        }
        for e in &self.extras {
            match e {
                RExtra::Kernel(u) => num = num.mul_binomial(u.coeff(), u.exponent() + 2 * k),
                RExtra::WellPoised(u) => {
                    num = num.mul_binomial(u.coeff(), u.exponent() + 2 * k);
                    den = den.mul_binomial(u.coeff(), u.exponent());
                }
                RExtra::QBinom(nn, mm) => num = &num * &qbinom(nn.at(k), mm.at(k), EXACT),
                _ => {}
            }
        }
        num.truncate((local + den.min_order()).max(num.min_order())).series_div(&den)
    }

    fn sum(&self, n: i64) -> Result<LaurentSeries> {
        let (lo, hi) = match self.upper {
            Some(u) => (0, u),
            None => match self.admissibility()? {
                Admissibility::Inadmissible { direction } => return Err(Error::InadmissibleSeries { direction }),
                Admissibility::Admissible { forward, backward } => {
                    let hi = forward.end(n) - 1;
                    let lo = backward.map(|b| 1 - b.end(n)).unwrap_or(0);
                    (lo, hi)
                }
            },
        };
        let mut acc = LaurentSeries::zero(n);
        for k in lo..=hi {
            if let Some(t) = self.term(k, n)? {
                acc = &acc + &t;
            }
        }
        Ok(acc)
    }
}

/// Admissibility verdict of `spec` under `env`.
pub fn growth_check(spec: &SeriesSpec, env: &Assignment) -> Result<Admissibility> {
    resolve(spec, env)?.admissibility()
}

/// Sum over `k >= 0` (or up to the spec's upper index) through `q^n`.
pub fn sum_unilateral(spec: &SeriesSpec, env: &Assignment, n: i64) -> Result<LaurentSeries> {
    let mut r = resolve(spec, env)?;
    r.bilateral = false;
    r.sum(n)
}

/// Sum over all integers `k` through `q^n`.
pub fn sum_bilateral(spec: &SeriesSpec, env: &Assignment, n: i64) -> Result<LaurentSeries> {
    let mut r = resolve(spec, env)?;
    r.bilateral = true;
    r.upper = None;
    r.sum(n)
}

/// Sums according to the spec's own kind.
pub fn sum_series(spec: &SeriesSpec, env: &Assignment, n: i64) -> Result<LaurentSeries> {
    resolve(spec, env)?.sum(n)
}

/// Exact value of a single term, through `q^n`. Zero terms give the zero
/// series.
pub fn term_exact(spec: &SeriesSpec, env: &Assignment, k: i64, n: i64) -> Result<LaurentSeries> {
    Ok(resolve(spec, env)?.term(k, n)?.unwrap_or_else(|| LaurentSeries::zero(n)))
}
