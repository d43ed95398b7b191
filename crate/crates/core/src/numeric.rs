//! High-precision complex evaluation of the same specs and expressions.

use rug::float::Round;
use rug::{Complex, Float, Integer};
use serde::{Deserialize, Serialize};

use crate::engine::{expand_vwp, ExtraFactor, SeriesKind, SeriesSpec, VwpSpec};
use crate::error::{Error, Result};
use crate::eval::{eval_expr, Backend, Expr};
use crate::expr::{Assignment, IndexExpr, ParamExpr, Value};
use crate::qfunc::PochIndex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericConfig {
    pub precision_bits: u32,
    /// Relative residual threshold for a pass.
    pub tol: f64,
    pub max_terms: usize,
    /// Term ratios at or above this, sustained, mean divergence.
    pub tail_ratio_cutoff: f64,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { precision_bits: 160, tol: 1e-9, max_terms: 5000, tail_ratio_cutoff: 1.0 }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::ConstraintViolation(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if self.max_terms < 32 {
            return Err(Error::ConstraintViolation("max_terms must be at least 32".into()));
        }
        if self.precision_bits < 32 {
            return Err(Error::ConstraintViolation("precision_bits must be at least 32".into()));
        }
        Ok(())
    }

    fn zero_eps(&self) -> Float {
        Float::with_val(self.precision_bits, Float::i_exp(1, 16 - self.precision_bits as i32))
    }

    /// Stopping threshold for terms relative to the partial sum.
    fn stop_eps(&self) -> Float {
        Float::with_val(self.precision_bits, Float::i_exp(1, 10 - self.precision_bits as i32))
    }
}

fn abs(c: &Complex) -> Float {
    Float::with_val(c.prec().0, c.abs_ref())
}

fn finite(c: &Complex, what: &str) -> Result<()> {
    if c.real().is_finite() && c.imag().is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

fn powi(x: &Complex, n: i64) -> Complex {
    let prec = x.prec().0;
    let mut base = x.clone();
    let mut acc = Complex::with_val(prec, 1);
    let mut e = n.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        base = Complex::with_val(prec, base.square_ref());
        e >>= 1;
    }
    if n < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// The complex value of `q` and the parameter values of `env`.
#[derive(Debug, Clone)]
pub struct NumEnv<'a> {
    pub env: &'a Assignment,
    pub q: Complex,
    pub cfg: NumericConfig,
}

impl<'a> NumEnv<'a> {
    pub fn new(env: &'a Assignment, cfg: NumericConfig) -> Result<Self> {
        let prec = cfg.precision_bits;
        let q = match env.get("q")? {
            Value::Num(re, im) => Complex::with_val(prec, (re, im)),
            Value::Mono(m) if m.exponent() == 0 => Complex::with_val(prec, m.coeff()),
            Value::Int(n) => Complex::with_val(prec, *n),
            v => return Err(Error::ConstraintViolation(format!("q must be a number, got {v}"))),
        };
        if abs(&q) >= 1 || q.is_zero() {
            return Err(Error::ConstraintViolation("numeric backend needs 0 < |q| < 1".into()));
        }
        Ok(NumEnv { env, q, cfg })
    }

    fn prec(&self) -> u32 {
        self.cfg.precision_bits
    }

    fn c(&self, v: i64) -> Complex {
        Complex::with_val(self.prec(), v)
    }

    pub fn value(&self, name: &str) -> Result<Complex> {
        Ok(match self.env.get(name)? {
            Value::Num(re, im) => Complex::with_val(self.prec(), (re, im)),
            Value::Int(n) => self.c(*n),
            Value::Mono(m) => {
                let c = Complex::with_val(self.prec(), m.coeff());
                c * powi(&self.q, m.exponent())
            }
        })
    }

    pub fn param(&self, x: &ParamExpr) -> Result<Complex> {
        let prec = self.prec();
        let v = match x {
            ParamExpr::Rat(r) => Complex::with_val(prec, r),
            ParamExpr::Slot(n) => self.value(n)?,
            ParamExpr::QPow(e) => powi(&self.q, e.eval(self.env, 0)?),
            ParamExpr::Neg(a) => -self.param(a)?,
            ParamExpr::Add(a, b) => self.param(a)? + self.param(b)?,
            ParamExpr::Sub(a, b) => self.param(a)? - self.param(b)?,
            ParamExpr::Mul(a, b) => self.param(a)? * self.param(b)?,
            ParamExpr::Div(a, b) => {
                let d = self.param(b)?;
                if d.is_zero() {
                    return Err(Error::NonFinite(format!("division by zero in {x}")));
                }
                self.param(a)? / d
            }
            ParamExpr::Pow(a, n) => powi(&self.param(a)?, *n),
        };
        finite(&v, &x.to_string())?;
        Ok(v)
    }
}

/// Pochhammer value with exactly-zero factors split off, as in the exact
/// backend.
#[derive(Debug, Clone)]
struct PochNum {
    value: Complex,
    zeros: i32,
}

fn poch_parts(a: &Complex, n: i64, step: i64, ne: &NumEnv) -> PochNum {
    let prec = ne.prec();
    let eps = ne.cfg.zero_eps();
    let p = powi(&ne.q, step);
    let mut value = Complex::with_val(prec, 1);
    let mut zeros = 0;
    if a.is_zero() || n == 0 {
        return PochNum { value, zeros };
    }
    let (base, count, inverted) =
        if n > 0 { (a.clone(), n, false) } else { (Complex::with_val(prec, &p / a), -n, true) };
    let mut x = base.clone();
    let mut prod = Complex::with_val(prec, 1);
    for _ in 0..count {
        let f = Complex::with_val(prec, 1 - &x);
        if abs(&f) < eps {
            zeros += 1;
        } else {
            prod *= f;
        }
        x *= &p;
    }
    if !inverted {
        value = prod;
    } else {
        let m = count;
        let pre = powi(&Complex::with_val(prec, -&base), m) * powi(&p, m * (m - 1) / 2);
        value = pre / prod;
        zeros = -zeros;
    }
    PochNum { value, zeros }
}

/// `(a; q^step)_idx` at the numeric point.
pub fn eval_poch_num(a: &Complex, idx: PochIndex, step: i64, ne: &NumEnv) -> Result<Complex> {
    let prec = ne.prec();
    match idx {
        PochIndex::Finite(n) => {
            let v = poch_parts(a, n, step, ne);
            match v.zeros {
                0 => Ok(v.value),
                z if z > 0 => Ok(Complex::new(prec)),
                _ => Err(Error::NonFinite(format!("pole in ({a}; q^{step})_{n}"))),
            }
        }
        PochIndex::Infinite => {
            if step < 1 {
                return Err(Error::ConstraintViolation("infinite product needs step >= 1".into()));
            }
            let p = powi(&ne.q, step);
            let cutoff = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
            let eps = ne.cfg.zero_eps();
            let mut x = a.clone();
            let mut acc = Complex::with_val(prec, 1);
            let mut j = 0usize;
            while abs(&x) >= cutoff {
                let f = Complex::with_val(prec, 1 - &x);
                if abs(&f) < eps {
                    return Err(Error::PochInfiniteZero(format!("({a}; q^{step})_inf")));
                }
                acc *= f;
                x *= &p;
                j += 1;
                if j > 1_000_000 {
                    return Err(Error::NoConvergence { terms: j });
                }
            }
            finite(&acc, "infinite product")?;
            Ok(acc)
        }
    }
}

/// Running Pochhammer `(base; q^step)_{k+shift}` as `k` moves by one.
struct PochState {
    base: Complex,
    p: Complex,
    idx: i64,
    cur: PochNum,
}

impl PochState {
    fn new(base: Complex, shift: i64, step: i64, ne: &NumEnv) -> Self {
        let cur = poch_parts(&base, shift, step, ne);
        PochState { p: powi(&ne.q, step), base, idx: shift, cur }
    }

    fn factor(&self, j: i64, ne: &NumEnv) -> Option<Complex> {
        let x = Complex::with_val(ne.prec(), &self.base * powi(&self.p, j));
        let f = Complex::with_val(ne.prec(), 1 - x);
        (abs(&f) >= ne.cfg.zero_eps()).then_some(f)
    }

    fn forward(&mut self, ne: &NumEnv) {
        if !self.base.is_zero() {
            match self.factor(self.idx, ne) {
                Some(f) => self.cur.value *= f,
                None => self.cur.zeros += 1,
            }
        }
        self.idx += 1;
    }

    fn backward(&mut self, ne: &NumEnv) {
        if !self.base.is_zero() {
            match self.factor(self.idx - 1, ne) {
                Some(f) => self.cur.value /= f,
                None => self.cur.zeros -= 1,
            }
        }
        self.idx -= 1;
    }
}

enum RExtra {
    QPower(i64, i64),
    Kernel(Complex),
    WellPoised(Complex),
    ScaledLimit(Complex),
    QBinom(crate::expr::Affine, crate::expr::Affine),
    Binom(crate::expr::Affine, crate::expr::Affine),
}

struct NumSpec<'a> {
    ne: &'a NumEnv<'a>,
    pre: Complex,
    arg: Complex,
    nums: Vec<(Complex, i64, i64)>,
    dens: Vec<(Complex, i64, i64)>,
    extras: Vec<RExtra>,
}

/// Numeric sum with its stopping data.
#[derive(Debug, Clone)]
pub struct NumSum {
    pub value: Complex,
    pub terms: usize,
    pub tail_bound: f64,
}

impl<'a> NumSpec<'a> {
    fn new(spec: &SeriesSpec, ne: &'a NumEnv<'a>) -> Result<Self> {
        let rp = |t: &crate::engine::PochTerm| Ok((ne.param(&t.base)?, t.shift, t.step));
        let extras = spec
            .extras
            .iter()
            .map(|e| {
                Ok(match e {
                    ExtraFactor::QPower { quad, lin } => RExtra::QPower(*quad, *lin),
                    ExtraFactor::Kernel(u) => RExtra::Kernel(ne.param(u)?),
                    ExtraFactor::WellPoised(u) => RExtra::WellPoised(ne.param(u)?),
                    ExtraFactor::ScaledLimit(u) => RExtra::ScaledLimit(ne.param(u)?),
                    ExtraFactor::QBinom { n, m } => RExtra::QBinom(n.resolve(ne.env)?, m.resolve(ne.env)?),
                    ExtraFactor::Binom { n, m } => RExtra::Binom(n.resolve(ne.env)?, m.resolve(ne.env)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NumSpec {
            ne,
            pre: ne.param(&spec.prefactor)?,
            arg: ne.param(&spec.argument)?,
            nums: spec.numerators.iter().map(rp).collect::<Result<_>>()?,
            dens: spec.denominators.iter().map(rp).collect::<Result<_>>()?,
            extras,
        })
    }

    fn states(&self) -> (Vec<PochState>, Vec<PochState>) {
        let mk = |v: &Vec<(Complex, i64, i64)>| {
            v.iter().map(|(b, s, st)| PochState::new(b.clone(), *s, *st, self.ne)).collect()
        };
        (mk(&self.nums), mk(&self.dens))
    }

    /// Term `k` given the Pochhammer states positioned at `k`.
    fn term(&self, k: i64, nums: &[PochState], dens: &[PochState]) -> Result<Complex> {
        let ne = self.ne;
        let prec = ne.prec();
        let eps = ne.cfg.zero_eps();
        let zero = Complex::new(prec);
        if self.pre.is_zero() || (self.arg.is_zero() && k != 0) {
            return Ok(zero);
        }
        let mut v = self.pre.clone();
        if k != 0 {
            v *= powi(&self.arg, k);
        }
        let (mut zeros, mut poles) = (0, 0);
        for s in nums {
            v *= &s.cur.value;
            if s.cur.zeros > 0 {
                zeros += s.cur.zeros;
            } else {
                poles -= s.cur.zeros;
            }
        }
        for s in dens {
            v /= &s.cur.value;
            if s.cur.zeros < 0 {
                zeros -= s.cur.zeros;
            } else {
                poles += s.cur.zeros;
            }
        }
        for e in &self.extras {
            match e {
                RExtra::QPower(a2, a1) => v *= powi(&ne.q, (a2 * k * k + a1 * k) / 2),
                RExtra::Kernel(u) | RExtra::WellPoised(u) => {
                    let f = Complex::with_val(prec, 1 - Complex::with_val(prec, u * powi(&ne.q, 2 * k)));
                    if abs(&f) < eps {
                        zeros += 1;
                    } else {
                        v *= f;
                    }
                    if let RExtra::WellPoised(_) = e {
                        let d = Complex::with_val(prec, 1 - u);
                        if abs(&d) < eps {
                            poles += 1;
                        } else {
                            v /= d;
                        }
                    }
                }
                RExtra::ScaledLimit(u) => {
                    if k < 0 {
                        return Err(Error::ConstraintViolation("scaled Pochhammer limit needs k >= 0".into()));
                    }
                    let mu = Complex::with_val(prec, -u);
                    v *= powi(&mu, k) * powi(&ne.q, k * (k - 1) / 2);
                }
                RExtra::QBinom(n, m) => {
                    let (n, m) = (n.at(k), m.at(k));
                    if m < 0 || n < 0 || m > n {
                        return Ok(zero);
                    }
                    let qq = |j: i64| poch_parts(&ne.q, j, 1, ne).value;
                    v *= qq(n);
                    v /= qq(m) * qq(n - m);
                }
                RExtra::Binom(n, m) => {
                    let (n, m) = (n.at(k), m.at(k));
                    if m < 0 || n < 0 || m > n {
                        return Ok(zero);
                    }
                    v *= Integer::from(Integer::binomial_u(n as u32, m as u32));
                }
            }
        }
        match (zeros, poles) {
            (0, 0) => {
                finite(&v, &format!("term {k}"))?;
                Ok(v)
            }
            (_, 0) => Ok(zero),
            _ => Err(Error::PoleInTerm { k, detail: "a factor vanishes at the numeric point".into() }),
        }
    }

    fn sum_direction(&self, forward: bool, upper: Option<i64>) -> Result<NumSum> {
        let ne = self.ne;
        let prec = ne.prec();
        let cfg = ne.cfg;
        let (mut nums, mut dens) = self.states();
        let mut acc = Complex::new(prec);
        let stop = cfg.stop_eps();
        let mut small = 0;
        let mut growing = 0;
        let mut last: Option<Float> = None;
        let mut tail = 0.0f64;
        let mut k: i64 = 0;
        if !forward {
            for s in nums.iter_mut().chain(dens.iter_mut()) {
                s.backward(ne);
            }
            k = -1;
        }
        let mut count = 0usize;
        loop {
            if let Some(u) = upper {
                if k > u {
                    break;
                }
            }
            if forward && upper.is_none() && nums.iter().any(|s| s.cur.zeros > 0) {
                break;
            }
            let t = self.term(k, &nums, &dens)?;
            acc += &t;
            count += 1;
            let at = abs(&t);
            if upper.is_none() {
                let scale = abs(&acc);
                if at <= Float::with_val(prec, &stop * &scale) {
                    small += 1;
                } else {
                    small = 0;
                }
                if !at.is_zero() {
                    if let Some(prev) = &last {
                        let r = Float::with_val(prec, &at / prev).to_f64();
                        growing = if r >= cfg.tail_ratio_cutoff { growing + 1 } else { 0 };
                        tail = if r < 1.0 { at.to_f64() * r / (1.0 - r) } else { at.to_f64() };
                    }
                    last = Some(at);
                }
                if small >= 3 {
                    break;
                }
                if count >= cfg.max_terms || (count > 200 && growing > 64) {
                    return Err(Error::NoConvergence { terms: count });
                }
            }
            if forward {
                for s in nums.iter_mut().chain(dens.iter_mut()) {
                    s.forward(ne);
                }
                k += 1;
            } else {
                for s in nums.iter_mut().chain(dens.iter_mut()) {
                    s.backward(ne);
                }
                k -= 1;
            }
        }
        finite(&acc, "partial sum")?;
        Ok(NumSum { value: acc, terms: count, tail_bound: tail })
    }
}

/// Sums `spec` at the numeric point.
pub fn eval_sum_num(spec: &SeriesSpec, ne: &NumEnv) -> Result<NumSum> {
    let ns = NumSpec::new(spec, ne)?;
    match &spec.kind {
        SeriesKind::Unilateral { upper: Some(u) } => ns.sum_direction(true, Some(u.eval(ne.env, 0)?)),
        SeriesKind::Unilateral { upper: None } => ns.sum_direction(true, None),
        SeriesKind::Bilateral => {
            let f = ns.sum_direction(true, None)?;
            let b = ns.sum_direction(false, None)?;
            Ok(NumSum { value: f.value + b.value, terms: f.terms + b.terms, tail_bound: f.tail_bound + b.tail_bound })
        }
    }
}

/// Single term `k` of `spec` at the numeric point, built from scratch.
pub fn term_num(spec: &SeriesSpec, ne: &NumEnv, k: i64) -> Result<Complex> {
    let ns = NumSpec::new(spec, ne)?;
    let mk = |v: &Vec<(Complex, i64, i64)>| -> Vec<PochState> {
        v.iter().map(|(b, s, st)| PochState::new(b.clone(), s + k, *st, ne)).collect()
    };
    ns.term(k, &mk(&ns.nums), &mk(&ns.dens))
}

pub struct NumericBackend<'a> {
    pub ne: NumEnv<'a>,
}

impl Backend for NumericBackend<'_> {
    type Value = Complex;

    fn param(&self, x: &ParamExpr) -> Result<Complex> {
        self.ne.param(x)
    }

    fn sum(&self, spec: &SeriesSpec) -> Result<Complex> {
        Ok(eval_sum_num(spec, &self.ne)?.value)
    }

    fn vwp(&self, spec: &VwpSpec) -> Result<Complex> {
        Ok(eval_sum_num(&expand_vwp(spec), &self.ne)?.value)
    }

    fn poch(&self, base: &ParamExpr, index: Option<i64>, step: i64) -> Result<Complex> {
        let a = self.ne.param(base)?;
        let idx = index.map(PochIndex::Finite).unwrap_or(PochIndex::Infinite);
        eval_poch_num(&a, idx, step, &self.ne)
    }

    fn index(&self, n: &IndexExpr) -> Result<i64> {
        n.eval(self.ne.env, 0)
    }

    fn env(&self) -> &Assignment {
        self.ne.env
    }

    fn one(&self) -> Complex {
        self.ne.c(1)
    }

    fn add(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.ne.prec(), a + b)
    }

    fn sub(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.ne.prec(), a - b)
    }

    fn mul(&self, a: &Complex, b: &Complex) -> Complex {
        Complex::with_val(self.ne.prec(), a * b)
    }

    fn div(&self, a: &Complex, b: &Complex) -> Result<Complex> {
        if b.is_zero() {
            return Err(Error::NonFinite("division by zero".into()));
        }
        let v = Complex::with_val(self.ne.prec(), a / b);
        finite(&v, "quotient")?;
        Ok(v)
    }

    fn neg(&self, a: &Complex) -> Complex {
        Complex::with_val(self.ne.prec(), -a)
    }
}

pub fn evaluate_numeric(e: &Expr, env: &Assignment, cfg: NumericConfig) -> Result<Complex> {
    let ne = NumEnv::new(env, cfg)?;
    eval_expr(e, &NumericBackend { ne })
}

/// `|l - r| / max(|l|, |r|, 1)`.
pub fn relative_residual(l: &Complex, r: &Complex) -> f64 {
    let prec = l.prec().0.max(r.prec().0);
    let diff = abs(&Complex::with_val(prec, l - r));
    let mut den = Float::with_val(prec, 1);
    den.max_mut(&abs(l));
    den.max_mut(&abs(r));
    Float::with_val(prec, &diff / &den).to_f64_round(Round::Up)
}
