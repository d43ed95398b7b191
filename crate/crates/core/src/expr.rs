//! Parameter expressions over named slots.
//!
//! A [`ParamExpr`] is a rational expression in the free parameters and `q`,
//! e.g. `-a*q/c` or `c*d/(a*b)`. The exact backend evaluates it to a
//! [`QMonomial`]; the numeric backend to a complex number. Integer slots
//! (`r`, `s`, `m`, `n`) enter through affine [`IndexExpr`]s such as the
//! exponent in `q^(1+r)` or the bound `r+s-k`.

use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{parse_rational, QMonomial};

/// `constant + k_coeff * k + sum(coeff * slot)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexExpr {
    pub constant: i64,
    pub k_coeff: i64,
    pub slots: BTreeMap<String, i64>,
}

impl IndexExpr {
    pub fn constant(c: i64) -> Self {
        IndexExpr { constant: c, ..Default::default() }
    }

    pub fn k() -> Self {
        IndexExpr { k_coeff: 1, ..Default::default() }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let toks = tokenize(s)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.affine()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in index `{s}`")));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &Assignment, k: i64) -> Result<i64> {
        let mut v = self.constant + self.k_coeff * k;
        for (name, c) in &self.slots {
            v += c * env.int(name)?;
        }
        Ok(v)
    }

    /// Substitutes integer slots, leaving the dependence on `k`.
    pub fn resolve(&self, env: &Assignment) -> Result<Affine> {
        Ok(Affine { constant: self.eval(env, 0)?, k_coeff: self.k_coeff })
    }

    fn add(mut self, other: &IndexExpr, sign: i64) -> Self {
        self.constant += sign * other.constant;
        self.k_coeff += sign * other.k_coeff;
        for (n, c) in &other.slots {
            *self.slots.entry(n.clone()).or_default() += sign * c;
        }
        self.slots.retain(|_, c| *c != 0);
        self
    }

    fn scale(mut self, f: i64) -> Self {
        self.constant *= f;
        self.k_coeff *= f;
        for c in self.slots.values_mut() {
            *c *= f;
        }
        self.slots.retain(|_, c| *c != 0);
        self
    }

    fn is_constant(&self) -> bool {
        self.k_coeff == 0 && self.slots.is_empty()
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (n, c) in &self.slots {
            parts.push(match c {
                1 => n.clone(),
                -1 => format!("-{n}"),
                c => format!("{c}*{n}"),
            });
        }
        match self.k_coeff {
            0 => {}
            1 => parts.push("k".into()),
            -1 => parts.push("-k".into()),
            c => parts.push(format!("{c}*k")),
        }
        if self.constant != 0 || parts.is_empty() {
            parts.push(self.constant.to_string());
        }
        let s = parts.join("+").replace("+-", "-");
        write!(f, "{s}")
    }
}

/// Affine function of the summation index with integer slots substituted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub constant: i64,
    pub k_coeff: i64,
}

impl Affine {
    pub fn at(&self, k: i64) -> i64 {
        self.constant + self.k_coeff * k
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ParamExpr {
    Rat(Rational),
    Slot(String),
    /// `q^e`
    QPow(IndexExpr),
    Neg(Box<ParamExpr>),
    Add(Box<ParamExpr>, Box<ParamExpr>),
    Sub(Box<ParamExpr>, Box<ParamExpr>),
    Mul(Box<ParamExpr>, Box<ParamExpr>),
    Div(Box<ParamExpr>, Box<ParamExpr>),
    Pow(Box<ParamExpr>, i64),
}

/// Parses a parameter expression, panicking on malformed input. For
/// hard-coded catalog templates.
pub fn p(s: &str) -> ParamExpr {
    ParamExpr::parse(s).unwrap_or_else(|e| panic!("bad template `{s}`: {e}"))
}

impl ParamExpr {
    pub fn parse(s: &str) -> Result<Self> {
        let toks = tokenize(s)?;
        let mut parser = Parser { toks, pos: 0 };
        let e = parser.expr()?;
        if parser.pos != parser.toks.len() {
            return Err(Error::Parse(format!("trailing input in `{s}`")));
        }
        Ok(e)
    }

    pub fn one() -> Self {
        ParamExpr::Rat(Rational::from(1))
    }

    pub fn zero() -> Self {
        ParamExpr::Rat(Rational::new())
    }

    /// Exact value as a monomial. Sums must combine like exponents.
    pub fn eval_mono(&self, env: &Assignment) -> Result<QMonomial> {
        Ok(match self {
            ParamExpr::Rat(r) => QMonomial::constant(r.clone()),
            ParamExpr::Slot(name) => env.mono(name)?,
            ParamExpr::QPow(e) => QMonomial::q_pow(e.eval(env, 0)?),
            ParamExpr::Neg(a) => a.eval_mono(env)?.neg(),
            ParamExpr::Add(a, b) => add_mono(&a.eval_mono(env)?, &b.eval_mono(env)?, self)?,
            ParamExpr::Sub(a, b) => add_mono(&a.eval_mono(env)?, &b.eval_mono(env)?.neg(), self)?,
            ParamExpr::Mul(a, b) => a.eval_mono(env)?.mul(&b.eval_mono(env)?),
            ParamExpr::Div(a, b) => a.eval_mono(env)?.div(&b.eval_mono(env)?)?,
            ParamExpr::Pow(a, n) => a.eval_mono(env)?.pow(*n)?,
        })
    }

    /// Replaces slot names by expressions (used to swap `a` and `b`).
    pub fn subst(&self, map: &BTreeMap<String, ParamExpr>) -> ParamExpr {
        let bx = |e: &ParamExpr| Box::new(e.subst(map));
        match self {
            ParamExpr::Slot(n) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            ParamExpr::Rat(_) | ParamExpr::QPow(_) => self.clone(),
            ParamExpr::Neg(a) => ParamExpr::Neg(bx(a)),
            ParamExpr::Add(a, b) => ParamExpr::Add(bx(a), bx(b)),
            ParamExpr::Sub(a, b) => ParamExpr::Sub(bx(a), bx(b)),
            ParamExpr::Mul(a, b) => ParamExpr::Mul(bx(a), bx(b)),
            ParamExpr::Div(a, b) => ParamExpr::Div(bx(a), bx(b)),
            ParamExpr::Pow(a, n) => ParamExpr::Pow(bx(a), *n),
        }
    }

    /// Slot names referenced, including integer slots in exponents.
    pub fn slots(&self, out: &mut Vec<String>) {
        match self {
            ParamExpr::Slot(n) => out.push(n.clone()),
            ParamExpr::Rat(_) => {}
            ParamExpr::QPow(e) => out.extend(e.slots.keys().cloned()),
            ParamExpr::Neg(a) | ParamExpr::Pow(a, _) => a.slots(out),
            ParamExpr::Add(a, b) | ParamExpr::Sub(a, b) | ParamExpr::Mul(a, b) | ParamExpr::Div(a, b) => {
                a.slots(out);
                b.slots(out);
            }
        }
    }
}

fn add_mono(a: &QMonomial, b: &QMonomial, whole: &ParamExpr) -> Result<QMonomial> {
    if a.is_zero() {
        return Ok(b.clone());
    }
    if b.is_zero() {
        return Ok(a.clone());
    }
    if a.exponent() != b.exponent() {
        return Err(Error::NotMonomial(whole.to_string()));
    }
    Ok(QMonomial::new(Rational::from(a.coeff() + b.coeff()), a.exponent()))
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamExpr::Rat(r) if *r.denom() == 1 && *r >= 0 => write!(f, "{r}"),
            ParamExpr::Rat(r) => write!(f, "({r})"),
            ParamExpr::Slot(n) => write!(f, "{n}"),
            ParamExpr::QPow(e) if e.is_constant() && e.constant == 1 => write!(f, "q"),
            ParamExpr::QPow(e) if e.is_constant() && e.constant >= 0 => write!(f, "q^{}", e.constant),
            ParamExpr::QPow(e) => write!(f, "q^({e})"),
            ParamExpr::Neg(a) => write!(f, "-{a}"),
            ParamExpr::Add(a, b) => write!(f, "({a}+{b})"),
            ParamExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            ParamExpr::Mul(a, b) => write!(f, "{a}*{b}"),
            ParamExpr::Div(a, b) => match **b {
                ParamExpr::Mul(..) | ParamExpr::Div(..) => write!(f, "{a}/({b})"),
                _ => write!(f, "{a}/{b}"),
            },
            ParamExpr::Pow(a, n) => write!(f, "{a}^{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(cs[st..i].iter().collect()));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected `{op}` at token {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = ParamExpr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = ParamExpr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ParamExpr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = ParamExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = ParamExpr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<ParamExpr> {
        if self.eat('-') {
            return Ok(match self.unary()? {
                ParamExpr::Rat(r) => ParamExpr::Rat(-r),
                e => ParamExpr::Neg(Box::new(e)),
            });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<ParamExpr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let exp = self.exponent()?;
        match base {
            ParamExpr::QPow(e) if e.is_constant() && e.constant == 1 => Ok(ParamExpr::QPow(exp)),
            other if exp.is_constant() => Ok(ParamExpr::Pow(Box::new(other), exp.constant)),
            _ => Err(Error::Parse("symbolic exponents are only allowed on q".into())),
        }
    }

    fn exponent(&mut self) -> Result<IndexExpr> {
        if self.eat('(') {
            let e = self.affine()?;
            self.expect(')')?;
            return Ok(e);
        }
        let neg = self.eat('-');
        let e = self.affine_atom()?;
        Ok(if neg { e.scale(-1) } else { e })
    }

    fn atom(&mut self) -> Result<ParamExpr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(ParamExpr::Rat(parse_rational(&n)?))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                if id == "q" {
                    Ok(ParamExpr::QPow(IndexExpr::constant(1)))
                } else {
                    Ok(ParamExpr::Slot(id))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            t => Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }

    fn affine(&mut self) -> Result<IndexExpr> {
        let mut sign = if self.eat('-') { -1 } else { 1 };
        self.eat('+');
        let mut acc = IndexExpr::default();
        loop {
            let t = self.affine_term()?;
            acc = acc.add(&t, sign);
            if self.eat('+') {
                sign = 1;
            } else if self.eat('-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    fn affine_term(&mut self) -> Result<IndexExpr> {
        let a = self.affine_atom()?;
        if self.eat('*') {
            let b = self.affine_atom()?;
            if a.is_constant() {
                return Ok(b.scale(a.constant));
            }
            if b.is_constant() {
                return Ok(a.scale(b.constant));
            }
            return Err(Error::Parse("index expressions must be affine".into()));
        }
        Ok(a)
    }

    fn affine_atom(&mut self) -> Result<IndexExpr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let c: i64 = n.parse().map_err(|_| Error::Parse(format!("bad integer `{n}`")))?;
                Ok(IndexExpr::constant(c))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                if id == "k" {
                    Ok(IndexExpr::k())
                } else {
                    let mut e = IndexExpr::default();
                    e.slots.insert(id, 1);
                    Ok(e)
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.affine()?;
                self.expect(')')?;
                Ok(e)
            }
            t => Err(Error::Parse(format!("unexpected token {t:?} in index"))),
        }
    }
}

/// A value bound to a slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Mono(QMonomial),
    Int(i64),
    /// Exact complex point `re + im*i` for the numeric backend.
    Num(Rational, Rational),
}

impl Value {
    pub fn parse(s: &str) -> Result<Value> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix('i') {
            // split at the last sign that is not leading
            let idx = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
            let (re, im) = match idx {
                Some(i) => (&body[..i], &body[i..]),
                None => ("0", body),
            };
            let im = match im.trim() {
                "" | "+" => "1",
                "-" => "-1",
                x => x,
            };
            let im = im.trim_start_matches('+');
            return Ok(Value::Num(parse_rational(re)?, parse_rational(im)?));
        }
        if s.contains('.') {
            return Ok(Value::Num(parse_rational(s)?, Rational::new()));
        }
        let m = ParamExpr::parse(s)?.eval_mono(&Assignment::default())?;
        Ok(Value::Mono(m))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Mono(m) => write!(f, "{m}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Num(re, im) if *im == 0 => write!(f, "{re}"),
            Value::Num(re, im) if *im < 0 => write!(f, "{re}{im}i"),
            Value::Num(re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

/// Slot name to value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    pub values: BTreeMap<String, Value>,
}

impl Assignment {
    /// Parses `name=value, name=value`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut a = Assignment::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) =
                part.split_once('=').ok_or_else(|| Error::Parse(format!("expected name=value, got `{part}`")))?;
            a.values.insert(k.trim().to_string(), Value::parse(v)?);
        }
        Ok(a)
    }

    pub fn with(mut self, name: &str, v: Value) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn get(&self, name: &str) -> Result<&Value> {
        self.values.get(name).ok_or_else(|| Error::UnknownSlot(name.to_string()))
    }

    pub fn mono(&self, name: &str) -> Result<QMonomial> {
        match self.get(name)? {
            Value::Mono(m) => Ok(m.clone()),
            Value::Int(n) => Ok(QMonomial::constant(Rational::from(*n))),
            Value::Num(re, im) if *im == 0 => Ok(QMonomial::constant(re.clone())),
            Value::Num(..) => Err(Error::UnsupportedBackend(format!(
                "slot `{name}` holds a complex point; exact backend needs r*q^m"
            ))),
        }
    }

    pub fn int(&self, name: &str) -> Result<i64> {
        match self.get(name)? {
            Value::Int(n) => Ok(*n),
            Value::Mono(m) if m.exponent() == 0 && *m.coeff().denom() == 1 => {
                m.coeff().numer().to_i64().ok_or_else(|| Error::ConstraintViolation(format!("`{name}` too large")))
            }
            Value::Mono(m) if m.is_zero() => Ok(0),
            v => Err(Error::ConstraintViolation(format!("slot `{name}` must be an integer, got {v}"))),
        }
    }

    /// Renders as `name=value` pairs in slot order.
    pub fn render(&self) -> BTreeMap<String, String> {
        self.values.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.render().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(s: &str) -> Assignment {
        Assignment::parse(s).unwrap()
    }

    #[test]
    fn monomial_evaluation() {
        let e = env("a=2, b=3, c=q, d=q, e=q");
        let m = p("c*d*e/(a*b*q)").eval_mono(&e).unwrap();
        assert_eq!(m, QMonomial::new(Rational::from((1, 6)), 2));
        assert_eq!(p("-a*q/c").eval_mono(&e).unwrap(), QMonomial::new(Rational::from(-2), 0));
        assert_eq!(p("x/(x-1)").eval_mono(&env("x=5")).unwrap(), QMonomial::constant(Rational::from((5, 4))));
        assert!(matches!(p("1-a*q").eval_mono(&e), Err(Error::NotMonomial(_))));
    }

    #[test]
    fn integer_exponents() {
        let e = env("a=2, r=3").with("s", Value::Int(2));
        assert_eq!(p("-a*q^(1+r)").eval_mono(&e).unwrap(), QMonomial::new(Rational::from(-2), 4));
        assert_eq!(p("q^(-s)").eval_mono(&e).unwrap(), QMonomial::q_pow(-2));
        assert_eq!(p("q^-2").eval_mono(&e).unwrap(), QMonomial::q_pow(-2));
        let idx = IndexExpr::parse("r+s-k").unwrap();
        assert_eq!(idx.eval(&e, 1).unwrap(), 4);
        assert_eq!(IndexExpr::parse("2*n").unwrap().eval(&env("n=3"), 0).unwrap(), 6);
    }

    #[test]
    fn values_parse_and_render() {
        assert_eq!(Value::parse("-1/2*q^1").unwrap().to_string(), "-1/2*q^1");
        assert_eq!(Value::parse("2*q").unwrap().to_string(), "2*q^1");
        assert_eq!(Value::parse("0.35+0.1i").unwrap().to_string(), "7/20+1/10i");
        assert_eq!(Value::parse("0.8-0.1i").unwrap().to_string(), "4/5-1/10i");
        assert_eq!(Value::parse("0.3").unwrap(), Value::Num(Rational::from((3, 10)), Rational::new()));
    }

    #[test]
    fn substitution_swaps() {
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), ParamExpr::Slot("b".into()));
        m.insert("b".to_string(), ParamExpr::Slot("a".into()));
        let e = env("a=2, b=3");
        let swapped = p("a*q/b").subst(&m).eval_mono(&e).unwrap();
        assert_eq!(swapped, QMonomial::new(Rational::from((3, 2)), 1));
    }
}
