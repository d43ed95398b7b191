//! Identity sides as expression trees, evaluated by a pluggable backend.

use std::ops;

use crate::engine::{build_vwp, sum_series, SeriesSpec, VwpSpec};
use crate::error::{Error, Result};
use crate::expr::{p, Assignment, IndexExpr, ParamExpr};
use crate::qfunc::{poch_mono, poch_mono_inf, EXACT};
use crate::series::LaurentSeries;

/// One side of an identity: sums, products and arithmetic over parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Param(ParamExpr),
    Sum(Box<SeriesSpec>),
    Vwp(Box<VwpSpec>),
    /// `(b_1, ..., b_m; q^step)_index`, with `None` meaning infinite.
    Poch {
        bases: Vec<ParamExpr>,
        index: Option<IndexExpr>,
        step: i64,
    },
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, IndexExpr),
}

impl Expr {
    pub fn param(s: &str) -> Expr {
        Expr::Param(p(s))
    }

    pub fn sum(spec: SeriesSpec) -> Expr {
        Expr::Sum(Box::new(spec))
    }

    pub fn vwp(spec: VwpSpec) -> Expr {
        Expr::Vwp(Box::new(spec))
    }

    /// `(bases; q)_inf`
    pub fn inf(bases: &[&str]) -> Expr {
        Expr::inf_step(bases, 1)
    }

    pub fn inf_step(bases: &[&str], step: i64) -> Expr {
        Expr::Poch { bases: bases.iter().map(|b| p(b)).collect(), index: None, step }
    }

    /// `(bases; q)_n` with an index expression such as `r` or `1+r+s`.
    pub fn fin(bases: &[&str], n: &str) -> Expr {
        Expr::fin_step(bases, n, 1)
    }

    pub fn fin_step(bases: &[&str], n: &str, step: i64) -> Expr {
        let index = IndexExpr::parse(n).expect("bad index");
        Expr::Poch { bases: bases.iter().map(|b| p(b)).collect(), index: Some(index), step }
    }

    pub fn pow(self, n: &str) -> Expr {
        Expr::Pow(Box::new(self), IndexExpr::parse(n).expect("bad index"))
    }

    /// Applies a slot substitution throughout.
    pub fn subst(&self, map: &std::collections::BTreeMap<String, ParamExpr>) -> Expr {
        let bx = |e: &Expr| Box::new(e.subst(map));
        match self {
            Expr::Param(x) => Expr::Param(x.subst(map)),
            Expr::Sum(s) => Expr::Sum(Box::new(s.subst(map))),
            Expr::Vwp(v) => Expr::Vwp(Box::new(VwpSpec {
                a: v.a.subst(map),
                tail: v.tail.iter().map(|t| t.subst(map)).collect(),
                argument: v.argument.subst(map),
                bilateral: v.bilateral,
            })),
            Expr::Poch { bases, index, step } => {
                Expr::Poch { bases: bases.iter().map(|b| b.subst(map)).collect(), index: index.clone(), step: *step }
            }
            Expr::Add(a, b) => Expr::Add(bx(a), bx(b)),
            Expr::Sub(a, b) => Expr::Sub(bx(a), bx(b)),
            Expr::Mul(a, b) => Expr::Mul(bx(a), bx(b)),
            Expr::Div(a, b) => Expr::Div(bx(a), bx(b)),
            Expr::Neg(a) => Expr::Neg(bx(a)),
            Expr::Pow(a, n) => Expr::Pow(bx(a), n.clone()),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $var:ident) => {
        impl ops::$tr for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr {
                Expr::$var(Box::new(self), Box::new(rhs))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Value domain an [`Expr`] is interpreted in.
pub trait Backend {
    type Value: Clone;

    fn param(&self, x: &ParamExpr) -> Result<Self::Value>;
    fn sum(&self, spec: &SeriesSpec) -> Result<Self::Value>;
    fn vwp(&self, spec: &VwpSpec) -> Result<Self::Value>;
    fn poch(&self, base: &ParamExpr, index: Option<i64>, step: i64) -> Result<Self::Value>;
    fn index(&self, n: &IndexExpr) -> Result<i64>;
    fn env(&self) -> &Assignment;
    fn one(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Self::Value;
}

pub fn eval_expr<B: Backend>(e: &Expr, b: &B) -> Result<B::Value> {
    Ok(match e {
        Expr::Param(x) => b.param(x)?,
        Expr::Sum(s) => b.sum(s)?,
        Expr::Vwp(v) => b.vwp(v)?,
        Expr::Poch { bases, index, step } => {
            let n = index.as_ref().map(|i| b.index(i)).transpose()?;
            let mut acc = b.one();
            for base in bases {
                acc = b.mul(&acc, &b.poch(base, n, *step)?);
            }
            acc
        }
        Expr::Add(x, y) => b.add(&eval_expr(x, b)?, &eval_expr(y, b)?),
        Expr::Sub(x, y) => b.sub(&eval_expr(x, b)?, &eval_expr(y, b)?),
        Expr::Mul(x, y) => b.mul(&eval_expr(x, b)?, &eval_expr(y, b)?),
        Expr::Div(x, y) => b.div(&eval_expr(x, b)?, &eval_expr(y, b)?)?,
        Expr::Neg(x) => b.neg(&eval_expr(x, b)?),
        Expr::Pow(x, n) => {
            let v = eval_expr(x, b)?;
            let n = b.index(n)?;
            let mut acc = b.one();
            for _ in 0..n.unsigned_abs() {
                acc = b.mul(&acc, &v);
            }
            if n < 0 {
                b.div(&b.one(), &acc)?
            } else {
                acc
            }
        }
    })
}

/// Truncated Laurent series through a working order.
pub struct ExactBackend<'a> {
    pub env: &'a Assignment,
    pub order: i64,
}

impl Backend for ExactBackend<'_> {
    type Value = LaurentSeries;

    fn param(&self, x: &ParamExpr) -> Result<LaurentSeries> {
        Ok(x.eval_mono(self.env)?.to_series(EXACT))
    }

    fn sum(&self, spec: &SeriesSpec) -> Result<LaurentSeries> {
        sum_series(spec, self.env, self.order)
    }

    fn vwp(&self, spec: &VwpSpec) -> Result<LaurentSeries> {
        sum_series(&build_vwp(spec, self.env)?, self.env, self.order)
    }

    fn poch(&self, base: &ParamExpr, index: Option<i64>, step: i64) -> Result<LaurentSeries> {
        let m = base.eval_mono(self.env)?;
        match index {
            None => poch_mono_inf(&m, step, self.order),
            Some(n) => {
                let v = poch_mono(&m, n, step, self.order)?;
                match v.zeros {
                    0 => Ok(v.value),
                    z if z > 0 => Ok(LaurentSeries::zero(EXACT)),
                    _ => Err(Error::DivisionByZeroSeries { trunc: self.order }),
                }
            }
        }
    }

    fn index(&self, n: &IndexExpr) -> Result<i64> {
        n.eval(self.env, 0)
    }

    fn env(&self) -> &Assignment {
        self.env
    }

    fn one(&self) -> LaurentSeries {
        LaurentSeries::one(EXACT)
    }

    fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a + b
    }

    fn sub(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a - b
    }

    fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a * b
    }

    fn div(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        // exact polynomials carry the sentinel order; bound the quotient
        let v = b.min_order().min(b.trunc_order());
        let cap = self.order + 2 * v.abs() + 8;
        a.truncate(cap).series_div(b)
    }

    fn neg(&self, a: &LaurentSeries) -> LaurentSeries {
        -a
    }
}

/// Evaluates `e` exactly through `q^n`, raising the working order until
/// the result is valid that far.
pub fn evaluate_exact(e: &Expr, env: &Assignment, n: i64) -> Result<LaurentSeries> {
    let mut work = n;
    let mut reached = i64::MIN;
    for _ in 0..8 {
        let v = eval_expr(e, &ExactBackend { env, order: work })?;
        if v.trunc_order() >= n {
            return Ok(v.truncate(n));
        }
        reached = v.trunc_order();
        work += (n - reached).max(4);
    }
    Err(Error::OrderBudget { needed: n, reached })
}
