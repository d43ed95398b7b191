//! The identity catalog and the named series families `rho`, `rho0`, `xi`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use rug::Complex;
use serde::Serialize;

use crate::engine::{SeriesSpec, VwpSpec};
use crate::error::{Error, Result};
use crate::eval::{evaluate_exact, Expr};
use crate::expr::{p, Assignment, ParamExpr, Value};
use crate::numeric::{evaluate_numeric, relative_residual, NumEnv, NumericConfig};
use crate::series::LaurentSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    Exact,
    Numeric,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendKind::Exact => write!(f, "exact"),
            BackendKind::Numeric => write!(f, "numeric"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SlotSort {
    Monomial,
    Integer,
}

/// A free parameter of an identity and where samples for it are drawn.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSlot {
    pub name: &'static str,
    pub sort: SlotSort,
    /// q-orders for exact samples, or the integer range.
    pub range: (i64, i64),
    /// Exact samples must be perfect-square monomials.
    pub square: bool,
    /// Modulus range for numeric samples.
    pub modulus: (f64, f64),
}

impl ParamSlot {
    fn mono(name: &'static str, orders: (i64, i64), modulus: (f64, f64)) -> Self {
        ParamSlot { name, sort: SlotSort::Monomial, range: orders, square: false, modulus }
    }

    fn int(name: &'static str, lo: i64, hi: i64) -> Self {
        ParamSlot { name, sort: SlotSort::Integer, range: (lo, hi), square: false, modulus: (0.0, 0.0) }
    }

    fn square(mut self) -> Self {
        self.square = true;
        self
    }
}

/// Side conditions of an identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    /// `|lhs| < |rhs|` at the numeric point; the exact backend relies on
    /// the growth check instead.
    Less(ParamExpr, ParamExpr),
    /// The two values differ.
    NotEqual(ParamExpr, ParamExpr),
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Less(a, b) => write!(f, "|{a}| < |{b}|"),
            Constraint::NotEqual(a, b) => write!(f, "{a} != {b}"),
        }
    }
}

impl Serialize for Constraint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Constraint {
    fn check_exact(&self, env: &Assignment) -> Result<()> {
        let ok = match self {
            Constraint::Less(..) => true,
            Constraint::NotEqual(a, b) => a.eval_mono(env)? != b.eval_mono(env)?,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ConstraintViolation(self.to_string()))
        }
    }

    fn check_numeric(&self, ne: &NumEnv) -> Result<()> {
        let abs = |c: Complex| c.abs().real().to_f64();
        let ok = match self {
            Constraint::Less(a, b) => abs(ne.param(a)?) < abs(ne.param(b)?),
            Constraint::NotEqual(a, b) => abs(Complex::with_val(ne.q.prec().0, ne.param(a)? - ne.param(b)?)) > 1e-6,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::ConstraintViolation(self.to_string()))
        }
    }
}

/// One catalog record.
#[derive(Debug, Clone)]
pub struct IdentityEntry {
    pub id: &'static str,
    pub anchor: &'static str,
    pub slots: Vec<ParamSlot>,
    pub constraints: Vec<Constraint>,
    pub lhs: Expr,
    pub rhs: Expr,
    /// Further expressions that must equal `lhs` (alternative forms).
    pub also: Vec<(&'static str, Expr)>,
    pub exact: bool,
    pub numeric: bool,
    /// Known-admissible exact assignments.
    pub suggested: Vec<Assignment>,
    /// In-region numeric points (without `q`).
    pub numeric_points: Vec<Assignment>,
}

impl IdentityEntry {
    pub fn supports(&self, b: BackendKind) -> bool {
        match b {
            BackendKind::Exact => self.exact,
            BackendKind::Numeric => self.numeric,
        }
    }

    pub fn backends(&self) -> Vec<BackendKind> {
        [BackendKind::Exact, BackendKind::Numeric].into_iter().filter(|b| self.supports(*b)).collect()
    }

    /// Checks slot presence and side conditions for the given backend.
    pub fn check(&self, env: &Assignment, backend: BackendKind, cfg: &NumericConfig) -> Result<()> {
        for s in &self.slots {
            match s.sort {
                SlotSort::Integer => {
                    let v = env.int(s.name)?;
                    if v < 0 {
                        return Err(Error::ConstraintViolation(format!("{} must be >= 0", s.name)));
                    }
                }
                SlotSort::Monomial => {
                    env.get(s.name)?;
                }
            }
        }
        match backend {
            BackendKind::Exact => {
                for c in &self.constraints {
                    c.check_exact(env)?;
                }
            }
            BackendKind::Numeric => {
                let ne = NumEnv::new(env, *cfg)?;
                for c in &self.constraints {
                    c.check_numeric(&ne)?;
                }
            }
        }
        Ok(())
    }

    /// All sides: `lhs`, `rhs`, then the alternative forms.
    pub fn sides(&self) -> Vec<(&'static str, &Expr)> {
        let mut v = vec![("lhs", &self.lhs), ("rhs", &self.rhs)];
        v.extend(self.also.iter().map(|(n, e)| (*n, e)));
        v
    }
}

/// Both sides of an identity, evaluated independently.
#[derive(Debug, Clone)]
pub struct ExactSides {
    pub lhs: LaurentSeries,
    pub rhs: LaurentSeries,
    pub also: Vec<(&'static str, LaurentSeries)>,
}

#[derive(Debug, Clone)]
pub struct NumericSides {
    pub lhs: Complex,
    pub rhs: Complex,
    pub also: Vec<(&'static str, Complex)>,
}

pub fn evaluate_identity_exact(e: &IdentityEntry, env: &Assignment, n: i64) -> Result<ExactSides> {
    if !e.exact {
        return Err(Error::UnsupportedBackend(format!("exact for {}", e.id)));
    }
    e.check(env, BackendKind::Exact, &NumericConfig::default())?;
    Ok(ExactSides {
        lhs: evaluate_exact(&e.lhs, env, n)?,
        rhs: evaluate_exact(&e.rhs, env, n)?,
        also: e.also.iter().map(|(name, x)| Ok((*name, evaluate_exact(x, env, n)?))).collect::<Result<_>>()?,
    })
}

pub fn evaluate_identity_numeric(e: &IdentityEntry, env: &Assignment, cfg: &NumericConfig) -> Result<NumericSides> {
    if !e.numeric {
        return Err(Error::UnsupportedBackend(format!("numeric for {}", e.id)));
    }
    e.check(env, BackendKind::Numeric, cfg)?;
    Ok(NumericSides {
        lhs: evaluate_numeric(&e.lhs, env, *cfg)?,
        rhs: evaluate_numeric(&e.rhs, env, *cfg)?,
        also: e.also.iter().map(|(name, x)| Ok((*name, evaluate_numeric(x, env, *cfg)?))).collect::<Result<_>>()?,
    })
}

/// `lhs - rhs`, followed by `lhs - alt` for each alternative form.
pub fn residual_exact(e: &IdentityEntry, env: &Assignment, n: i64) -> Result<Vec<LaurentSeries>> {
    let s = evaluate_identity_exact(e, env, n)?;
    let mut out = vec![&s.lhs - &s.rhs];
    out.extend(s.also.iter().map(|(_, v)| &s.lhs - v));
    Ok(out)
}

/// Largest relative residual over `lhs - rhs` and the alternative forms.
pub fn residual_num(e: &IdentityEntry, env: &Assignment, cfg: &NumericConfig) -> Result<f64> {
    let s = evaluate_identity_numeric(e, env, cfg)?;
    let mut worst = relative_residual(&s.lhs, &s.rhs);
    for (_, v) in &s.also {
        worst = worst.max(relative_residual(&s.lhs, v));
    }
    Ok(worst)
}

pub fn swap_map(x: &str, y: &str) -> BTreeMap<String, ParamExpr> {
    let mut m = BTreeMap::new();
    m.insert(x.to_string(), ParamExpr::Slot(y.to_string()));
    m.insert(y.to_string(), ParamExpr::Slot(x.to_string()));
    m
}

/// `f(a, b) - f(b, a)`.
fn antisym(e: Expr) -> Expr {
    let swapped = e.subst(&swap_map("a", "b"));
    e - swapped
}

fn x(s: &str) -> Expr {
    Expr::param(s)
}

/// Representations of the `rho` family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RhoRep {
    /// Two-variable series.
    Two,
    /// Four variables, linear argument `-d/b`.
    RepA,
    /// Four variables, well-poised kernel `1 - a q^{2k+1}/b`.
    RepB,
    /// Four variables, quadratic form with kernel `1 + cd q^{2k}/b`.
    RepC,
    /// Five variables, direct series.
    Direct,
    /// Five variables as `(1 + 1/b) rho0`.
    Rho0,
    /// Five variables, finite form when `-aq/d` (or `c`, `-aq/e`) is `q^-m`.
    Terminating,
}

fn one_plus_inv_b() -> Expr {
    x("1") + x("1/b")
}

fn rho2_sum() -> SeriesSpec {
    SeriesSpec::unilateral("-a/b").qpower(1, 1).den("-a*q")
}

fn rho4_a() -> SeriesSpec {
    SeriesSpec::unilateral("-d/b").num("c").num("-a*q/d").den("-a*q").den_at("-c/b", 1, 1)
}

fn rho4_b() -> SeriesSpec {
    SeriesSpec::unilateral("c*d/b")
        .qpower(1, -1)
        .kernel("a*q/b")
        .num_at("-1/b", 1, 1)
        .num("-a*q/c")
        .num("-a*q/d")
        .den("-a*q")
        .den_at("-c/b", 1, 1)
        .den_at("-d/b", 1, 1)
}

fn rho4_c() -> SeriesSpec {
    SeriesSpec::unilateral("-a/b")
        .qpower(1, 1)
        .kernel("-c*d/b")
        .num("c")
        .num("d")
        .num("c*d/(a*b)")
        .den("-a*q")
        .den_at("-c/b", 1, 1)
        .den_at("-d/b", 1, 1)
}

fn rho5_sum() -> SeriesSpec {
    SeriesSpec::unilateral("c*d*e/(a*b*q)")
        .kernel("a*q/b")
        .num_at("-1/b", 1, 1)
        .num("-a*q/c")
        .num("-a*q/d")
        .num("-a*q/e")
        .den("-a*q")
        .den_at("-c/b", 1, 1)
        .den_at("-d/b", 1, 1)
        .den_at("-e/b", 1, 1)
}

fn rho0_sum() -> SeriesSpec {
    SeriesSpec::unilateral("c*d*e/(a*b*q)")
        .kernel("a*q/b")
        .num("-q/b")
        .num("-a*q/c")
        .num("-a*q/d")
        .num("-a*q/e")
        .den("-a*q")
        .den_at("-c/b", 1, 1)
        .den_at("-d/b", 1, 1)
        .den_at("-e/b", 1, 1)
}

fn rho5_terminating() -> Expr {
    let sum =
        SeriesSpec::unilateral("q").num("c").num("-a*q/d").num("-a*q/e").den("-a*q").den("-c*q/b").den("a*b*q^2/(d*e)");
    (x("1") + x("b")) / ((x("b") + x("c")) * (x("1") - x("d*e/(a*b*q)"))) * Expr::sum(sum)
}

/// `rho` with `e -> 0` through the scaled limit.
fn rho5_e0() -> SeriesSpec {
    SeriesSpec::unilateral("c*d/(a*b*q)")
        .kernel("a*q/b")
        .scaled_limit("-a*q")
        .num_at("-1/b", 1, 1)
        .num("-a*q/c")
        .num("-a*q/d")
        .den("-a*q")
        .den_at("-c/b", 1, 1)
        .den_at("-d/b", 1, 1)
}

/// `rho` with `c, d, e -> 0`.
fn rho5_cde0() -> SeriesSpec {
    SeriesSpec::unilateral("1/(a*b*q)")
        .kernel("a*q/b")
        .scaled_limit("-a*q")
        .scaled_limit("-a*q")
        .scaled_limit("-a*q")
        .num_at("-1/b", 1, 1)
        .den("-a*q")
}

/// Expression for `rho` of the given arity and representation, in the
/// slots `a, b` (and `c, d, e`).
pub fn rho_expr(arity: u8, rep: RhoRep) -> Result<Expr> {
    Ok(match (arity, rep) {
        (2, RhoRep::Two) => one_plus_inv_b() * Expr::sum(rho2_sum()),
        (4, RhoRep::RepA) => one_plus_inv_b() * Expr::sum(rho4_a()),
        (4, RhoRep::RepB) => Expr::sum(rho4_b()),
        (4, RhoRep::RepC) => one_plus_inv_b() * Expr::sum(rho4_c()),
        (5, RhoRep::Direct) => Expr::sum(rho5_sum()),
        (5, RhoRep::Rho0) => one_plus_inv_b() * Expr::sum(rho0_sum()),
        (5, RhoRep::Terminating) => rho5_terminating(),
        _ => return Err(Error::ConstraintViolation(format!("no representation {rep:?} for arity {arity}"))),
    })
}

/// Whether some of `c, -aq/d, -aq/e` is `q^-m` with `m >= 0`.
pub fn has_terminating_parameter(env: &Assignment) -> Result<bool> {
    for t in ["c", "-a*q/d", "-a*q/e"] {
        let m = p(t).eval_mono(env)?;
        if *m.coeff() == 1 && m.exponent() <= 0 {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone)]
pub enum SeriesValue {
    Exact(LaurentSeries),
    Numeric(Complex),
}

/// Precision setting for one evaluation.
#[derive(Debug, Clone, Copy)]
pub enum Precision {
    Order(i64),
    Numeric(NumericConfig),
}

fn evaluate(e: &Expr, env: &Assignment, prec: Precision) -> Result<SeriesValue> {
    Ok(match prec {
        Precision::Order(n) => SeriesValue::Exact(evaluate_exact(e, env, n)?),
        Precision::Numeric(cfg) => SeriesValue::Numeric(evaluate_numeric(e, env, cfg)?),
    })
}

pub fn rho(arity: u8, rep: RhoRep, env: &Assignment, prec: Precision) -> Result<SeriesValue> {
    if rep == RhoRep::Terminating {
        let terminating = match prec {
            Precision::Order(_) => has_terminating_parameter(env)?,
            Precision::Numeric(cfg) => {
                let ne = NumEnv::new(env, cfg)?;
                ["c", "-a*q/d", "-a*q/e"].iter().any(|t| {
                    (0..64).any(|m| {
                        ne.param(&p(t)).ok().is_some_and(|v| {
                            let w = ne.param(&p(&format!("q^(-{m})"))).unwrap();
                            Complex::with_val(v.prec().0, &v - &w).abs().real().to_f64()
                                < 1e-30 * w.abs().real().to_f64()
                        })
                    })
                })
            }
        };
        if !terminating {
            return Err(Error::TerminationRequired);
        }
    }
    evaluate(&rho_expr(arity, rep)?, env, prec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum XiForm {
    /// `sum (a;q)_k x^k`
    Sum,
    /// `sum q^{k(k-1)/2} (-ax)^k / (x;q)_{k+1}`
    Binom,
}

/// `xi(a, x)` with parameter expressions for both arguments.
pub fn xi_expr(a: &str, xv: &str, form: XiForm) -> Expr {
    let mut m = BTreeMap::new();
    m.insert("a".to_string(), p(a));
    m.insert("x".to_string(), p(xv));
    let spec = match form {
        XiForm::Sum => SeriesSpec::unilateral("x").num("a"),
        XiForm::Binom => SeriesSpec::unilateral("-a*x").qpower(1, -1).den_at("x", 1, 1),
    };
    Expr::sum(spec.subst(&m))
}

pub fn xi(a: &str, xv: &str, form: XiForm, env: &Assignment, prec: Precision) -> Result<SeriesValue> {
    evaluate(&xi_expr(a, xv, form), env, prec)
}

fn asg(s: &str) -> Assignment {
    Assignment::parse(s).expect("bad catalog assignment")
}

fn asgs(list: &[&str]) -> Vec<Assignment> {
    list.iter().map(|s| asg(s)).collect()
}

fn less(a: &str, b: &str) -> Constraint {
    Constraint::Less(p(a), p(b))
}

fn ne(a: &str, b: &str) -> Constraint {
    Constraint::NotEqual(p(a), p(b))
}

const BIG: (f64, f64) = (0.5, 2.5);
const SMALL: (f64, f64) = (0.1, 0.8);
const MID: (f64, f64) = (0.2, 1.6);

fn mono(name: &'static str, orders: (i64, i64), modulus: (f64, f64)) -> ParamSlot {
    ParamSlot::mono(name, orders, modulus)
}

fn recip2_rhs() -> Expr {
    (x("1/b") - x("1/a")) * Expr::inf(&["q", "a*q/b", "b*q/a"]) / Expr::inf(&["-a*q", "-b*q"])
}

fn recip4_rhs() -> Expr {
    (x("1/b") - x("1/a")) * Expr::inf(&["q", "a*q/b", "b*q/a", "c", "d", "c*d/(a*b)"])
        / Expr::inf(&["-a*q", "-b*q", "-c/b", "-d/b", "-c/a", "-d/a"])
}

fn recip5_rhs() -> Expr {
    (x("1/b") - x("1/a")) * Expr::inf(&["q", "a*q/b", "b*q/a", "c", "d", "e", "c*d/(a*b)", "c*e/(a*b)", "d*e/(a*b)"])
        / Expr::inf(&["-a*q", "-b*q", "-c/a", "-c/b", "-d/a", "-d/b", "-e/a", "-e/b", "c*d*e/(a*b*q)"])
}

fn xi_product() -> Expr {
    Expr::inf(&["q", "a*x", "q/(a*x)"]) / Expr::inf(&["x", "q/a"])
}

fn build() -> Vec<IdentityEntry> {
    let ab = || vec![mono("a", (0, 1), BIG), mono("b", (0, 1), BIG)];
    let mut out = Vec::new();

    out.push(IdentityEntry {
        id: "RECIP2",
        anchor: "Theorem 1.1: \"For $a, b \\neq q^{-n}$\"",
        slots: ab(),
        constraints: vec![],
        lhs: antisym(rho_expr(2, RhoRep::Two).unwrap()),
        rhs: recip2_rhs(),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3", "a=-1/2, b=2/3*q", "a=3*q, b=-2"]),
        numeric_points: asgs(&["a=0.7, b=0.4", "a=1.3-0.2i, b=0.6", "a=-0.8, b=2.1+0.3i"]),
    });

    let abcd =
        || vec![mono("a", (0, 1), BIG), mono("b", (0, 1), BIG), mono("c", (1, 2), SMALL), mono("d", (1, 2), SMALL)];
    out.push(IdentityEntry {
        id: "RECIP4",
        anchor: "Theorem 1.2: \"For four parameters $a,b,c,d$ satisfying\"",
        slots: abcd(),
        constraints: vec![less("d", "b"), less("d", "a")],
        lhs: antisym(rho_expr(4, RhoRep::RepA).unwrap()),
        rhs: recip4_rhs(),
        also: vec![("lhs_repc", antisym(rho_expr(4, RhoRep::RepC).unwrap()))],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=q, d=q", "a=-1/2, b=2/3, c=2*q, d=-3*q^2", "a=5/7, b=-2, c=q^2, d=1/2*q"]),
        numeric_points: asgs(&["a=0.6, b=0.35, c=0.2, d=0.15", "a=1.2+0.3i, b=0.9, c=0.4, d=-0.3+0.1i"]),
    });

    let abcde = || {
        vec![
            mono("a", (0, 1), BIG),
            mono("b", (0, 1), BIG),
            mono("c", (1, 2), SMALL),
            mono("d", (1, 2), SMALL),
            mono("e", (1, 2), SMALL),
        ]
    };
    out.push(IdentityEntry {
        id: "RECIP5",
        anchor: "Theorem 1.3: \"For five parameters $a,b,c,d,e$ satisfying\"",
        slots: abcde(),
        constraints: vec![less("c*d*e", "a*b*q")],
        lhs: antisym(rho_expr(5, RhoRep::Direct).unwrap()),
        rhs: recip5_rhs(),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=q, d=q, e=q", "a=-1/2, b=2/3, c=2*q, d=q^2, e=-3*q"]),
        numeric_points: asgs(&["a=0.6, b=0.35, c=0.2, d=0.3, e=0.25", "a=1.5, b=-0.9+0.2i, c=0.4, d=0.3i, e=0.5"]),
    });

    out.push(IdentityEntry {
        id: "BAILEY_6PSI6",
        anchor: "Lemma 2.1: \"Bailey's very-well-poised$\\,_6\\psi_6$ summation formula\"",
        slots: vec![
            mono("a", (2, 2), (0.3, 0.9)).square(),
            mono("b", (1, 1), (1.0, 2.5)),
            mono("c", (1, 1), (1.0, 2.5)),
            mono("d", (1, 1), (1.0, 2.5)),
            mono("e", (1, 1), (1.0, 2.5)),
        ],
        constraints: vec![less("a^2*q", "b*c*d*e")],
        lhs: Expr::vwp(VwpSpec {
            a: p("a"),
            tail: vec![p("b"), p("c"), p("d"), p("e")],
            argument: p("a^2*q/(b*c*d*e)"),
            bilateral: true,
        }),
        rhs: Expr::inf(&[
            "q",
            "a*q",
            "q/a",
            "a*q/(b*c)",
            "a*q/(b*d)",
            "a*q/(b*e)",
            "a*q/(c*d)",
            "a*q/(c*e)",
            "a*q/(d*e)",
        ]) / Expr::inf(&["a*q/b", "a*q/c", "a*q/d", "a*q/e", "q/b", "q/c", "q/d", "q/e", "a^2*q/(b*c*d*e)"]),
        also: vec![],
        exact: true,
        numeric: true,
        // head aq/b, tail -q/b, -aq/c, -aq/d, -aq/e of the five-parameter series
        suggested: asgs(&["a=4*q^2, b=-q, c=-8*q, d=-4*q, e=-8*q", "a=9/4*q^2, b=-2/3*q, c=3*q, d=-3/2*q, e=-9/4*q"]),
        numeric_points: asgs(&["a=0.5, b=-0.7, c=1.3, d=1.1, e=2.5", "a=0.4+0.1i, b=1.5, c=-1.2, d=1.8, e=2.2"]),
    });

    let w = "q^(-n)";
    let w87_arg = format!("a^2*q^2/(b*c*y*z*{w})");
    let t4 = SeriesSpec::finite("q", "n")
        .num("a*q/(b*c)")
        .num("y")
        .num("z")
        .num(w)
        .den("q")
        .den("a*q/b")
        .den("a*q/c")
        .den(&format!("y*z*{w}/a"));
    out.push(IdentityEntry {
        id: "WATSON_8W7",
        anchor: "Lemma 3.1: \"the $\\,_4\\phi_3$ series is terminating\"",
        slots: vec![
            mono("a", (0, 2), (0.3, 3.0)).square(),
            mono("b", (-1, 1), MID),
            mono("c", (-1, 1), MID),
            mono("y", (-1, 1), MID),
            mono("z", (-1, 1), MID),
            ParamSlot::int("n", 0, 5),
        ],
        constraints: vec![],
        lhs: Expr::vwp(VwpSpec {
            a: p("a"),
            tail: vec![p("b"), p("c"), p("y"), p("z"), p(w)],
            argument: p(&w87_arg),
            bilateral: false,
        }),
        rhs: Expr::inf(&["a*q", "a*q/(y*z)", &format!("a*q/(y*{w})"), &format!("a*q/(z*{w})")])
            / Expr::inf(&["a*q/y", "a*q/z", &format!("a*q/{w}"), &format!("a*q/(y*z*{w})")])
            * Expr::sum(t4),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=4, b=2, c=3, y=5, z=-1/2, n=3", "a=9/4*q^2, b=2*q, c=-1/2, y=3, z=q, n=2"]),
        numeric_points: asgs(&["a=4, b=2, c=3, y=5, z=-0.5, n=3", "a=0.7+0.2i, b=1.3, c=-0.6, y=0.9i, z=1.4, n=4"]),
    });

    out.push(IdentityEntry {
        id: "WATSON_LIMIT",
        anchor: "Eq. (sorry): \"the limiting case $n\\mapsto\\infty$ of Watson's\"",
        slots: vec![
            mono("a", (0, 1), SMALL),
            mono("b", (0, 1), SMALL),
            mono("c", (0, 1), SMALL),
            mono("y", (-1, 0), (1.2, 2.5)),
            mono("z", (-1, 0), (1.2, 2.5)),
        ],
        constraints: vec![less("a*q", "y*z")],
        lhs: Expr::sum(SeriesSpec::unilateral("a*q/(y*z)").num("b").num("y").num("z").den("q").den("c").den("a*b*q/c")),
        rhs: Expr::inf(&["a*q/y", "a*q/z"]) / Expr::inf(&["a*q", "a*q/(y*z)"])
            * Expr::sum(
                SeriesSpec::unilateral("-a*b*q/(y*z)")
                    .qpower(1, -1)
                    .well_poised("a")
                    .num("a")
                    .num("c/b")
                    .num("a*q/c")
                    .num("y")
                    .num("z")
                    .den("q")
                    .den("a*b*q/c")
                    .den("c")
                    .den("a*q/y")
                    .den("a*q/z"),
            ),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=-1/2, y=q^-1, z=2/3", "a=2*q, b=-2/3, c=5/7, y=3*q^-1, z=-2"]),
        numeric_points: asgs(&["a=0.4, b=0.5, c=0.7, y=1.5, z=2", "a=0.3+0.2i, b=-0.6, c=0.45, y=1.8, z=-1.3+0.4i"]),
    });

    out.push(IdentityEntry {
        id: "WATSON_ZQ",
        anchor: "Lemma 3.3: \"For $\\max\\{|a/y|,|ab/y|\\}<1$\"",
        slots: vec![
            mono("a", (0, 1), SMALL),
            mono("b", (0, 0), (0.3, 1.2)),
            mono("c", (0, 1), SMALL),
            mono("y", (-1, -1), (1.2, 2.5)),
        ],
        constraints: vec![less("a", "y"), less("a*b", "y")],
        lhs: Expr::sum(SeriesSpec::unilateral("a/y").num("b").num("y").den("c").den("a*b*q/c")),
        rhs: Expr::sum(
            SeriesSpec::unilateral("-a*b/y")
                .qpower(1, -1)
                .kernel("a")
                .num("c/b")
                .num("a*q/c")
                .num("y")
                .den("a*b*q/c")
                .den("c")
                .den("a*q/y"),
        ) / (x("1") - x("a/y")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=-1/2, y=q^-1", "a=2/3*q, b=-2, c=5/7, y=3*q^-1"]),
        numeric_points: asgs(&["a=0.4, b=0.5, c=0.7, y=1.5", "a=0.3+0.2i, b=-0.6, c=0.45, y=1.8"]),
    });

    out.push(IdentityEntry {
        id: "RHO4_REPS",
        anchor: "Theorem 3.1: \"was missed by Kang\"",
        slots: abcd(),
        constraints: vec![less("d", "b")],
        lhs: rho_expr(4, RhoRep::RepA).unwrap(),
        rhs: rho_expr(4, RhoRep::RepB).unwrap(),
        also: vec![("repc", rho_expr(4, RhoRep::RepC).unwrap())],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=q, d=q", "a=-1/2, b=2/3, c=2*q, d=-3*q^2"]),
        numeric_points: asgs(&["a=0.6, b=0.35, c=0.2, d=0.15", "a=1.2+0.3i, b=0.9, c=0.4, d=-0.3+0.1i"]),
    });

    let mut term_subst = BTreeMap::new();
    term_subst.insert("d".to_string(), p("-a*q^(1+r)"));
    out.push(IdentityEntry {
        id: "RHO5_TERM",
        anchor: "Theorem 3.2: \"at least one of the parameters\"",
        slots: vec![
            mono("a", (0, 1), BIG),
            mono("b", (0, 1), BIG),
            mono("c", (0, 2), MID),
            mono("e", (0, 2), MID),
            ParamSlot::int("r", 0, 5),
        ],
        constraints: vec![],
        lhs: rho_expr(5, RhoRep::Direct).unwrap().subst(&term_subst),
        rhs: rho_expr(5, RhoRep::Terminating).unwrap().subst(&term_subst),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=q, e=q, r=2", "a=-1/2, b=2/3, c=2, e=-3*q, r=4"]),
        numeric_points: asgs(&["a=0.6, b=0.35, c=0.2, e=0.25, r=1", "a=1.5, b=-0.9+0.2i, c=0.4, e=0.3i, r=3"]),
    });

    let rs = || vec![ParamSlot::int("r", 0, 8), ParamSlot::int("s", 0, 8)];
    let mut fin_slots = vec![mono("a", (-1, 1), MID), mono("b", (-1, 1), MID), mono("c", (-1, 1), MID)];
    fin_slots.extend(rs());
    out.push(IdentityEntry {
        id: "FIN_RS",
        anchor: "Corollary 3.3: \"For two integers $r,s\\geq 0$, it holds\"",
        slots: fin_slots,
        constraints: vec![],
        lhs: (x("1") + x("b")) / (x("c") + x("b"))
            * Expr::sum(
                SeriesSpec::finite("q^(s+1)", "r")
                    .qbinom("r+s-k", "r-k")
                    .num("c")
                    .num("a*q^(-s)/b")
                    .den("-a*q")
                    .den("-c*q/b"),
            )
            - (x("1") + x("a")) / (x("c") + x("a"))
                * Expr::sum(
                    SeriesSpec::finite("q^(r+1)", "s")
                        .qbinom("r+s-k", "s-k")
                        .num("c")
                        .num("b*q^(-r)/a")
                        .den("-b*q")
                        .den("-c*q/a"),
                ),
        rhs: (x("1/b") - x("1/a"))
            * Expr::fin(&["a*q/b"], "r")
            * Expr::fin(&["b*q/a"], "s")
            * Expr::fin(&["c"], "1+r+s")
            / (Expr::fin(&["-a*q"], "r")
                * Expr::fin(&["-b*q"], "s")
                * Expr::fin(&["-c/b"], "r+1")
                * Expr::fin(&["-c/a"], "s+1")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=5/7, r=2, s=3", "a=-1/2*q, b=2/3, c=2*q^-1, r=4, s=1"]),
        numeric_points: asgs(&["a=0.7, b=-1.3, c=2.1, r=3, s=2", "a=0.4+0.5i, b=1.7, c=-0.6, r=1, s=4"]),
    });

    let mut fin_a_slots = vec![mono("a", (-1, 1), MID), mono("c", (-1, 1), MID)];
    fin_a_slots.extend(rs());
    out.push(IdentityEntry {
        id: "FIN_A",
        anchor: "Corollary 3.4: \"Let $a\\neq 0$\"",
        slots: fin_a_slots,
        constraints: vec![],
        lhs: Expr::sum(SeriesSpec::finite("q^(s+1)", "r").qbinom("r+s-k", "r-k").num("c").den("-a*q"))
            - (x("1") + x("a")) / (x("c") + x("a"))
                * Expr::sum(SeriesSpec::finite("-1/a", "s").qbinom("r+s-k", "s-k").num("c").den("-c*q/a")),
        rhs: x("-1/a").pow("s+1") * Expr::fin(&["c"], "1+r+s")
            / (Expr::fin(&["-a*q"], "r") * Expr::fin(&["-c/a"], "s+1")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, c=5/7, r=2, s=3", "a=-1/2*q, c=2*q^-1, r=4, s=1"]),
        numeric_points: asgs(&["a=0.7, c=2.1, r=3, s=2", "a=0.4+0.5i, c=-0.6, r=1, s=4"]),
    });

    let mut fin_c_slots = vec![mono("c", (-1, 1), MID)];
    fin_c_slots.extend(rs());
    out.push(IdentityEntry {
        id: "FIN_C",
        anchor: "Corollary 3.5: \"Let $c,q\\neq 0$\"",
        slots: fin_c_slots,
        constraints: vec![],
        lhs: Expr::sum(SeriesSpec::finite("q^(s+1)", "r").qbinom("r+s-k", "r-k").num("c")),
        rhs: Expr::fin_step(&["1/c"], "1+s", -1) * Expr::fin(&["c*q^(1+s)"], "r")
            + x("1/c") * Expr::sum(SeriesSpec::finite("q^-1", "s").qbinom("r+s-k", "s-k").num_at("1/c", 0, -1)),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["c=5/7, r=2, s=3", "c=2*q^-1, r=4, s=1", "c=-3*q, r=0, s=0"]),
        numeric_points: asgs(&["c=2.1, r=3, s=2", "c=-0.6+0.2i, r=1, s=4"]),
    });

    out.push(IdentityEntry {
        id: "PFAFF_FIN",
        anchor: "Corollary 3.6: \"supplement to the classical Pfaff transformation\"",
        slots: vec![mono("x", (0, 0), (0.3, 3.0)), ParamSlot::int("r", 0, 12), ParamSlot::int("s", 0, 12)],
        constraints: vec![ne("x", "1"), ne("x", "0")],
        lhs: Expr::sum(SeriesSpec::finite("x/(x-1)", "r").binom("r+s-k", "s")),
        rhs: x("x").pow("r+s+1") / x("x-1").pow("r")
            + x("1-x") * Expr::sum(SeriesSpec::finite("x", "s").binom("r+s-k", "r")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["x=5, r=0, s=0", "x=-3, r=4, s=2", "x=-1/2, r=3, s=5"]),
        numeric_points: asgs(&["x=2.5, r=3, s=2", "x=-0.4+0.3i, r=5, s=1"]),
    });

    out.push(IdentityEntry {
        id: "GOULD_181",
        anchor: "Section 3: \"revealed to be (1.81) by Gould\"",
        slots: vec![ParamSlot::int("n", 0, 12)],
        constraints: vec![],
        lhs: Expr::sum(SeriesSpec::finite("2", "n").binom("2*n-k", "n")),
        rhs: x("2").pow("2*n"),
        also: vec![],
        exact: true,
        numeric: false,
        suggested: asgs(&["n=0", "n=1", "n=5", "n=12"]),
        numeric_points: vec![],
    });

    let sym_f = (x("1") + x("b")) / (x("1") + x("b*q^m"))
        * Expr::sum(
            SeriesSpec::finite("q", "m")
                .num("q^(-m)")
                .num("-a*q/d")
                .num("-a*q/e")
                .den("-a*q")
                .den("-q^(1-m)/b")
                .den("a*b*q^2/(d*e)"),
        );
    out.push(IdentityEntry {
        id: "SYM_QM",
        anchor: "Corollary 3.7: \"Let $a,b\\neq -1$\"",
        slots: vec![
            mono("a", (-1, 1), MID),
            mono("b", (-1, 1), MID),
            mono("d", (-1, 1), MID),
            mono("e", (-1, 1), MID),
            ParamSlot::int("m", 0, 8),
        ],
        constraints: vec![ne("a", "-1"), ne("b", "-1")],
        lhs: sym_f.clone(),
        rhs: sym_f.subst(&swap_map("a", "b")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, d=5/7, e=-2, m=3", "a=-1/2*q, b=2/3, d=2*q^-1, e=3*q, m=5"]),
        numeric_points: asgs(&["a=0.7, b=-1.3, d=1.7, e=-2.3, m=2", "a=0.4+0.5i, b=1.7, d=-0.6, e=0.9, m=4"]),
    });

    let rf_f = (x("1") + x("b"))
        * Expr::sum(SeriesSpec::unilateral("-b").num("-a*q/d").num("-a*q/e").den("-a*q").den("a*b*q^2/(d*e)"));
    out.push(IdentityEntry {
        id: "RF_GEN",
        anchor: "Corollary 3.8: \"For $|a|,|b|<1$, it holds\"",
        slots: vec![
            mono("a", (1, 2), (0.1, 0.9)),
            mono("b", (1, 2), (0.1, 0.9)),
            mono("d", (0, 1), MID),
            mono("e", (0, 1), MID),
        ],
        constraints: vec![less("a", "1"), less("b", "1")],
        lhs: rf_f.clone(),
        rhs: rf_f.subst(&swap_map("a", "b")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2*q, b=3*q, d=5/7, e=-2", "a=-1/2*q^2, b=2/3*q, d=2*q, e=3"]),
        numeric_points: asgs(&["a=0.5, b=-0.3, d=0.8, e=1.7", "a=0.5, b=0.5, d=0.3, e=0.7"]),
    });

    let rfs = (x("1") - x("b")) * Expr::sum(SeriesSpec::unilateral("b").num("a*q/d").den("a*q"));
    out.push(IdentityEntry {
        id: "RF_SYM",
        anchor: "Section 3: \"symmetric property of the Rogers-Fine function\"",
        slots: vec![mono("a", (1, 2), (0.1, 0.9)), mono("b", (1, 2), (0.1, 0.9)), mono("d", (0, 1), MID)],
        constraints: vec![less("a", "1"), less("b", "1")],
        lhs: rfs.clone(),
        rhs: rfs.subst(&swap_map("a", "b")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2*q, b=3*q, d=5/7", "a=-1/2*q^2, b=2/3*q, d=2*q"]),
        numeric_points: asgs(&["a=0.5, b=-0.3, d=0.8", "a=0.2+0.3i, b=0.6, d=1.4"]),
    });

    out.push(IdentityEntry {
        id: "PARTIAL_D",
        anchor: "Corollary 3.9: \"For $|d|<|q|, a\\neq -q^{m}$\"",
        slots: vec![mono("a", (-1, 2), MID), mono("d", (2, 3), (0.01, 0.09))],
        constraints: vec![less("d", "q")],
        lhs: Expr::sum(SeriesSpec::unilateral("d/q").num("-a*q/d").den_at("-a", 1, 1)),
        rhs: x("q") / (x("q") - x("d")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, d=2*q^2", "a=q, d=-1/2*q^2", "a=3*q^2, d=2/3*q^3"]),
        numeric_points: asgs(&["a=0.4, d=0.1", "a=2, d=0.1", "a=-0.7, d=0.1"]),
    });

    out.push(IdentityEntry {
        id: "PARTIAL_1",
        anchor: "Eq. (par1): \"the case $d=0$ of it\"",
        slots: vec![mono("a", (-1, 2), MID)],
        constraints: vec![],
        lhs: Expr::sum(SeriesSpec::unilateral("a").qpower(1, -1).den_at("-a", 1, 1)),
        rhs: x("1"),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2", "a=q", "a=3*q^2"]),
        numeric_points: asgs(&["a=0.4", "a=2", "a=-0.7+0.4i"]),
    });

    out.push(IdentityEntry {
        id: "XI_RECIP",
        anchor: "Theorem 4.1: \"For $|x|<1,|q|<|a|$, it holds\"",
        slots: vec![mono("a", (-1, 0), (0.5, 2.0)), mono("x", (1, 2), (0.1, 0.9))],
        constraints: vec![less("x", "1"), less("q", "a")],
        lhs: xi_expr("a", "x", XiForm::Sum) - x("q/(a*x)") * xi_expr("q/x", "q/a", XiForm::Sum),
        rhs: xi_product(),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, x=q", "a=-1/2, x=3*q", "a=3*q^-1, x=2/3*q^2"]),
        numeric_points: asgs(&["a=0.8, x=0.45", "a=1.4+0.3i, x=-0.5"]),
    });

    out.push(IdentityEntry {
        id: "XI_REPS",
        anchor: "Eq. (binomne9444): \"In particular,  when $y=q$\"",
        slots: vec![mono("a", (-1, 1), MID), mono("x", (1, 2), (0.1, 0.9))],
        constraints: vec![less("x", "1")],
        lhs: xi_expr("a", "x", XiForm::Sum),
        rhs: xi_expr("a", "x", XiForm::Binom),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=3, x=q", "a=-1/2*q, x=2*q^2"]),
        numeric_points: asgs(&["a=0.8, x=0.45", "a=-1.2+0.3i, x=0.6i"]),
    });

    out.push(IdentityEntry {
        id: "XI_BILATERAL",
        anchor: "Eq. (binomne944): \"Ramanujan's $\\,_1\\psi_1$ summation formula\"",
        slots: vec![mono("a", (-1, 1), (0.8, 2.0)), mono("x", (0, 2), (0.5, 0.9))],
        constraints: vec![less("x", "1"), less("q", "a*x")],
        lhs: Expr::sum(SeriesSpec::bilateral("-a*x").qpower(1, -1).den_at("x", 1, 1)),
        rhs: xi_product(),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, x=q", "a=-3, x=q", "a=1/2*q^-1, x=3*q^2", "a=5/7, x=3*q", "a=-2/3, x=-2*q"]),
        numeric_points: asgs(&["a=1.2, x=0.5", "a=1.4+0.3i, x=0.6"]),
    });

    out.push(IdentityEntry {
        id: "JACKSON",
        anchor: "Eq. (jackson): \"case $c=0$ of Jackson's transformation\"",
        slots: vec![mono("a", (-1, 1), MID), mono("y", (-1, 1), MID), mono("x", (1, 2), (0.1, 0.9))],
        constraints: vec![less("x", "1")],
        lhs: Expr::sum(SeriesSpec::unilateral("x").num("a").num("y").den("q")),
        rhs: Expr::inf(&["x*y"]) / Expr::inf(&["x"])
            * Expr::sum(SeriesSpec::unilateral("-a*x").qpower(1, -1).num("y").den("q").den("x*y")),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, y=3, x=q", "a=-1/2*q, y=2/3*q^-1, x=5/7*q"]),
        numeric_points: asgs(&["a=0.6, y=1.4, x=0.3", "a=-1.1+0.2i, y=0.7, x=0.5i"]),
    });

    let l1 = SeriesSpec::unilateral("q").scaled_limit("x").num("y").den("q").den("x*y");
    let l2 = SeriesSpec::unilateral("q").scaled_limit("q/y").num("q/x").den("q").den("q^2/(x*y)");
    out.push(IdentityEntry {
        id: "THREE_TERM",
        anchor: "Eq. (gennew): \"the three-term transformation formula\"",
        slots: vec![mono("x", (-1, 1), MID), mono("y", (-1, 1), MID)],
        constraints: vec![],
        lhs: Expr::sum(l1) - x("q/(x*y)") * Expr::inf(&["x", "q^2/(x*y)"]) / Expr::inf(&["q/y", "x*y"]) * Expr::sum(l2),
        rhs: Expr::inf(&["q", "q/(x*y)"]) / Expr::inf(&["q/y"]),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["x=2, y=3", "x=-1/2*q, y=2/3"]),
        numeric_points: asgs(&["x=0.7, y=1.9", "x=-0.4+0.6i, y=1.3"]),
    });

    let q2a = SeriesSpec::unilateral("-x^2*z").qpower(3, -1).kernel("x*z").num("z").den_at("x", 1, 1);
    let q2b = SeriesSpec::unilateral("-q^3/(z^2*x)").qpower(3, -1).kernel("q^2/(x*z)").num("q/x").den_at("q/z", 1, 1);
    out.push(IdentityEntry {
        id: "QUINT_2VAR",
        anchor: "Corollary 4.2: \"two-variable generalization of Watson's quintuple\"",
        slots: vec![mono("x", (0, 1), (0.2, 0.9)), mono("z", (0, 1), (0.2, 0.9))],
        constraints: vec![],
        lhs: Expr::sum(q2a) - x("q/(z*x)") * Expr::sum(q2b),
        rhs: Expr::inf(&["q", "z*x", "q/(z*x)"]) / Expr::inf(&["x", "q/z"]),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["x=2*q, z=3*q", "x=-q, z=1/2*q"]),
        numeric_points: asgs(&["x=0.6, z=0.45", "x=0.3+0.4i, z=-0.7"]),
    });

    out.push(IdentityEntry {
        id: "QUINT",
        anchor: "Eq. (0): \"Watson's celebrated quintuple product identity\"",
        slots: vec![mono("a", (1, 1), (0.3, 1.5))],
        constraints: vec![],
        lhs: Expr::sum(SeriesSpec::bilateral("a^3").prefactor("-a").kernel("a^2*q").qpower(3, 1)),
        rhs: Expr::inf(&["q", "a", "q/a"]) * Expr::inf_step(&["q*a^2", "q/a^2"], 2),
        also: vec![],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2*q", "a=-3*q", "a=1/2*q"]),
        numeric_points: asgs(&["a=0.8+0.1i", "a=1.3", "a=-0.6"]),
    });

    out.push(IdentityEntry {
        id: "DEGEN_5TO4",
        anchor: "Section 1: \"letting $e\\mapsto 0$ in Theorem \\ref{1.3}\"",
        slots: abcd(),
        constraints: vec![],
        lhs: antisym(Expr::sum(rho5_e0())),
        rhs: recip4_rhs(),
        also: vec![("rho4_repb", antisym(rho_expr(4, RhoRep::RepB).unwrap()))],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3, c=q, d=q", "a=-1/2, b=2/3, c=2*q, d=-3*q^2"]),
        numeric_points: asgs(&["a=0.6, b=0.35, c=0.2, d=0.15", "a=1.2+0.3i, b=0.9, c=0.4, d=-0.3+0.1i"]),
    });

    out.push(IdentityEntry {
        id: "DEGEN_5TO2",
        anchor: "Section 1: \"letting $c,d,e\\mapsto 0$ simultaneously\"",
        slots: ab(),
        constraints: vec![],
        lhs: antisym(Expr::sum(rho5_cde0())),
        rhs: recip2_rhs(),
        also: vec![("rho2", antisym(rho_expr(2, RhoRep::Two).unwrap()))],
        exact: true,
        numeric: true,
        suggested: asgs(&["a=2, b=3", "a=-1/2, b=2/3*q"]),
        numeric_points: asgs(&["a=0.7, b=0.4", "a=1.3-0.2i, b=0.6"]),
    });

    out
}

/// The five-parameter series with `e -> 0` and the four-parameter series
/// in the form whose terms it reproduces.
pub fn degeneration_pair() -> (SeriesSpec, SeriesSpec) {
    (rho5_e0(), rho4_b())
}

static CATALOG: OnceLock<Vec<IdentityEntry>> = OnceLock::new();

/// Every catalog entry, in listing order.
pub fn list_identities() -> &'static [IdentityEntry] {
    CATALOG.get_or_init(build)
}

pub fn lookup(id: &str) -> Result<&'static IdentityEntry> {
    list_identities()
        .iter()
        .find(|e| e.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

/// Adds `q` to a numeric point.
pub fn with_q(env: &Assignment, q: &Value) -> Assignment {
    env.clone().with("q", q.clone())
}
