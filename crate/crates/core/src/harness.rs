//! Seeded sampling, batch verification and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    evaluate_identity_exact, evaluate_identity_numeric, list_identities, residual_exact, residual_num, rho_expr,
    BackendKind, IdentityEntry, RhoRep, SlotSort,
};
use crate::error::{Error, Result};
use crate::eval::evaluate_exact;
use crate::expr::{p, Assignment, ParamExpr, Value};
use crate::numeric::{evaluate_numeric, relative_residual, NumericConfig};
use crate::series::{parse_rational, LaurentSeries, QMonomial};

/// Sampling and verification settings; also the shape of the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub seed: u64,
    /// Samples per identity and backend.
    pub count: usize,
    pub exact_order: i64,
    pub numeric: NumericConfig,
    /// Coefficients drawn for exact monomial samples, as `p/q` strings.
    pub coefficient_pool: Vec<String>,
    /// Values of `q` each numeric sample is checked at.
    pub numeric_q: Vec<String>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            count: 4,
            exact_order: 40,
            numeric: NumericConfig::default(),
            coefficient_pool: ["1/2", "-1/2", "2/3", "-2/3", "2", "-2", "3", "-3", "5/7"].map(String::from).to_vec(),
            numeric_q: vec!["0.3".into(), "0.35+0.1i".into()],
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::ConstraintViolation("count must be at least 1".into()));
        }
        if self.exact_order < 0 {
            return Err(Error::ConstraintViolation("exact_order must be nonnegative".into()));
        }
        if self.coefficient_pool.is_empty() || self.numeric_q.is_empty() {
            return Err(Error::ConstraintViolation("sampling pools must be nonempty".into()));
        }
        self.pool()?;
        self.q_values()?;
        self.numeric.validate()
    }

    fn pool(&self) -> Result<Vec<Rational>> {
        let v = self.coefficient_pool.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        if v.iter().any(|r| *r == 0) {
            return Err(Error::ConstraintViolation("coefficient pool may not contain 0".into()));
        }
        Ok(v)
    }

    pub fn q_values(&self) -> Result<Vec<Value>> {
        self.numeric_q.iter().map(|s| Value::parse(s)).collect()
    }

    /// Reads a JSON config; absent fields keep their defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SampleConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Which backends a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendSelector {
    Exact,
    Numeric,
    Both,
}

impl BackendSelector {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(BackendSelector::Exact),
            "numeric" => Ok(BackendSelector::Numeric),
            "both" => Ok(BackendSelector::Both),
            _ => Err(Error::Parse(format!("unknown backend `{s}`"))),
        }
    }

    fn kinds(self) -> Vec<BackendKind> {
        match self {
            BackendSelector::Exact => vec![BackendKind::Exact],
            BackendSelector::Numeric => vec![BackendKind::Numeric],
            BackendSelector::Both => vec![BackendKind::Exact, BackendKind::Numeric],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped(String),
}

impl Verdict {
    /// Engine errors that mark the sample as outside the identity's domain.
    fn from_error(e: &Error) -> Verdict {
        match e {
            Error::OrderBudget { .. }
            | Error::NoConvergence { .. }
            | Error::NonFinite(_)
            | Error::OrderExceeded { .. } => Verdict::Fail,
            e => Verdict::Skipped(e.kind().to_string()),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Skipped(r) => write!(f, "skipped({r})"),
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ResidualSummary {
    /// `None` when the residual vanishes through the order.
    Exact {
        residual_first_nonzero_order: Option<i64>,
    },
    Numeric {
        residual_magnitude: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum OrderOrTol {
    Order(i64),
    Tol(f64),
}

/// One line of the JSONL report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub id: String,
    pub anchor: String,
    pub backend: BackendKind,
    pub assignment: Assignment,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub residual: ResidualSummary,
    pub order_or_tol: OrderOrTol,
    pub seed: u64,
    pub sample_index: usize,
    pub elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Timing fields, excluded from determinism comparisons.
pub const TIMING_FIELDS: &[&str] = &["elapsed_ms", "total_elapsed_ms"];

fn stream_id(entry: &str, backend: BackendKind) -> u64 {
    let pos = list_identities().iter().position(|e| e.id == entry).unwrap_or(usize::MAX) as u64;
    pos * 2 + matches!(backend, BackendKind::Numeric) as u64
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn draw_int(rng: &mut ChaCha8Rng, (lo, hi): (i64, i64)) -> i64 {
    rng.gen_range(lo..=hi)
}

fn draw_exact(entry: &IdentityEntry, pool: &[Rational], rng: &mut ChaCha8Rng) -> Result<Assignment> {
    let mut a = Assignment::default();
    for s in &entry.slots {
        let v = match s.sort {
            SlotSort::Integer => Value::Int(draw_int(rng, s.range)),
            SlotSort::Monomial if s.square => {
                let c = pool.choose(rng).expect("nonempty pool");
                let evens: Vec<i64> = (s.range.0..=s.range.1).filter(|e| e % 2 == 0).collect();
                let e = *evens.choose(rng).ok_or_else(|| Error::NoAdmissibleSample(entry.id.into()))?;
                Value::Mono(QMonomial::new(Rational::from(c * c), e))
            }
            SlotSort::Monomial => {
                let c = pool.choose(rng).expect("nonempty pool");
                Value::Mono(QMonomial::new(c.clone(), draw_int(rng, s.range)))
            }
        };
        a.values.insert(s.name.to_string(), v);
    }
    Ok(a)
}

fn round2(x: f64) -> Rational {
    Rational::from(((x * 100.0).round() as i64, 100))
}

fn draw_numeric(entry: &IdentityEntry, rng: &mut ChaCha8Rng) -> Assignment {
    let mut a = Assignment::default();
    for s in &entry.slots {
        let v = match s.sort {
            SlotSort::Integer => Value::Int(draw_int(rng, s.range)),
            SlotSort::Monomial => {
                let r = rng.gen_range(s.modulus.0..=s.modulus.1);
                if rng.gen_bool(0.5) {
                    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    Value::Num(round2(sign * r), Rational::new())
                } else {
                    let t = rng.gen_range(0.0..std::f64::consts::TAU);
                    Value::Num(round2(r * t.cos()), round2(r * t.sin()))
                }
            }
        };
        a.values.insert(s.name.to_string(), v);
    }
    a
}

/// Low-order trial evaluation at the exact backend; filters samples the
/// engine cannot evaluate (poles, inadmissible series, violated constraints).
fn exact_admissible(entry: &IdentityEntry, a: &Assignment) -> bool {
    evaluate_identity_exact(entry, a, 4).is_ok()
}

fn numeric_admissible(entry: &IdentityEntry, a: &Assignment, cfg: &SampleConfig) -> bool {
    let Ok(qs) = cfg.q_values() else { return false };
    let trial = NumericConfig { precision_bits: 64, tol: 1e-6, ..cfg.numeric };
    qs.iter().all(|q| evaluate_identity_numeric(entry, &a.clone().with("q", q.clone()), &trial).is_ok())
}

fn all_integer(entry: &IdentityEntry) -> bool {
    entry.slots.iter().all(|s| s.sort == SlotSort::Integer)
}

/// Every point of the integer box of an all-integer entry.
fn integer_grid(entry: &IdentityEntry) -> Vec<Assignment> {
    let mut out = vec![Assignment::default()];
    for s in &entry.slots {
        out = out
            .into_iter()
            .flat_map(|a| (s.range.0..=s.range.1).map(move |v| a.clone().with(s.name, Value::Int(v))))
            .collect();
    }
    out
}

/// Deterministic samples for one entry and backend. Numeric samples do
/// not carry `q`; they are checked at every value of `cfg.numeric_q`.
pub fn sample_params(entry: &IdentityEntry, cfg: &SampleConfig, backend: BackendKind) -> Result<Vec<Assignment>> {
    if !entry.supports(backend) {
        return Err(Error::UnsupportedBackend(format!("{backend} for {}", entry.id)));
    }
    if backend == BackendKind::Exact && all_integer(entry) {
        return Ok(integer_grid(entry));
    }
    let pool = cfg.pool()?;
    let mut rng = rng_for(cfg.seed, stream_id(entry.id, backend));
    let mut out: Vec<Assignment> = Vec::with_capacity(cfg.count);
    let attempts = 40 * cfg.count;
    for _ in 0..attempts {
        if out.len() == cfg.count {
            break;
        }
        let a = match backend {
            BackendKind::Exact => draw_exact(entry, &pool, &mut rng)?,
            BackendKind::Numeric => draw_numeric(entry, &mut rng),
        };
        if out.contains(&a) {
            continue;
        }
        let ok = match backend {
            BackendKind::Exact => exact_admissible(entry, &a),
            BackendKind::Numeric => numeric_admissible(entry, &a, cfg),
        };
        if ok {
            out.push(a);
        }
    }
    let fallback = match backend {
        BackendKind::Exact => &entry.suggested,
        BackendKind::Numeric => &entry.numeric_points,
    };
    if out.len() < cfg.count {
        if fallback.is_empty() && out.is_empty() {
            return Err(Error::NoAdmissibleSample(entry.id.into()));
        }
        for a in fallback.iter().cycle().take(fallback.len().min(cfg.count - out.len())) {
            if !out.contains(a) {
                out.push(a.clone());
            }
        }
    }
    Ok(out)
}

/// Order of the first nonzero coefficient among the residual series, or
/// `None` if all vanish through `n`.
pub fn first_nonzero_order(res: &[LaurentSeries], n: i64) -> Option<i64> {
    res.iter().filter_map(|r| r.terms().find(|(e, _)| *e <= n).map(|(e, _)| e)).min()
}

/// Verifies one exact sample.
pub fn check_exact(entry: &IdentityEntry, a: &Assignment, n: i64, seed: u64, index: usize) -> Record {
    let t = Instant::now();
    let (verdict, first, detail) = match residual_exact(entry, a, n) {
        Ok(res) => match first_nonzero_order(&res, n) {
            None => (Verdict::Pass, None, None),
            Some(o) => (Verdict::Fail, Some(o), None),
        },
        Err(e) => (Verdict::from_error(&e), None, Some(e.to_string())),
    };
    Record {
        id: entry.id.into(),
        anchor: entry.anchor.into(),
        backend: BackendKind::Exact,
        assignment: a.clone(),
        verdict,
        residual: ResidualSummary::Exact { residual_first_nonzero_order: first },
        order_or_tol: OrderOrTol::Order(n),
        seed,
        sample_index: index,
        elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
        detail,
    }
}

/// Verifies one numeric sample (`a` includes `q`).
pub fn check_numeric(entry: &IdentityEntry, a: &Assignment, cfg: &NumericConfig, seed: u64, index: usize) -> Record {
    let t = Instant::now();
    let (verdict, mag, detail) = match residual_num(entry, a, cfg) {
        Ok(r) if r < cfg.tol => (Verdict::Pass, Some(r), None),
        Ok(r) => (Verdict::Fail, Some(r), None),
        Err(e) => (Verdict::from_error(&e), None, Some(e.to_string())),
    };
    Record {
        id: entry.id.into(),
        anchor: entry.anchor.into(),
        backend: BackendKind::Numeric,
        assignment: a.clone(),
        verdict,
        residual: ResidualSummary::Numeric { residual_magnitude: mag },
        order_or_tol: OrderOrTol::Tol(cfg.tol),
        seed,
        sample_index: index,
        elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
        detail,
    }
}

fn unsupported(entry: &IdentityEntry, backend: BackendKind, cfg: &SampleConfig, detail: String) -> Record {
    Record {
        id: entry.id.into(),
        anchor: entry.anchor.into(),
        backend,
        assignment: Assignment::default(),
        verdict: Verdict::Skipped("UnsupportedBackend".into()),
        residual: match backend {
            BackendKind::Exact => ResidualSummary::Exact { residual_first_nonzero_order: None },
            BackendKind::Numeric => ResidualSummary::Numeric { residual_magnitude: None },
        },
        order_or_tol: match backend {
            BackendKind::Exact => OrderOrTol::Order(cfg.exact_order),
            BackendKind::Numeric => OrderOrTol::Tol(cfg.numeric.tol),
        },
        seed: cfg.seed,
        sample_index: 0,
        elapsed_ms: 0.0,
        detail: Some(detail),
    }
}

struct Job<'a> {
    entry: &'a IdentityEntry,
    backend: BackendKind,
    assignment: Assignment,
    index: usize,
}

fn jobs_for<'a>(entry: &'a IdentityEntry, backend: BackendKind, cfg: &SampleConfig) -> Result<Vec<Job<'a>>> {
    let samples = sample_params(entry, cfg, backend)?;
    Ok(match backend {
        BackendKind::Exact => samples
            .into_iter()
            .enumerate()
            .map(|(index, assignment)| Job { entry, backend, assignment, index })
            .collect(),
        BackendKind::Numeric => {
            let qs = cfg.q_values()?;
            let mut v = Vec::new();
            for (i, a) in samples.into_iter().enumerate() {
                for (j, q) in qs.iter().enumerate() {
                    v.push(Job { entry, backend, assignment: a.clone().with("q", q.clone()), index: i * qs.len() + j });
                }
            }
            v
        }
    })
}

fn run_job(job: &Job, cfg: &SampleConfig) -> Record {
    match job.backend {
        BackendKind::Exact => check_exact(job.entry, &job.assignment, cfg.exact_order, cfg.seed, job.index),
        BackendKind::Numeric => check_numeric(job.entry, &job.assignment, &cfg.numeric, cfg.seed, job.index),
    }
}

fn sort_records(records: &mut [Record]) {
    records.sort_by(|a, b| (&a.id, a.backend, a.sample_index).cmp(&(&b.id, b.backend, b.sample_index)));
}

/// Resolves `all` or a comma-separated list of ids.
pub fn select(ids: &str) -> Result<Vec<&'static IdentityEntry>> {
    if ids.eq_ignore_ascii_case("all") {
        return Ok(list_identities().iter().collect());
    }
    ids.split(',').map(|s| crate::catalog::lookup(s.trim())).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: SampleConfig,
    pub totals: Totals,
    pub total_elapsed_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub header: ReportHeader,
    pub records: Vec<Record>,
}

impl Report {
    fn new(config: &SampleConfig, mut records: Vec<Record>, elapsed: f64) -> Report {
        sort_records(&mut records);
        let mut totals = Totals::default();
        for r in &records {
            match r.verdict {
                Verdict::Pass => totals.pass += 1,
                Verdict::Fail => totals.fail += 1,
                Verdict::Skipped(_) => totals.skipped += 1,
            }
        }
        Report {
            header: ReportHeader {
                tool: "qverify",
                version: env!("CARGO_PKG_VERSION"),
                seed: config.seed,
                config: config.clone(),
                totals,
                total_elapsed_ms: elapsed,
            },
            records,
        }
    }

    pub fn success(&self) -> bool {
        self.header.totals.fail == 0
    }

    /// Header line followed by one line per record.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&serde_json::json!({ "header": &self.header })).expect("serializable");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("serializable"));
            out.push('\n');
        }
        out
    }

    /// Human-readable per-identity summary.
    pub fn summary_table(&self) -> String {
        let mut rows: BTreeMap<(&str, BackendKind), Totals> = BTreeMap::new();
        for r in &self.records {
            let t = rows.entry((r.id.as_str(), r.backend)).or_default();
            match r.verdict {
                Verdict::Pass => t.pass += 1,
                Verdict::Fail => t.fail += 1,
                Verdict::Skipped(_) => t.skipped += 1,
            }
        }
        let w = rows.keys().map(|(id, _)| id.len()).max().unwrap_or(0).max(8);
        let mut s = format!("{:<w$} {:<8} {:>5} {:>5} {:>7}\n", "identity", "backend", "pass", "fail", "skipped");
        for ((id, b), t) in rows {
            let _ = writeln!(s, "{id:<w$} {:<8} {:>5} {:>5} {:>7}", b.to_string(), t.pass, t.fail, t.skipped);
        }
        let t = &self.header.totals;
        let _ = writeln!(s, "total: {} pass, {} fail, {} skipped", t.pass, t.fail, t.skipped);
        s
    }
}

/// Strips timing fields from a JSONL report, for determinism checks.
pub fn strip_timing(jsonl: &str) -> Result<Vec<serde_json::Value>> {
    fn strip(v: &mut serde_json::Value) {
        if let serde_json::Value::Object(m) = v {
            for f in TIMING_FIELDS {
                m.remove(*f);
            }
            for (_, x) in m.iter_mut() {
                strip(x);
            }
        }
    }
    jsonl
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string()))?;
            strip(&mut v);
            Ok(v)
        })
        .collect()
}

/// Runs every (entry, sample, backend) combination.
pub fn verify(entries: &[&IdentityEntry], cfg: &SampleConfig, backends: BackendSelector) -> Result<Report> {
    cfg.validate()?;
    let t = Instant::now();
    let mut records = Vec::new();
    let mut jobs = Vec::new();
    for e in entries {
        for b in backends.kinds() {
            if !e.supports(b) {
                records.push(unsupported(e, b, cfg, format!("{} has no {b} evaluation", e.id)));
                continue;
            }
            match jobs_for(e, b, cfg) {
                Ok(j) => jobs.extend(j),
                Err(err) => records.push(unsupported(e, b, cfg, err.to_string())),
            }
        }
    }
    records.par_extend(jobs.par_iter().map(|j| run_job(j, cfg)));
    Ok(Report::new(cfg, records, t.elapsed().as_secs_f64() * 1e3))
}

/// Verifies fixed assignments (with `q` for the numeric backend).
pub fn verify_assignments(
    entry: &IdentityEntry,
    assignments: &[Assignment],
    backend: BackendKind,
    cfg: &SampleConfig,
) -> Report {
    let t = Instant::now();
    let records: Vec<Record> = assignments
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let job = Job { entry, backend, assignment: a.clone(), index: i };
            run_job(&job, cfg)
        })
        .collect();
    Report::new(cfg, records, t.elapsed().as_secs_f64() * 1e3)
}

/// Exponent-by-exponent coefficients of each side and of the residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub columns: Vec<String>,
    /// Exponent and one coefficient per column.
    pub rows: Vec<(i64, Vec<Rational>)>,
    pub order: i64,
}

impl CoeffTable {
    fn from_columns(columns: Vec<(String, LaurentSeries)>, n: i64) -> Result<CoeffTable> {
        let mut exps: Vec<i64> = columns
            .iter()
            .flat_map(|(_, s)| s.terms().map(|(e, _)| e).filter(|e| *e <= n).collect::<Vec<_>>())
            .collect();
        exps.sort_unstable();
        exps.dedup();
        let rows = exps
            .into_iter()
            .map(|e| Ok((e, columns.iter().map(|(_, s)| s.coeff_through(e)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoeffTable { columns: columns.into_iter().map(|(c, _)| c).collect(), rows, order: n })
    }

    pub fn column(&self, name: &str) -> Option<Vec<(i64, Rational)>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|(e, v)| (*e, v[i].clone())).collect())
    }

    pub fn render(&self) -> String {
        let mut s = format!("{:>6}", "exp");
        for c in &self.columns {
            let _ = write!(s, "  {c:>24}");
        }
        s.push('\n');
        for (e, v) in &self.rows {
            let _ = write!(s, "{e:>6}");
            for c in v {
                let _ = write!(s, "  {:>24}", c.to_string());
            }
            s.push('\n');
        }
        let _ = writeln!(s, "(valid through q^{})", self.order);
        s
    }
}

/// Coefficient table of an entry: lhs, rhs, each alternative form, residual.
pub fn coeffs(entry: &IdentityEntry, a: &Assignment, n: i64) -> Result<CoeffTable> {
    let s = evaluate_identity_exact(entry, a, n)?;
    let residual = &s.lhs - &s.rhs;
    let mut cols = vec![("lhs".to_string(), s.lhs), ("rhs".to_string(), s.rhs)];
    cols.extend(s.also.into_iter().map(|(k, v)| (k.to_string(), v)));
    cols.push(("residual".to_string(), residual));
    CoeffTable::from_columns(cols, n)
}

/// Coefficient table of a single parameter expression.
pub fn coeffs_expr(x: &ParamExpr, a: &Assignment, n: i64) -> Result<CoeffTable> {
    let v = evaluate_exact(&crate::eval::Expr::Param(x.clone()), a, n)?;
    CoeffTable::from_columns(vec![("value".to_string(), v)], n)
}

/// Representation pairs compared by [`compare_rho`].
fn rho_pairs(arity: u8) -> Result<Vec<(RhoRep, RhoRep)>> {
    match arity {
        4 => Ok(vec![(RhoRep::RepA, RhoRep::RepB), (RhoRep::RepA, RhoRep::RepC)]),
        5 => Ok(vec![(RhoRep::Direct, RhoRep::Rho0)]),
        _ => Err(Error::ConstraintViolation(format!("compare-rho needs arity 4 or 5, got {arity}"))),
    }
}

fn rho_record(
    id: String,
    a: &Assignment,
    lhs: &crate::eval::Expr,
    rhs: &crate::eval::Expr,
    cfg: &SampleConfig,
    index: usize,
) -> Record {
    let t = Instant::now();
    let n = cfg.exact_order;
    let res = evaluate_exact(lhs, a, n).and_then(|l| Ok(&l - &evaluate_exact(rhs, a, n)?));
    let (verdict, first, detail) = match res {
        Ok(r) => match first_nonzero_order(&[r], n) {
            None => (Verdict::Pass, None, None),
            Some(o) => (Verdict::Fail, Some(o), None),
        },
        Err(e) => (Verdict::from_error(&e), None, Some(e.to_string())),
    };
    Record {
        id,
        anchor: String::new(),
        backend: BackendKind::Exact,
        assignment: a.clone(),
        verdict,
        residual: ResidualSummary::Exact { residual_first_nonzero_order: first },
        order_or_tol: OrderOrTol::Order(n),
        seed: cfg.seed,
        sample_index: index,
        elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
        detail,
    }
}

fn rho_sample(arity: u8, pool: &[Rational], rng: &mut ChaCha8Rng) -> Assignment {
    let mut a = Assignment::default();
    let names: &[&str] = if arity == 4 { &["a", "b", "c", "d"] } else { &["a", "b", "c", "d", "e"] };
    for n in names {
        let c = pool.choose(rng).expect("nonempty pool").clone();
        let e = if matches!(*n, "a" | "b") { rng.gen_range(0..=1) } else { rng.gen_range(1..=2) };
        a.values.insert(n.to_string(), Value::Mono(QMonomial::new(c, e)));
    }
    a
}

/// Equality of the representations of the `rho` family of the given arity
/// on seeded samples; arity 5 also checks the terminating form with
/// `d = -a q^(1+r)` for `r = 0..=5`.
pub fn compare_rho(arity: u8, cfg: &SampleConfig) -> Result<Report> {
    cfg.validate()?;
    let t = Instant::now();
    let pairs = rho_pairs(arity)?;
    let pool = cfg.pool()?;
    let mut rng = rng_for(cfg.seed, 1000 + arity as u64);
    let mut samples = Vec::new();
    for _ in 0..40 * cfg.count {
        if samples.len() == cfg.count {
            break;
        }
        let a = rho_sample(arity, &pool, &mut rng);
        let ok = pairs.iter().all(|(l, r)| {
            evaluate_exact(&rho_expr(arity, *l).unwrap(), &a, 4).is_ok()
                && evaluate_exact(&rho_expr(arity, *r).unwrap(), &a, 4).is_ok()
        });
        if ok && !samples.contains(&a) {
            samples.push(a);
        }
    }
    let mut jobs: Vec<(String, Assignment, crate::eval::Expr, crate::eval::Expr)> = Vec::new();
    for a in &samples {
        for (l, r) in &pairs {
            jobs.push((format!("rho{arity}:{l:?}={r:?}"), a.clone(), rho_expr(arity, *l)?, rho_expr(arity, *r)?));
        }
    }
    if arity == 5 {
        let mut term = BTreeMap::new();
        term.insert("d".to_string(), p("-a*q^(1+r)"));
        let direct = rho_expr(5, RhoRep::Direct)?.subst(&term);
        let terminating = rho_expr(5, RhoRep::Terminating)?.subst(&term);
        for (i, a) in samples.iter().enumerate() {
            let mut a = a.clone().with("r", Value::Int((i % 6) as i64));
            a.values.remove("d");
            jobs.push(("rho5:Direct=Terminating".into(), a, direct.clone(), terminating.clone()));
        }
    }
    let mut counters: BTreeMap<String, usize> = BTreeMap::new();
    let indexed: Vec<_> = jobs
        .into_iter()
        .map(|(id, a, l, r)| {
            let c = counters.entry(id.clone()).or_default();
            *c += 1;
            (id, a, l, r, *c - 1)
        })
        .collect();
    let records = indexed.par_iter().map(|(id, a, l, r, i)| rho_record(id.clone(), a, l, r, cfg, *i)).collect();
    Ok(Report::new(cfg, records, t.elapsed().as_secs_f64() * 1e3))
}

/// Cross-backend check: the exact series evaluated at a rational `q`
/// against the numeric value of the same expression there.
pub fn cross_backend(
    expr: &crate::eval::Expr,
    a: &Assignment,
    n: i64,
    q: &Rational,
    cfg: &NumericConfig,
) -> Result<f64> {
    let s = evaluate_exact(expr, a, n)?;
    let exact = s.eval_at(q);
    let numeric_env = a.clone().with("q", Value::Num(q.clone(), Rational::new()));
    let num = evaluate_numeric(expr, &numeric_env, *cfg)?;
    let ex = rug::Complex::with_val(cfg.precision_bits, &exact);
    Ok(relative_residual(&ex, &num))
}
