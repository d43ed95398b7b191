//! Acceptance suite: one PASS/FAIL line per criterion.

#[path = "../../core/tests/props/mod.rs"]
mod props;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use proptest::strategy::Strategy;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use qverify_core::catalog::{degeneration_pair, evaluate_identity_exact};
use qverify_core::engine::term_exact;
use qverify_core::harness::{cross_backend, strip_timing, ResidualSummary};
use qverify_core::*;
use rug::{Integer, Rational};

/// Exact truncation orders and numeric tolerances, pinned.
const RECIP_ORDER: i64 = 40;
const RECIP_SAMPLES: usize = 20;
const RECIP_SECONDS: f64 = 60.0;
const REP_ORDER: i64 = 40;
const REP_SAMPLES: usize = 10;
const DEGEN_TERMS: i64 = 12;
const DEGEN_ORDER: i64 = 30;
const FIN_ORDER: i64 = 60;
const QUINT_ORDER: i64 = 50;
const PRODUCT_ORDER: i64 = 40;
const PARTIAL_1_ORDER: i64 = 60;
const PARTIAL_D_ORDER: i64 = 40;
const NUMERIC_TOL: f64 = 1e-9;
const CROSS_TOL: f64 = 1e-12;
const CROSS_ORDER: i64 = 200;
const PROP_CASES: u32 = 256;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn env(s: &str) -> Assignment {
    Assignment::parse(s).unwrap()
}

fn cfg(count: usize, order: i64) -> SampleConfig {
    SampleConfig { seed: 7, count, exact_order: order, ..Default::default() }
}

fn exact_zero(r: &Record) -> bool {
    r.verdict == Verdict::Pass && matches!(r.residual, ResidualSummary::Exact { residual_first_nonzero_order: None })
}

/// First failing record of a report, if any.
fn first_bad(report: &Report) -> Option<String> {
    report.records.iter().find(|r| r.verdict != Verdict::Pass).map(|r| {
        format!("{} {} at {}: {:?} {}", r.id, r.backend, r.assignment, r.verdict, r.detail.clone().unwrap_or_default())
    })
}

fn without(a: &Assignment, names: &[&str]) -> String {
    let mut a = a.clone();
    for n in names {
        a.values.remove(*n);
    }
    a.to_string()
}

fn reciprocity() -> Outcome {
    let t = Instant::now();
    let mut notes = Vec::new();
    for id in ["RECIP2", "RECIP4", "RECIP5"] {
        let e = lookup(id).unwrap();
        let report = verify(&[e], &cfg(RECIP_SAMPLES, RECIP_ORDER), BackendSelector::Exact).unwrap();
        let distinct: BTreeSet<String> = report.records.iter().map(|r| r.assignment.to_string()).collect();
        if distinct.len() < RECIP_SAMPLES {
            return (false, format!("{id}: only {} distinct assignments", distinct.len()));
        }
        if let Some(r) = report.records.iter().find(|r| !exact_zero(r)) {
            return (false, format!("{id} at {}: {:?}", r.assignment, r.residual));
        }
        if id == "RECIP5" {
            let low = report
                .records
                .iter()
                .find(|r| ["c", "d", "e"].iter().any(|n| r.assignment.mono(n).unwrap().exponent() < 1));
            if let Some(r) = low {
                return (false, format!("RECIP5 sample {} has a parameter of order < 1", r.assignment));
            }
        }
        notes.push(format!("{id} {}", distinct.len()));
    }
    let secs = t.elapsed().as_secs_f64();
    (secs < RECIP_SECONDS, format!("{} samples through q^{RECIP_ORDER}, {secs:.1} s", notes.join(", ")))
}

fn representations() -> Outcome {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut rs = BTreeSet::new();
    for arity in [4, 5] {
        let report = compare_rho(arity, &cfg(REP_SAMPLES, REP_ORDER)).unwrap();
        if let Some(bad) = first_bad(&report) {
            return (false, bad);
        }
        for r in &report.records {
            *counts.entry(r.id.clone()).or_default() += 1;
            if r.id.ends_with("Terminating") {
                rs.insert(r.assignment.get("r").unwrap().to_string());
            }
        }
    }
    let short = counts.iter().find(|(id, n)| **n < REP_SAMPLES && !id.ends_with("Terminating"));
    if let Some((id, n)) = short {
        return (false, format!("{id}: {n} assignments"));
    }
    if rs.len() < 6 {
        return (false, format!("terminating case covers r in {rs:?} only"));
    }
    let summary: Vec<String> = counts.iter().map(|(id, n)| format!("{id} {n}")).collect();
    (true, format!("{} through q^{REP_ORDER}, r = 0..5", summary.join(", ")))
}

fn degeneration() -> Outcome {
    let (five, four) = degeneration_pair();
    let e = lookup("DEGEN_5TO4").unwrap();
    let samples = sample_params(e, &cfg(5, DEGEN_ORDER), BackendKind::Exact).unwrap();
    for a in &samples {
        for k in 0..=DEGEN_TERMS {
            let l = term_exact(&five, a, k, DEGEN_ORDER).unwrap();
            let r = term_exact(&four, a, k, DEGEN_ORDER).unwrap();
            if l != r {
                return (false, format!("term {k} differs at {a}"));
            }
        }
    }
    let report = verify_assignments(e, &samples, BackendKind::Exact, &cfg(5, DEGEN_ORDER));
    if let Some(bad) = first_bad(&report) {
        return (false, bad);
    }
    let e2 = lookup("DEGEN_5TO2").unwrap();
    let report = verify(&[e2], &cfg(5, RECIP_ORDER), BackendSelector::Exact).unwrap();
    if let Some(bad) = first_bad(&report) {
        return (false, bad);
    }
    (
        true,
        format!(
            "{} assignments termwise k <= {DEGEN_TERMS} and through q^{DEGEN_ORDER}; DEGEN_5TO2 {} through q^{RECIP_ORDER}",
            samples.len(),
            report.records.len()
        ),
    )
}

/// At least `want` assignments of the non-integer slots of `id`.
fn parameter_sets(id: &str, ints: &[&str], want: usize) -> Vec<Assignment> {
    let e = lookup(id).unwrap();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in sample_params(e, &cfg(4 * want, FIN_ORDER), BackendKind::Exact).unwrap() {
        if seen.insert(without(&a, ints)) {
            out.push(a);
        }
    }
    out.truncate(want);
    out
}

fn finite() -> Outcome {
    let mut notes = Vec::new();
    for (id, ints) in [("FIN_RS", &["r", "s"][..]), ("FIN_A", &["r", "s"]), ("FIN_C", &["r", "s"]), ("SYM_QM", &["m"])]
    {
        let sets = parameter_sets(id, ints, 5);
        if sets.len() < 5 {
            return (false, format!("{id}: {} parameter sets", sets.len()));
        }
        let mut grid = Vec::new();
        for base in &sets {
            if ints.len() == 2 {
                for r in 0..=8 {
                    for s in 0..=8 {
                        grid.push(base.clone().with("r", Value::Int(r)).with("s", Value::Int(s)));
                    }
                }
            } else {
                grid.extend((0..=8).map(|m| base.clone().with("m", Value::Int(m))));
            }
        }
        let report = verify_assignments(lookup(id).unwrap(), &grid, BackendKind::Exact, &cfg(1, FIN_ORDER));
        if let Some(r) = report.records.iter().find(|r| !exact_zero(r)) {
            return (false, format!("{id} at {}: {:?} {:?}", r.assignment, r.verdict, r.detail));
        }
        notes.push(format!("{id} {}", grid.len()));
    }
    let mut grid = Vec::new();
    for x in ["-3", "-1/2", "2", "5/3"] {
        for r in 0..=12 {
            for s in 0..=12 {
                grid.push(env(&format!("x={x}, r={r}, s={s}")));
            }
        }
    }
    let report = verify_assignments(lookup("PFAFF_FIN").unwrap(), &grid, BackendKind::Exact, &cfg(1, FIN_ORDER));
    if let Some(r) = report.records.iter().find(|r| !exact_zero(r)) {
        return (false, format!("PFAFF_FIN at {}: {:?}", r.assignment, r.verdict));
    }
    notes.push(format!("PFAFF_FIN {}", grid.len()));
    let g181 = lookup("GOULD_181").unwrap();
    for n in 0..=12u32 {
        let s = evaluate_identity_exact(g181, &env(&format!("n={n}")), 0).unwrap();
        let want = LaurentSeries::monomial(Rational::from(Integer::from(1) << (2 * n)), 0, 0);
        if s.lhs != want || s.rhs != want {
            return (false, format!("GOULD_181 n = {n}: {:?}", s.lhs.coeff_through(0)));
        }
    }
    notes.push("GOULD_181 n <= 12 equals 4^n".into());
    (true, notes.join(", "))
}

fn products() -> Outcome {
    let check = |id: &str, list: &[&str], order: i64| -> Option<String> {
        let a: Vec<Assignment> = list.iter().map(|s| env(s)).collect();
        let report = verify_assignments(lookup(id).unwrap(), &a, BackendKind::Exact, &cfg(1, order));
        report.records.iter().find(|r| !exact_zero(r)).map(|r| format!("{id} at {}: {:?}", r.assignment, r.verdict))
    };
    if let Some(bad) = check("QUINT", &["a=2*q", "a=-3*q", "a=1/2*q"], QUINT_ORDER) {
        return (false, bad);
    }
    if let Some(bad) = check("QUINT_2VAR", &["x=2*q, z=3*q", "x=-q, z=1/2*q"], PRODUCT_ORDER) {
        return (false, bad);
    }
    let report = verify(&[lookup("XI_BILATERAL").unwrap()], &cfg(5, PRODUCT_ORDER), BackendSelector::Exact).unwrap();
    if report.records.len() < 5 {
        return (false, format!("XI_BILATERAL: {} samples", report.records.len()));
    }
    if let Some(r) = report.records.iter().find(|r| !exact_zero(r)) {
        return (false, format!("XI_BILATERAL at {}: {:?} {:?}", r.assignment, r.verdict, r.detail));
    }
    (
        true,
        format!(
            "QUINT 3 through q^{QUINT_ORDER}, QUINT_2VAR 2 and XI_BILATERAL {} through q^{PRODUCT_ORDER}",
            report.records.len()
        ),
    )
}

fn known_values() -> Outcome {
    let mut problems = Vec::new();
    let p1 = lookup("PARTIAL_1").unwrap();
    for a in ["a=2", "a=q", "a=3*q^2"] {
        match residual_exact(p1, &env(a), PARTIAL_1_ORDER) {
            Ok(r) if r[0].is_zero_through(PARTIAL_1_ORDER).unwrap() => {}
            Ok(r) => problems.push(format!("PARTIAL_1 {a}: residual {:?}", r[0].min_order())),
            Err(e) => problems.push(format!("PARTIAL_1 {a}: {e}")),
        }
    }
    let pd = lookup("PARTIAL_D").unwrap();
    let mut passed = 0;
    for d in ["q", "2*q^2"] {
        let mut lhs: Option<LaurentSeries> = None;
        for a in ["2", "q", "3*q^2", "-1/2"] {
            let at = env(&format!("a={a}, d={d}"));
            match residual_exact(pd, &at, PARTIAL_D_ORDER) {
                Ok(r) if r[0].is_zero_through(PARTIAL_D_ORDER).unwrap() => {
                    let s = evaluate_identity_exact(pd, &at, PARTIAL_D_ORDER).unwrap().lhs;
                    if lhs.as_ref().is_some_and(|l| *l != s) {
                        problems.push(format!("PARTIAL_D d={d}: depends on a"));
                    }
                    lhs = Some(s);
                    passed += 1;
                }
                Ok(_) => problems.push(format!("PARTIAL_D a={a}, d={d}: nonzero residual")),
                Err(e) => problems.push(format!("PARTIAL_D a={a}, d={d}: {e}")),
            }
        }
    }
    if problems.is_empty() {
        (true, format!("PARTIAL_1 3 through q^{PARTIAL_1_ORDER}, PARTIAL_D {passed} through q^{PARTIAL_D_ORDER}"))
    } else {
        (false, format!("{passed} PARTIAL_D cases pass; {}", problems.join("; ")))
    }
}

fn numeric() -> Outcome {
    let mut config = cfg(5, 40);
    config.numeric.tol = NUMERIC_TOL;
    let mut worst = 0f64;
    let mut entries = 0;
    for e in list_identities().iter().filter(|e| e.supports(BackendKind::Numeric)) {
        let report = verify(&[e], &config, BackendSelector::Numeric).unwrap();
        if let Some(bad) = first_bad(&report) {
            return (false, bad);
        }
        let mut per_q: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for r in &report.records {
            let q = r.assignment.get("q").unwrap().to_string();
            per_q.entry(q).or_default().insert(without(&r.assignment, &["q"]));
            if let ResidualSummary::Numeric { residual_magnitude: Some(m) } = r.residual {
                worst = worst.max(m);
            }
        }
        if per_q.len() < 2 || per_q.values().any(|s| s.len() < 5) {
            return (
                false,
                format!("{}: points per q {:?}", e.id, per_q.values().map(|s| s.len()).collect::<Vec<_>>()),
            );
        }
        entries += 1;
    }
    let quarter = Rational::from((1, 4));
    let mut cross = 0;
    let mut cross_worst = 0f64;
    let mut singular = 0;
    for id in ["RECIP2", "RECIP4", "RECIP5", "RHO4_REPS", "QUINT", "QUINT_2VAR", "PARTIAL_1", "XI_REPS"] {
        let e = lookup(id).unwrap();
        for a in &e.suggested {
            let sides: Vec<_> =
                [&e.lhs, &e.rhs].iter().map(|x| cross_backend(x, a, CROSS_ORDER, &quarter, &config.numeric)).collect();
            // q = 1/4 is a singular point of this assignment
            if sides.iter().any(|d| matches!(d, Err(Error::PoleInTerm { .. } | Error::PochInfiniteZero(_)))) {
                singular += 1;
                continue;
            }
            for d in sides {
                match d {
                    Ok(d) if d < CROSS_TOL => cross_worst = cross_worst.max(d),
                    Ok(d) => return (false, format!("cross-backend {id} at {a}: {d:e}")),
                    Err(err) => return (false, format!("cross-backend {id} at {a}: {err}")),
                }
            }
            cross += 1;
        }
    }
    (
        cross >= 10,
        format!(
            "{entries} entries, max residual {worst:.1e} < {NUMERIC_TOL:e}; {cross} cross-backend assignments at q = 1/4 ({singular} singular there), max {cross_worst:.1e} < {CROSS_TOL:e}"
        ),
    )
}

fn primitives() -> Outcome {
    fn run<S: Strategy>(name: &str, s: S, f: impl Fn(S::Value) -> props::Check) -> std::result::Result<(), String> {
        let config = Config { cases: PROP_CASES, failure_persistence: None, ..Config::default() };
        let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
        runner.run(&s, f).map_err(|e| format!("{name}: {e}"))
    }
    use props::*;
    let results = [
        run("poch recurrence", (mono(), -6i64..=6), |(m, n)| poch_recurrence(m, n)),
        run("poch splitting", (mono(), 0i64..=5, 0i64..=5), |(m, a, b)| poch_splitting(m, a, b)),
        run("negative index", (mono(), 1i64..=6), |(m, n)| negative_index_involution(m, n)),
        run("general base", (mono(), 0i64..=6), |(m, n)| general_base_matches_monomial(m, n)),
        run("qbinom symmetry", (0i64..=12, 0i64..=12), |(n, k)| qbinom_symmetry_and_pascal(n, k)),
        run("qbinom at 1", (0i64..=14, 0i64..=14), |(n, k)| qbinom_at_one_is_binomial(n, k)),
        run("commutative", (series(), series()), |(a, b)| ring_commutative(a, b)),
        run("associative", (series(), series(), series()), |(a, b, c)| ring_associative(a, b, c)),
        run("distributive", (series(), series(), series()), |(a, b, c)| ring_distributive(a, b, c)),
        run("inverse", series(), additive_inverse_and_identity),
        run("division", (unit_like(), unit_like()), |(a, b)| division_undoes_multiplication(a, b)),
    ];
    let n = results.len();
    match results.into_iter().find_map(|r| r.err()) {
        Some(e) => (false, e),
        None => (true, format!("{n} properties x {PROP_CASES} cases")),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_qverify");
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = Command::new(bin).args(["verify", "all", "--seed", "7", "--json"]).arg(&path).output().unwrap();
        (out.status.code(), std::fs::read_to_string(path).unwrap())
    };
    let (c1, j1) = run("a.jsonl");
    let (c2, j2) = run("b.jsonl");
    let (s1, s2) = (strip_timing(&j1).unwrap(), strip_timing(&j2).unwrap());
    if s1 != s2 {
        return (false, "reports differ".into());
    }
    let fails = s1[0]["header"]["totals"]["fail"].as_u64().unwrap();
    let expected = if fails == 0 { Some(0) } else { Some(1) };
    if c1 != expected || c2 != expected {
        return (false, format!("exit codes {c1:?}, {c2:?} with {fails} fails"));
    }
    let failing =
        Command::new(bin).args(["verify", "QUINT", "--backend", "numeric", "--tol", "1e-300"]).output().unwrap();
    let unknown = Command::new(bin).args(["verify", "NOPE"]).output().unwrap();
    if failing.status.code() != Some(1) || unknown.status.code() != Some(2) {
        return (
            false,
            format!("exit codes {:?} on fails, {:?} on error", failing.status.code(), unknown.status.code()),
        );
    }
    (true, format!("{} records identical modulo timing, exit {} / 1 / 2", s1.len() - 1, c1.unwrap()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("reciprocity", reciprocity),
        ("representations", representations),
        ("degeneration", degeneration),
        ("finite identities", finite),
        ("product identities", products),
        ("known values", known_values),
        ("numeric", numeric),
        ("primitives", primitives),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = f();
        failed += usize::from(!ok);
        let mark = if ok { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{mark} [{}] {name}: {detail} ({:.1} s)", i + 1, t.elapsed().as_secs_f64());
    }
    let _ = writeln!(out, "{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
