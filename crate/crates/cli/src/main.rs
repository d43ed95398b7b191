use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qverify_core::catalog::{lookup, BackendKind, IdentityEntry};
use qverify_core::{
    coeffs, coeffs_expr, compare_rho, list_identities, select, verify, verify_assignments, Assignment, BackendSelector,
    ParamExpr, Report, SampleConfig,
};

#[derive(Parser)]
#[command(name = "qverify", version, about = "Verify q-series identities exactly and numerically")]
struct Cli {
    /// JSON file with sampling settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the catalog.
    List {
        /// Emit the catalog as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Verify identities on seeded samples.
    Verify {
        /// Identity id, comma-separated ids, or `all`.
        ids: String,
        #[arg(long, default_value = "both", value_parser = ["exact", "numeric", "both"])]
        backend: String,
        /// Verify these assignments instead of sampling (repeatable).
        #[arg(long)]
        assign: Vec<String>,
        #[command(flatten)]
        run: RunArgs,
        /// Relative residual threshold for numeric passes.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Coefficient table of an identity (or of a parameter expression).
    Coeffs {
        /// Catalog id, or a monomial such as `-3/2*q^4`.
        #[arg(allow_hyphen_values = true)]
        id: String,
        #[arg(long, default_value = "")]
        assign: String,
        /// Highest exponent shown.
        #[arg(long)]
        order: Option<i64>,
    },
    /// Check that the representations of the rho family agree.
    CompareRho {
        #[arg(long, value_parser = ["4", "5"])]
        arity: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Exact truncation order N (residual checked through q^N).
    #[arg(long)]
    order: Option<i64>,
    /// Samples per identity and backend.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSONL report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

impl RunArgs {
    fn apply(&self, cfg: &mut SampleConfig) {
        if let Some(n) = self.order {
            cfg.exact_order = n;
        }
        if let Some(k) = self.samples {
            cfg.count = k;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> Result<SampleConfig, String> {
    match path {
        None => Ok(SampleConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            SampleConfig::from_json(&text).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn slots_of(e: &IdentityEntry) -> String {
    e.slots.iter().map(|s| s.name).collect::<Vec<_>>().join(",")
}

fn backends_of(e: &IdentityEntry) -> String {
    e.backends().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")
}

fn list(json: bool) -> Result<ExitCode, String> {
    if json {
        let doc: Vec<serde_json::Value> = list_identities()
            .iter()
            .map(|e| {
                serde_json::json!({
                    "id": e.id,
                    "anchor": e.anchor,
                    "slots": e.slots,
                    "constraints": e.constraints,
                    "backends": e.backends(),
                    "suggested": e.suggested,
                })
            })
            .collect();
        out(&(serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())? + "\n"));
        return Ok(ExitCode::SUCCESS);
    }
    let mut s = String::new();
    for e in list_identities() {
        s += &format!("{:<14} {:<16} {:<14} {}\n", e.id, slots_of(e), backends_of(e), e.anchor);
    }
    out(&s);
    Ok(ExitCode::SUCCESS)
}

fn emit(report: &Report, json: Option<&PathBuf>) -> Result<ExitCode, String> {
    if let Some(p) = json {
        std::fs::write(p, report.to_jsonl()).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    out(&report.summary_table());
    Ok(if report.success() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn forced(entry: &IdentityEntry, assigns: &[String], backend: &str, cfg: &SampleConfig) -> Result<Report, String> {
    let kind = match backend {
        "exact" => BackendKind::Exact,
        "numeric" => BackendKind::Numeric,
        _ => return Err("--assign needs --backend exact or numeric".into()),
    };
    let list =
        assigns.iter().map(|s| Assignment::parse(s)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
    Ok(verify_assignments(entry, &list, kind, cfg))
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let mut cfg = load_config(cli.config.as_ref())?;
    match cli.command {
        Command::List { json } => list(json),
        Command::Verify { ids, backend, assign, run, tol } => {
            run.apply(&mut cfg);
            if let Some(t) = tol {
                cfg.numeric.tol = t;
            }
            cfg.validate().map_err(|e| e.to_string())?;
            let report = if assign.is_empty() {
                let entries = select(&ids).map_err(|e| e.to_string())?;
                let sel = BackendSelector::parse(&backend).map_err(|e| e.to_string())?;
                verify(&entries, &cfg, sel).map_err(|e| e.to_string())?
            } else {
                let entry = lookup(&ids).map_err(|e| e.to_string())?;
                forced(entry, &assign, &backend, &cfg)?
            };
            emit(&report, run.json.as_ref())
        }
        Command::Coeffs { id, assign, order } => {
            let n = order.unwrap_or(cfg.exact_order);
            let a = Assignment::parse(&assign).map_err(|e| e.to_string())?;
            let table = match lookup(&id) {
                Ok(entry) => {
                    let a = if a.values.is_empty() { entry.suggested[0].clone() } else { a };
                    out(&format!("{} at {a}\n", entry.id));
                    coeffs(entry, &a, n)
                }
                Err(_) => ParamExpr::parse(&id).and_then(|x| coeffs_expr(&x, &a, n)),
            }
            .map_err(|e| e.to_string())?;
            out(&table.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::CompareRho { arity, run } => {
            run.apply(&mut cfg);
            let arity: u8 = arity.parse().map_err(|_| "bad arity".to_string())?;
            let report = compare_rho(arity, &cfg).map_err(|e| e.to_string())?;
            emit(&report, run.json.as_ref())
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn out(s: &str) {
    let mut o = std::io::stdout().lock();
    let _ = o.write_all(s.as_bytes()).and_then(|_| o.flush());
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
