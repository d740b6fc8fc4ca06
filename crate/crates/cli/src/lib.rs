//! Command dispatch for the `motive-periods` binary.
//!
//! Exit statuses: 0 success, 1 output could not be written, 2 unreadable or
//! invalid input, 3 numeric failure or a failed check.

use clap::{Parser, Subcommand, ValueEnum};
use motive_periods::galois::{
    case_table, conjecture_report, dim_galois, is_deficient, validate_profile, DependenceProfile,
    MotiveShape, ReportValue,
};
use motive_periods::motive::{full_period_matrix, OneMotiveSpec};
use motive_periods::schema::{
    fmt_f64, parse_motive, parse_motive_with_profile, period_matrix_csv, period_matrix_json,
    to_json, Cx, Fx,
};
use motive_periods::verify::{run_motive_suite, CheckRecord, Tolerances, VerifyOptions};
use motive_periods::Error;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const SEED_VAR: &str = "MOTIVE_PERIODS_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Full period matrix of a motive
    Periods,
    /// Run the numerical verification suites
    Verify,
    /// Dimension of the motivic Galois group
    GaloisDim,
    /// Dimensions for one curve, one point and one torus factor
    CaseTable,
    /// The transcendence statement implied by the dimension
    Conjecture,
    /// Check declared abelian relations numerically
    ValidateProfile,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "motive-periods",
    version,
    about = "Periods of 1-motives over elliptic curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol_analytic: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol_quadrature: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CommandRequest {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl CommandRequest {
    /// Seed from `MOTIVE_PERIODS_SEED`, 42 when unset.
    pub fn from_cli(cli: Cli) -> Result<Self, String> {
        let seed = match std::env::var(SEED_VAR) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| format!("{SEED_VAR} must be an unsigned integer, got {v:?}"))?,
            Err(_) => 42,
        };
        for (flag, v) in [
            ("--tol-analytic", cli.tol_analytic),
            ("--tol-quadrature", cli.tol_quadrature),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{flag} must be a positive number"));
            }
        }
        Ok(CommandRequest {
            command: cli.command,
            input_path: cli.input,
            output_path: cli.output,
            format: cli.format,
            tolerances: Tolerances {
                analytic: cli.tol_analytic,
                quadrature: cli.tol_quadrature,
            },
            seed,
        })
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    /// The artifact, written even when checks fail.
    pub output: Option<String>,
    pub diagnostics: Vec<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome {
            status: 0,
            output: Some(output),
            diagnostics: vec![],
        }
    }

    fn failure(status: i32, message: String) -> Self {
        Outcome {
            status,
            output: None,
            diagnostics: vec![message],
        }
    }
}

fn status_of(e: &Error) -> i32 {
    match e {
        Error::Schema { .. } | Error::Input(_) => 2,
        _ => 3,
    }
}

fn error_outcome(e: Error) -> Outcome {
    let status = status_of(&e);
    let msg = match &e {
        Error::Schema { path, message } => format!("invalid input at {path}: {message}"),
        other => format!("error: {other}"),
    };
    Outcome::failure(status, msg)
}

fn read_input(path: Option<&Path>) -> Result<String, Outcome> {
    let path = path.ok_or_else(|| Outcome::failure(2, "this command needs --input".into()))?;
    std::fs::read_to_string(path)
        .map_err(|e| Outcome::failure(2, format!("cannot read {}: {e}", path.display())))
}

/// A motive on its own or the `motive` member of a combined document.
fn load_motive(text: &str) -> motive_periods::Result<OneMotiveSpec> {
    let combined = serde_json::from_str::<serde_json::Value>(text)
        .map(|v| v.get("motive").is_some())
        .unwrap_or(false);
    if combined {
        parse_motive_with_profile(text).map(|(m, _)| m)
    } else {
        parse_motive(text)
    }
}

/// Runs a request without touching the output path.
pub fn run(req: &CommandRequest) -> Outcome {
    let text = if req.command == Command::CaseTable {
        None
    } else {
        match read_input(req.input_path.as_deref()) {
            Ok(t) => Some(t),
            Err(o) => return o,
        }
    };
    let text = text.as_deref().unwrap_or("");
    let result = match req.command {
        Command::Periods => periods(text, req.format),
        Command::Verify => verify(text, req),
        Command::GaloisDim => galois_dim(text, req.format),
        Command::CaseTable => Ok(Outcome::ok(case_table_out(req.format))),
        Command::Conjecture => conjecture(text, req.format),
        Command::ValidateProfile => validate(text, req.format),
    };
    result.unwrap_or_else(error_outcome)
}

/// Runs a request and writes its artifact to the output path or stdout.
pub fn execute(req: &CommandRequest) -> i32 {
    let outcome = run(req);
    for d in &outcome.diagnostics {
        eprintln!("{d}");
    }
    if let Some(out) = &outcome.output {
        let written = match &req.output_path {
            Some(p) => {
                std::fs::write(p, out).map_err(|e| format!("cannot write {}: {e}", p.display()))
            }
            None => {
                use std::io::Write;
                std::io::stdout()
                    .write_all(out.as_bytes())
                    .map_err(|e| format!("cannot write output: {e}"))
            }
        };
        if let Err(msg) = written {
            eprintln!("{msg}");
            return 1;
        }
    }
    outcome.status
}

fn periods(text: &str, format: Format) -> motive_periods::Result<Outcome> {
    let m = load_motive(text)?;
    let pm = full_period_matrix(&m)?;
    Ok(Outcome::ok(match format {
        Format::Json => period_matrix_json(&pm),
        Format::Csv => period_matrix_csv(&pm),
    }))
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    passed: bool,
    seed: u64,
    checks: &'a [CheckRecord],
}

fn verify(text: &str, req: &CommandRequest) -> motive_periods::Result<Outcome> {
    let m = load_motive(text)?;
    let opts = VerifyOptions {
        tolerances: req.tolerances,
        seed: req.seed,
        ..Default::default()
    };
    let checks = run_motive_suite(&m, &opts);
    let passed = checks.iter().all(|c| c.passed);
    let output = match req.format {
        Format::Json => to_json(&VerifyOut {
            passed,
            seed: req.seed,
            checks: &checks,
        }),
        Format::Csv => {
            let mut s = String::from("name,passed,max_residual,tolerance,samples\n");
            for c in &checks {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c.name,
                    c.passed,
                    fmt_f64(c.max_residual),
                    fmt_f64(c.tolerance),
                    c.samples
                ));
            }
            s
        }
    };
    let diagnostics = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| match &c.error {
            Some(e) => format!("check {} failed: {e}", c.name),
            None => format!(
                "check {} failed: residual {} exceeds {}",
                c.name,
                fmt_f64(c.max_residual),
                fmt_f64(c.tolerance)
            ),
        })
        .collect();
    Ok(Outcome {
        status: if passed { 0 } else { 3 },
        output: Some(output),
        diagnostics,
    })
}

#[derive(Serialize)]
struct DimsOut {
    r: usize,
    s: usize,
    n: usize,
    dim_reductive: usize,
    dim_b: usize,
    dim_z1: usize,
    dim_z_over_z1: usize,
    dim_ur: usize,
    dim_total: usize,
    deficient: bool,
}

fn dims_out(shape: &MotiveShape, profile: &DependenceProfile) -> motive_periods::Result<DimsOut> {
    let d = dim_galois(shape, profile)?;
    Ok(DimsOut {
        r: shape.r,
        s: shape.s,
        n: shape.n(),
        dim_reductive: d.dim_reductive,
        dim_b: d.dim_b,
        dim_z1: d.dim_z1,
        dim_z_over_z1: d.dim_z_over_z1,
        dim_ur: d.dim_ur,
        dim_total: d.dim_total,
        deficient: is_deficient(shape, profile)?,
    })
}

fn galois_dim(text: &str, format: Format) -> motive_periods::Result<Outcome> {
    let (m, profile) = parse_motive_with_profile(text)?;
    let d = dims_out(&MotiveShape::of(&m), &profile)?;
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&d),
        Format::Csv => format!(
            "r,s,n,dim_reductive,dim_b,dim_z1,dim_z_over_z1,dim_ur,dim_total,deficient\n{},{},{},{},{},{},{},{},{},{}\n",
            d.r, d.s, d.n, d.dim_reductive, d.dim_b, d.dim_z1, d.dim_z_over_z1, d.dim_ur, d.dim_total, d.deficient
        ),
    }))
}

#[derive(Serialize)]
struct CaseRowOut {
    case: &'static str,
    dim_ur: usize,
    cm: usize,
    non_cm: usize,
}

fn case_table_out(format: Format) -> String {
    let rows: Vec<CaseRowOut> = case_table()
        .into_iter()
        .map(|r| CaseRowOut {
            case: r.label,
            dim_ur: r.dim_ur,
            cm: r.cm_total,
            non_cm: r.non_cm_total,
        })
        .collect();
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = String::from("case,dim_ur,cm,non_cm\n");
            for r in &rows {
                s.push_str(&format!(
                    "\"{}\",{},{},{}\n",
                    r.case, r.dim_ur, r.cm, r.non_cm
                ));
            }
            s
        }
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum ValueOut {
    Number(Cx),
    Point(Vec<Option<Cx>>),
}

#[derive(Serialize)]
struct EntryOut {
    label: String,
    value: ValueOut,
}

#[derive(Serialize)]
struct ConjectureOut {
    shape: &'static str,
    lhs: Vec<EntryOut>,
    rhs: usize,
    dims: DimsOut,
    statement: String,
}

fn conjecture(text: &str, format: Format) -> motive_periods::Result<Outcome> {
    let (m, profile) = parse_motive_with_profile(text)?;
    let rep = conjecture_report(&m, &profile)?;
    let lhs: Vec<EntryOut> = rep
        .lhs
        .into_iter()
        .map(|e| EntryOut {
            label: e.label,
            value: match e.value {
                ReportValue::Number(z) => ValueOut::Number(Cx(z)),
                ReportValue::Point(v) => {
                    ValueOut::Point(v.into_iter().map(|z| z.map(Cx)).collect())
                }
            },
        })
        .collect();
    let out = ConjectureOut {
        shape: rep.shape,
        rhs: rep.rhs,
        dims: dims_out(&MotiveShape::of(&m), &profile)?,
        statement: rep.inequality_text,
        lhs,
    };
    Ok(Outcome::ok(match format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut s = String::from("label,re,im\n");
            for e in &out.lhs {
                match &e.value {
                    ValueOut::Number(z) => s.push_str(&format!(
                        "{},{},{}\n",
                        e.label,
                        fmt_f64(z.0.re),
                        fmt_f64(z.0.im)
                    )),
                    ValueOut::Point(coords) => {
                        for (t, z) in coords.iter().enumerate() {
                            let (re, im) = z.map_or((String::new(), String::new()), |z| {
                                (fmt_f64(z.0.re), fmt_f64(z.0.im))
                            });
                            s.push_str(&format!("\"{}.{}\",{re},{im}\n", e.label, t + 1));
                        }
                    }
                }
            }
            s
        }
    }))
}

#[derive(Serialize)]
struct ResidualOut {
    relation: usize,
    curve: usize,
    combination: Cx,
    denominator: Option<u32>,
    residual: Fx,
    flagged: bool,
}

fn validate(text: &str, format: Format) -> motive_periods::Result<Outcome> {
    let (m, profile) = parse_motive_with_profile(text)?;
    let residuals: Vec<ResidualOut> = validate_profile(&m, &profile)?
        .into_iter()
        .map(|r| ResidualOut {
            relation: r.index + 1,
            curve: r.curve + 1,
            combination: Cx(r.combination),
            denominator: r.denominator,
            residual: Fx(r.residual),
            flagged: r.flagged,
        })
        .collect();
    let diagnostics: Vec<String> = residuals
        .iter()
        .filter(|r| r.flagged)
        .map(|r| {
            format!(
                "abelian relation {} on curve {} does not hold numerically (residual {})",
                r.relation,
                r.curve,
                fmt_f64(r.residual.0)
            )
        })
        .collect();
    let output = match format {
        Format::Json => to_json(&residuals),
        Format::Csv => {
            let mut s = String::from("relation,curve,denominator,residual,flagged\n");
            for r in &residuals {
                s.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.relation,
                    r.curve,
                    r.denominator.map(|d| d.to_string()).unwrap_or_default(),
                    fmt_f64(r.residual.0),
                    r.flagged
                ));
            }
            s
        }
    };
    Ok(Outcome {
        status: if diagnostics.is_empty() { 0 } else { 3 },
        output: Some(output),
        diagnostics,
    })
}
