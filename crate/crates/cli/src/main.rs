mod gates;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quk::certgeom::{certificate_check, spectral_report};
use quk::composite::{density_certify, trichotomy_classify, Budgets, DensityStatus};
use quk::diagonalgates::{
    bicharacter_test, coboundary, orbit_mixing_test, ts_mixing_report, PhaseFunction,
};
use quk::paulicliff::{clifford_membership, DEFAULT_UNITARY_TOL};
use quk::Error;
use serde_json::{json, Value};

use crate::gates::GateSpec;

const MAX_D: u64 = 100;
const DIAGONAL_TOL: f64 = 1e-10;
const SIG_DIGITS: usize = 12;

const EXIT_INTERNAL: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_NOT_UNITARY: u8 = 3;
const EXIT_FINITE: u8 = 10;
const EXIT_INCONCLUSIVE: u8 = 11;

/// Certify qudit gate sets: Clifford membership, irreducibility and density.
#[derive(Parser, Debug)]
#[command(name = "quk", version)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Options {
    /// Maximum word length for the certificate search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_words: Option<u64>,
    /// Maximum number of projective elements in the closure.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_closure: Option<u64>,
    /// Maximum number of distinct elements visited by the certificate search.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_search: Option<u64>,
    /// Unitarity tolerance for matrix files.
    #[arg(long, global = true, value_parser = positive_f64)]
    tol: Option<f64>,
    /// Also write the JSON result to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a dimension and recommend a universal gate set.
    Classify { d: u64 },
    /// Report Clifford membership and spectral data for one gate.
    CheckGate { d: u64, gate: GateSpec },
    /// Run the density pipeline on a gate set.
    Certify {
        d: u64,
        #[arg(required = true)]
        gates: Vec<GateSpec>,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

struct Failure {
    code: u8,
    message: String,
    deviation: Option<f64>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, deviation) = match &e {
            Error::NotUnitary { deviation } => (EXIT_NOT_UNITARY, Some(*deviation)),
            Error::InvalidDimension { .. }
            | Error::NotCoprime { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotAUnit { .. }
            | Error::InvalidArgument(_)
            | Error::MalformedMatrix(_)
            | Error::BudgetExceeded { .. } => (EXIT_INVALID, None),
            _ => (EXIT_INTERNAL, None),
        };
        Failure {
            code,
            message: e.to_string(),
            deviation,
        }
    }
}

fn invalid(message: String) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message,
        deviation: None,
    }
}

fn check_d(d: u64) -> Result<(), Failure> {
    if (2..=MAX_D).contains(&d) {
        Ok(())
    } else {
        Err(invalid(format!(
            "d must satisfy 2 <= d <= {MAX_D}, got {d}"
        )))
    }
}

/// Rounds every non-integer number to 12 significant digits.
fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => {
            Value::Object(o.into_iter().map(|(k, v)| (k, round_floats(v))).collect())
        }
        other => other,
    }
}

fn budgets(opts: &Options) -> Budgets {
    let mut b = Budgets::default();
    if let Some(n) = opts.budget_words {
        b.max_word_len = n as usize;
    }
    if let Some(n) = opts.budget_closure {
        b.closure_cap = n as usize;
    }
    if let Some(n) = opts.budget_search {
        b.max_search_elements = n as usize;
    }
    b
}

fn classify(d: u64) -> Result<(Value, u8), Failure> {
    check_d(d)?;
    Ok((
        serde_json::to_value(trichotomy_classify(d)?).expect("serializable"),
        0,
    ))
}

fn check_gate(d: u64, spec: &GateSpec, tol: f64) -> Result<(Value, u8), Failure> {
    check_d(d)?;
    let u = spec.build(d, tol)?;
    let witness = clifford_membership(d, &u)?;
    let spectral = spectral_report(&u)?;
    let certificate = certificate_check(&u)?.is_some();
    let diagonal = if u.is_diagonal(DIAGONAL_TOL) {
        let zeta = PhaseFunction::from_diagonal(&u, DIAGONAL_TOL)?;
        let mixing = match spec {
            GateSpec::Ts(s) => ts_mixing_report(d, *s)?,
            _ => orbit_mixing_test(&zeta)?,
        };
        json!({
            "bicharacter": bicharacter_test(&coboundary(&zeta)),
            "mixing": mixing,
        })
    } else {
        Value::Null
    };
    let report = json!({
        "d": d,
        "gate": spec.to_string(),
        "clifford": witness.member,
        "sl2_image": witness.sl2_image.map(|s| s.entries),
        "failure_axis": witness.failure_axis,
        "spectral": spectral,
        "certificate": certificate,
        "diagonal": diagonal,
    });
    Ok((report, 0))
}

fn certify(d: u64, specs: &[GateSpec], opts: &Options, tol: f64) -> Result<(Value, u8), Failure> {
    check_d(d)?;
    let gens = specs
        .iter()
        .map(|s| s.build(d, tol))
        .collect::<quk::Result<Vec<_>>>()?;
    let verdict = density_certify(d, &gens, budgets(opts))?;
    let code = match verdict.status {
        DensityStatus::Dense => 0,
        DensityStatus::Finite => EXIT_FINITE,
        DensityStatus::Inconclusive => EXIT_INCONCLUSIVE,
    };
    let mut value = serde_json::to_value(&verdict).expect("serializable");
    value["gates"] = json!(specs.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    Ok((value, code))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("QUK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        invalid(format!(
            "QUK_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure {
            code: EXIT_INTERNAL,
            message: e.to_string(),
            deviation: None,
        })
}

fn run(cli: &Cli) -> Result<(Value, u8), Failure> {
    configure_threads()?;
    let tol = cli.opts.tol.unwrap_or(DEFAULT_UNITARY_TOL);
    match &cli.command {
        Command::Classify { d } => classify(*d),
        Command::CheckGate { d, gate } => check_gate(*d, gate, tol),
        Command::Certify { d, gates } => certify(*d, gates, &cli.opts, tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((value, code)) => {
            let text = serde_json::to_string_pretty(&round_floats(value)).expect("serializable");
            println!("{text}");
            if let Some(path) = &cli.opts.json {
                if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_INTERNAL);
                }
            }
            ExitCode::from(code)
        }
        Err(f) => {
            let err = json!({ "error": f.message, "deviation": f.deviation });
            eprintln!("{}", round_floats(err));
            ExitCode::from(f.code)
        }
    }
}
