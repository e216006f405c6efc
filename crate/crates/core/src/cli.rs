//! Command-line front end. Each command reads a system file and returns a
//! JSON report; the binary only parses arguments and prints.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::hourglass::{check_hourglass, HourglassOptions, HourglassStatus};
use crate::matrix::NormKind;
use crate::matset::{MatrixSet, DEFAULT_LIMIT};
use crate::oracle::{exhaustive_extremum, DEFAULT_BUDGET};
use crate::spectral::{analyze, product_bounds, AnalyzeOptions, VerdictBasis};
use crate::system::{parse_system_str, SystemDescription};
use crate::trajectory::{greedy_trajectory_with, MonotoneObjective, TrajectoryOptions};
use crate::Direction;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_NO_DOMINANT: i32 = 4;

/// Slack used when comparing product growth rates with member extrema.
const CONSISTENCY_TOL: f64 = 1e-8;
/// Relative slack between greedy and exhaustive objective values.
const TRIAL_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "posswitch", version, about = "Stability analysis for positive switching systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremal spectral radii and stability verdicts.
    Analyze(AnalyzeArgs),
    /// Greedy extremal trajectory from a starting state.
    Trajectory(TrajectoryArgs),
    /// Cross-check the verdicts against brute-force enumeration.
    Verify(VerifyArgs),
    /// Search for violations of the hourglass axioms.
    Hourglass(HourglassArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub path: PathBuf,
    /// Also bound the joint spectral radius from all products of this length.
    #[arg(long)]
    pub oracle_depth: Option<usize>,
    #[arg(long, default_value = "inf")]
    pub norm: NormKind,
    /// Random vectors for the hourglass check of sets outside the H-families.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    pub path: PathBuf,
    /// Comma-separated starting state; all ones by default.
    #[arg(long)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, default_value = "max")]
    pub direction: Direction,
    /// Objectives to report: l1, l2, linf or weighted:w1,w2,...
    #[arg(long = "nu", default_values = ["l1"])]
    pub nu: Vec<MonotoneObjective>,
    #[arg(long)]
    pub renormalize: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub max_depth: usize,
    /// Random starting states for the greedy-versus-exhaustive comparison.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct HourglassArgs {
    pub path: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated vector tested before the random ones.
    #[arg(long)]
    pub include_witness: Option<String>,
}

/// A failed command: exit code plus a message for standard error.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::Validation { .. }
            | Error::Io(_)
            | Error::InvalidArgument(_)
            | Error::InvalidObjective(_)
            | Error::NonPositiveVector { .. }
            | Error::NegativeInput { .. }
            | Error::DimMismatch { .. }
            | Error::NotSquare { .. } => EXIT_USAGE,
            Error::BudgetExceeded { .. } | Error::CardinalityOverflow { .. } => EXIT_BUDGET,
            Error::NoDominantMatrix { .. } => EXIT_NO_DOMINANT,
            _ => EXIT_FAILURE,
        };
        let message = match &e {
            Error::NoDominantMatrix { step: Some(k), .. } => format!("{e} (reached at step {k})"),
            _ => e.to_string(),
        };
        CliError { code, message }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Command output with enough provenance to reproduce it.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub input_sha256: String,
    pub seed: u64,
    pub flags: BTreeMap<&'static str, Value>,
    pub result: Value,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

struct Loaded {
    input: String,
    sha256: String,
    system: SystemDescription,
    set: MatrixSet,
}

fn load(path: &Path) -> CliResult<Loaded> {
    let bytes = std::fs::read(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let src = String::from_utf8(bytes.clone()).map_err(|_| CliError::usage("input is not valid UTF-8"))?;
    let system = parse_system_str(&src)?;
    let set = system.evaluate(DEFAULT_LIMIT)?;
    Ok(Loaded {
        input: path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned()),
        sha256: hex::encode(Sha256::digest(&bytes)),
        system,
        set,
    })
}

fn document(
    command: &'static str,
    loaded: &Loaded,
    seed: u64,
    flags: BTreeMap<&'static str, Value>,
    result: Value,
) -> ReportDocument {
    ReportDocument {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        input: loaded.input.clone(),
        input_sha256: loaded.sha256.clone(),
        seed,
        flags,
        result,
    }
}

fn system_summary(loaded: &Loaded) -> Value {
    json!({
        "expression": loaded.system.expr().to_string(),
        "blocks": loaded.system.sets().iter().map(|(name, s)| {
            (name.clone(), json!({
                "kind": s.variant_name(),
                "mode": s.mode(),
                "dims": s.dims(),
                "cardinality": s.cardinality(),
            }))
        }).collect::<BTreeMap<_, _>>(),
        "members": loaded.set.cardinality(),
        "dims": loaded.set.dims(),
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports always serialize")
}

fn parse_vector(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("{what}: bad coordinate `{}`: {e}", t.trim())))
        })
        .collect()
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> CliResult<ReportDocument> {
    let loaded = load(&args.path)?;
    let opts = AnalyzeOptions {
        oracle_depth: args.oracle_depth,
        norm: args.norm,
        samples: args.samples,
        seed: args.seed,
        ..AnalyzeOptions::default()
    };
    let report = analyze(&loaded.set, &opts)?;
    let flags = BTreeMap::from([
        ("oracle_depth", to_value(&args.oracle_depth)),
        ("norm", to_value(&args.norm)),
        ("samples", json!(args.samples)),
    ]);
    let result = json!({ "system": system_summary(&loaded), "analysis": report });
    Ok(document("analyze", &loaded, args.seed, flags, result))
}

pub fn cmd_trajectory(args: &TrajectoryArgs) -> CliResult<ReportDocument> {
    let loaded = load(&args.path)?;
    let dim = loaded.set.dims().1;
    let x0 = match &args.x0 {
        Some(text) => parse_vector(text, "x0")?,
        None => vec![1.0; dim],
    };
    if x0.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(CliError::usage("x0 must be strictly positive"));
    }
    if x0.len() != dim {
        return Err(CliError::usage(format!("x0 has {} coordinates, the system has dimension {dim}", x0.len())));
    }
    for nu in &args.nu {
        nu.validate(dim)?;
    }
    let mut traj = greedy_trajectory_with(
        &loaded.set,
        &x0,
        args.steps,
        args.direction,
        &TrajectoryOptions { renormalize: args.renormalize },
    )?;
    for nu in &args.nu {
        traj.evaluate(nu)?;
    }
    let l1 = traj.final_state().iter().sum::<f64>().ln() - x0.iter().sum::<f64>().ln();
    let flags = BTreeMap::from([
        ("x0", to_value(&x0)),
        ("steps", json!(args.steps)),
        ("direction", json!(args.direction)),
        ("nu", json!(args.nu.iter().map(MonotoneObjective::name).collect::<Vec<_>>())),
        ("renormalize", json!(args.renormalize)),
    ]);
    let result = json!({
        "system": system_summary(&loaded),
        "trajectory": traj,
        "l1_growth_rate": (l1 / args.steps as f64).exp(),
    });
    Ok(document("trajectory", &loaded, args.seed, flags, result))
}

#[derive(Debug, Serialize)]
struct PropertyCheck {
    name: String,
    /// `pass`, `fail`, or `expected-for-non-H` when the set is not known to
    /// be an H-set and the property is only guaranteed for those.
    status: &'static str,
    detail: Value,
}

fn check(name: String, ok: bool, h_set: bool, detail: Value) -> PropertyCheck {
    let status = match (ok, h_set) {
        (true, _) => "pass",
        (false, true) => "fail",
        (false, false) => "expected-for-non-H",
    };
    PropertyCheck { name, status, detail }
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<ReportDocument> {
    if args.max_depth == 0 {
        return Err(CliError::usage("--max-depth must be at least 1"));
    }
    let loaded = load(&args.path)?;
    let set = &loaded.set;
    let report = analyze(set, &AnalyzeOptions { seed: args.seed, ..AnalyzeOptions::default() })?;
    let h_set = report.verdict_basis == VerdictBasis::Finrel;
    let mut checks = Vec::new();

    for depth in 1..=args.max_depth {
        let b = product_bounds(set, depth, NormKind::Inf, DEFAULT_BUDGET)?;
        let upper_ok = b.jsr_lower <= report.rho_max + CONSISTENCY_TOL;
        let lower_ok = b.lsr_upper >= report.rho_min - CONSISTENCY_TOL;
        checks.push(check(
            format!("depth-{depth}-products"),
            upper_ok && lower_ok,
            h_set,
            json!({
                "products": b.products,
                "jsr_lower": b.jsr_lower,
                "jsr_lower_witness": b.jsr_lower_witness,
                "jsr_upper": b.jsr_upper,
                "lsr_upper": b.lsr_upper,
                "lsr_upper_witness": b.lsr_upper_witness,
                "rho_max": report.rho_max,
                "rho_min": report.rho_min,
            }),
        ));
    }

    // the longest horizon the oracle can afford for every trial
    let k = set.cardinality().exact().unwrap_or(u64::MAX);
    let steps = (1..=args.max_depth)
        .take_while(|&n| crate::matset::Cardinality::pow(k, n).within(DEFAULT_BUDGET / 10))
        .last()
        .unwrap_or(1);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let dim = set.dims().1;
    for trial in 0..args.trials {
        let x0: Vec<f64> = (0..dim).map(|_| 10f64.powf(rng.gen_range(-1.0..=1.0))).collect();
        for direction in [Direction::Max, Direction::Min] {
            let greedy = match greedy_trajectory_with(set, &x0, steps, direction, &TrajectoryOptions::default()) {
                Ok(t) => t,
                Err(Error::NoDominantMatrix { x, candidate, offender, step }) => {
                    checks.push(check(
                        format!("trial-{trial}-{direction}-greedy"),
                        false,
                        h_set,
                        json!({ "x0": x0, "no_dominant_at": x, "step": step, "members": [candidate, offender] }),
                    ));
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let final_state = greedy.final_state();
            let mut values = Vec::new();
            let mut ok = true;
            for nu in MonotoneObjective::NORMS {
                let g = nu.eval_unchecked(&final_state);
                let best = exhaustive_extremum(set, &x0, steps, &nu, direction, DEFAULT_BUDGET)?.best_value;
                ok &= (g - best).abs() <= TRIAL_TOL * best.abs().max(f64::MIN_POSITIVE);
                values.push(json!({ "nu": nu.name(), "greedy": g, "exhaustive": best }));
            }
            checks.push(check(
                format!("trial-{trial}-{direction}-greedy"),
                ok,
                h_set,
                json!({ "x0": x0, "steps": steps, "values": values }),
            ));
        }
    }

    let failed = checks.iter().filter(|c| c.status == "fail").count();
    let flags = BTreeMap::from([
        ("max_depth", json!(args.max_depth)),
        ("trials", json!(args.trials)),
    ]);
    let result = json!({
        "system": system_summary(&loaded),
        "rho_max": report.rho_max,
        "rho_min": report.rho_min,
        "hset_status": report.hset_status,
        "verdict_basis": report.verdict_basis,
        "checks": checks,
        "failed": failed,
        "all_pass": failed == 0,
    });
    Ok(document("verify", &loaded, args.seed, flags, result))
}

pub fn cmd_hourglass(args: &HourglassArgs) -> CliResult<ReportDocument> {
    if args.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let loaded = load(&args.path)?;
    let forced = match &args.include_witness {
        Some(text) => {
            let x = parse_vector(text, "include-witness")?;
            if x.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(CliError::usage("witness vector must be strictly positive"));
            }
            vec![x]
        }
        None => Vec::new(),
    };
    let verdict = check_hourglass(
        &loaded.set,
        &HourglassOptions { samples: args.samples, seed: args.seed, forced: forced.clone(), limit: DEFAULT_LIMIT },
    )?;
    let label = match verdict.status {
        HourglassStatus::Pass => "sampled-pass",
        HourglassStatus::Fail => "falsified",
    };
    let flags = BTreeMap::from([
        ("samples", json!(args.samples)),
        ("include_witness", to_value(&forced.first())),
    ]);
    let result = json!({
        "system": system_summary(&loaded),
        "h_family": loaded.set.is_h_family(),
        "hset_status": label,
        "verdict": verdict,
    });
    Ok(document("hourglass", &loaded, args.seed, flags, result))
}

/// Runs a parsed command line; returns the exit code and the report text.
pub fn run(cli: &Cli) -> CliResult<String> {
    let doc = match &cli.command {
        Command::Analyze(a) => cmd_analyze(a)?,
        Command::Trajectory(a) => cmd_trajectory(a)?,
        Command::Verify(a) => cmd_verify(a)?,
        Command::Hourglass(a) => cmd_hourglass(a)?,
    };
    Ok(doc.to_json())
}
