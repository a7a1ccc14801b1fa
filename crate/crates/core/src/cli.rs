//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::analyzer::{error_report, post_query_gram, run_exact, run_sampled};
use crate::blackbox::{Property, TruthTable};
use crate::circuit::{parse_program, serialize_program, Builtin, Program, Symbol};
use crate::classical::{classical_verdict, default_baseline, dfp_stats, santha_threshold};
use crate::evolver::{evolve, GpConfig};
use crate::tuner::{default_domain, tune_theta};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Failed(String),
    #[error("{0} criteria failed")]
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Failed(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Verification(_) => EXIT_VERIFY,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qquery", version, about = "Analyze, tune and evolve small quantum query circuits")]
pub struct Cli {
    /// Also write the JSON result to this path.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact error report and classical comparison.
    Analyze {
        /// `builtin:NAME` or a circuit file.
        #[arg(long)]
        circuit: String,
        /// Property such as `or`, `xor`, `andor:2`; defaults to the builtin's own.
        #[arg(long)]
        property: Option<String>,
        /// Angle parameter of a builtin circuit.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Classical Las Vegas expected queries to compare against.
        #[arg(long = "Q")]
        big_q: Option<f64>,
    },
    /// Minimax angle of a builtin template.
    Tune {
        #[arg(long)]
        template: String,
        #[arg(long)]
        property: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
    /// Expected queries of depth-first pruning, as CSV.
    Dfp {
        #[arg(long)]
        depth: usize,
        /// Root connective, AND or OR.
        #[arg(long, default_value = "AND")]
        root: String,
    },
    /// Largest error that still beats every classical algorithm.
    Threshold {
        #[arg(long)]
        q: f64,
        #[arg(long = "Q")]
        big_q: f64,
        /// 1 for one-sided error, 2 for two-sided.
        #[arg(long, default_value_t = 2)]
        sided: u8,
    },
    /// Genetic search for one-query circuits.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Where to write the best circuit.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the per-generation CSV trace.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Monte Carlo run on one black-box function.
    Sample {
        #[arg(long)]
        circuit: String,
        #[arg(long = "f")]
        function: String,
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Inner products of the states just after an oracle call.
    Gram {
        #[arg(long)]
        circuit: String,
        #[arg(long, default_value_t = 0)]
        oracle: usize,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
    },
    /// Run the acceptance checks.
    Verify {
        /// Skip the genetic search criterion.
        #[arg(long)]
        quick: bool,
        /// Only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

struct Loaded {
    label: String,
    program: Program,
    builtin: Option<Builtin>,
}

fn load_circuit(spec: &str, theta: Option<f64>) -> Result<Loaded, CliError> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        let b: Builtin = name.parse().map_err(CliError::Usage)?;
        let theta = theta.unwrap_or(0.0);
        return Ok(Loaded { label: spec.to_string(), program: b.program(theta), builtin: Some(b) });
    }
    if theta.is_some() {
        return Err(CliError::Usage("--theta applies only to builtin circuits".into()));
    }
    let text = read(Path::new(spec))?;
    let program = parse_program(&text).map_err(|e| CliError::Parse(format!("{spec}:{e}")))?;
    Ok(Loaded { label: spec.to_string(), program, builtin: None })
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn resolve_property(given: Option<&str>, builtin: Option<Builtin>) -> Result<Property, CliError> {
    match (given, builtin) {
        (Some(s), _) => s.parse().map_err(|e| CliError::Usage(format!("--property: {e}"))),
        (None, Some(b)) => Ok(b.property()),
        (None, None) => Err(CliError::Usage("--property is required for circuit files".into())),
    }
}

fn failed(e: impl std::fmt::Display) -> CliError {
    CliError::Failed(e.to_string())
}

/// Runs one command, writing its primary output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let seed = cli.seed.unwrap_or(0);
    let io = |e: std::io::Error| CliError::Failed(e.to_string());
    let json_primary = matches!(cli.command, Command::Analyze { .. } | Command::Tune { .. } | Command::Sample { .. } | Command::Gram { .. });
    let json: Option<Value> = match cli.command {
        Command::Analyze { circuit, property, theta, big_q } => {
            let c = load_circuit(&circuit, theta)?;
            let prop = resolve_property(property.as_deref(), c.builtin)?;
            let report = error_report(&c.program, &prop).map_err(failed)?;
            let mut v = report.to_json(&c.label);
            if let Some(q) = big_q.or_else(|| default_baseline(&prop)) {
                v["verdict"] = serde_json::to_value(classical_verdict(&report, q)).map_err(failed)?;
            }
            Some(v)
        }
        Command::Tune { template, property, lo, hi } => {
            let b: Builtin = template.parse().map_err(CliError::Usage)?;
            let prop = resolve_property(property.as_deref(), Some(b))?;
            let (dlo, dhi) = default_domain(b);
            let r = tune_theta(b, &prop, lo.unwrap_or(dlo), hi.unwrap_or(dhi)).map_err(failed)?;
            Some(r.to_json())
        }
        Command::Dfp { depth, root } => {
            let root_and = match root.to_ascii_uppercase().as_str() {
                "AND" => true,
                "OR" => false,
                other => return Err(CliError::Usage(format!("--root must be AND or OR, got {other}"))),
            };
            let stats = dfp_stats(&Property::AltTree { depth, root_and }).map_err(|e| CliError::Usage(e.to_string()))?;
            out.write_all(stats.to_csv().as_bytes()).map_err(io)?;
            cli.json.is_some().then(|| {
                json!({
                    "depth": depth,
                    "root": if root_and { "AND" } else { "OR" },
                    "worst_case": stats.worst_case.to_string(),
                    "uniform_average": stats.uniform_average.to_string(),
                })
            })
        }
        Command::Threshold { q, big_q, sided } => {
            if !(sided == 1 || sided == 2) {
                return Err(CliError::Usage(format!("--sided must be 1 or 2, got {sided}")));
            }
            if big_q.is_nan() || big_q <= 0.0 {
                return Err(CliError::Usage("--Q must be positive".into()));
            }
            let t = santha_threshold(q, big_q, sided);
            writeln!(out, "{t:.6}").map_err(io)?;
            cli.json.is_some().then(|| json!({"q": q, "Q": big_q, "sided": sided, "threshold": t}))
        }
        Command::Evolve { config, out: best_path, trace } => {
            let text = read(&config)?;
            let mut cfg = GpConfig::parse(&text).map_err(|e| CliError::Parse(format!("{}: {e}", config.display())))?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let r = evolve(&cfg).map_err(failed)?;
            let best = serialize_program(&r.best.to_program());
            match &best_path {
                Some(p) => write(p, &best)?,
                None => out.write_all(best.as_bytes()).map_err(io)?,
            }
            if let Some(p) = &trace {
                write(p, &r.trace_csv())?;
            }
            let mut v = json!({"seed": cfg.seed, "best_fitness": r.best_fitness, "trace": r.trace, "best": best});
            if let Some(rep) = &r.report {
                v["report"] = rep.to_json("evolved");
            }
            Some(v)
        }
        Command::Sample { circuit, function, shots, theta } => {
            let c = load_circuit(&circuit, theta)?;
            let f: TruthTable = function.parse().map_err(|e| CliError::Usage(format!("--f: {e}")))?;
            let s = run_sampled(&c.program, &f, seed, shots).map_err(failed)?;
            let exact = run_exact(&c.program, &f).map_err(failed)?;
            let d = s.distribution();
            let probs = |d: &crate::analyzer::OutcomeDistribution| {
                json!({"0": d.prob(Symbol::Zero), "1": d.prob(Symbol::One), "?": d.prob(Symbol::Unknown)})
            };
            Some(json!({
                "program": c.label,
                "f": f.to_string(),
                "seed": seed,
                "shots": shots,
                "counts": {"0": s.counts[0], "1": s.counts[1], "?": s.counts[2]},
                "empirical": probs(&d),
                "exact": probs(&exact),
                "total_variation": d.total_variation(&exact),
            }))
        }
        Command::Gram { circuit, oracle, theta } => {
            let c = load_circuit(&circuit, theta)?;
            let g = post_query_gram(&c.program, oracle).map_err(failed)?;
            let matrix: Vec<Vec<[f64; 2]>> = g.matrix.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
            Some(json!({
                "program": c.label,
                "functions": g.functions.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                "matrix": matrix,
            }))
        }
        Command::Verify { quick, only } => {
            let checks: Vec<verify::Check> = if only.is_empty() {
                verify::run_all(quick)
            } else {
                only.iter().map(|&id| verify::criterion(id)).collect()
            };
            for c in &checks {
                writeln!(out, "{c}").map_err(io)?;
                for d in &c.details {
                    writeln!(out, "    {d}").map_err(io)?;
                }
            }
            let failures = checks.iter().filter(|c| !c.passed).count();
            writeln!(out, "{} passed, {failures} failed", checks.len() - failures).map_err(io)?;
            if let Some(p) = &cli.json {
                let v = json!(checks
                    .iter()
                    .map(|c| json!({"id": c.id, "title": c.title, "passed": c.passed, "details": c.details}))
                    .collect::<Vec<_>>());
                write(p, &format!("{v:#}\n"))?;
            }
            if failures > 0 {
                return Err(CliError::Verification(failures));
            }
            return Ok(());
        }
    };
    if let Some(v) = json {
        let text = format!("{v:#}\n");
        if json_primary {
            out.write_all(text.as_bytes()).map_err(io)?;
        }
        if let Some(p) = &cli.json {
            write(p, &text)?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
