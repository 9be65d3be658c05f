//! Command-line driver.
//!
//! Exit codes: 0 success, 1 verification found a progression, 2 usage or
//! parse error, 3 internal invariant breach (a set failed certification).

pub mod report;
pub mod setfile;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::apcore;
use crate::behrend;
use crate::bounds;
use crate::elkin::{self, DEFAULT_TRIALS};
use crate::error::Error;
use crate::oracle;
use report::{RunReport, SweepRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_FREE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "progfree", version, about = "Large subsets of {1..N} with no 3-term arithmetic progression")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Number of random (theta, alpha) trials
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiplier on the annulus thickness formula
    #[arg(long = "c-delta", default_value_t = 1.0)]
    pub c_delta: f64,
    /// Worker threads (affects wall time only)
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a certified progression-free subset of {1..N}
    Construct {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        run: RunArgs,
        /// Use this torus dimension instead of ceil(sqrt(2 log2 N))
        #[arg(long = "d-override")]
        d_override: Option<usize>,
        /// Write the set file here
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        report: ReportFormat,
    },
    /// Check a set file for 3-term progressions
    Verify { path: PathBuf },
    /// Torus construction, Behrend baseline and bound values at one N
    Compare {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        run: RunArgs,
    },
    /// CSV table of both constructions and both bounds over several N
    Sweep {
        /// Comma-separated list of N values
        #[arg(long = "n-list")]
        n_list: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact r3(N) by branch and bound
    Oracle {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = oracle::DEFAULT_NODE_BUDGET)]
        budget: u64,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CertificationFailed(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    usage(format!("i/o error: {e}"))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    // commands that may run on a dedicated pool buffer their output
    let mut buf = Vec::new();
    let code = match command {
        Command::Construct {
            n,
            run,
            d_override,
            out: path,
            report,
        } => with_threads(run.threads, || cmd_construct(n, &run, d_override, path, report, &mut buf))?,
        Command::Verify { path } => cmd_verify(&path, &mut buf)?,
        Command::Compare { n, run } => with_threads(run.threads, || cmd_compare(n, &run, &mut buf))?,
        Command::Sweep { n_list, run } => with_threads(run.threads, || cmd_sweep(&n_list, &run, &mut buf))?,
        Command::Oracle { n, budget } => cmd_oracle(n, budget, &mut buf)?,
    };
    out.write_all(&buf).map_err(io_failure)?;
    Ok(code)
}

fn with_threads<F>(threads: Option<usize>, f: F) -> Result<i32, Failure>
where
    F: FnOnce() -> Result<i32, Failure> + Send,
{
    match threads {
        None => f(),
        Some(0) => Err(usage("--threads must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| usage(format!("cannot start thread pool: {e}")))?
            .install(f),
    }
}

fn cmd_construct(
    n: u64,
    run: &RunArgs,
    d_override: Option<usize>,
    path: Option<PathBuf>,
    format: ReportFormat,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let start = Instant::now();
    let params = elkin::derive_params_with(n, run.c_delta, run.trials, run.seed, d_override)?;
    let built = elkin::construct(&params)?;
    if !built.set.is_certified() {
        return Err(Failure {
            code: EXIT_INTERNAL,
            message: "construction returned an uncertified set".into(),
        });
    }
    if let Some(path) = path {
        fs::write(&path, setfile::to_string(&built.set)).map_err(io_failure)?;
    }
    let report = RunReport {
        command: "construct".into(),
        n,
        d: params.d,
        delta: params.delta,
        r: params.spec.r(),
        seed: run.seed,
        trials: run.trials,
        c_delta: run.c_delta,
        size: built.set.len() as u64,
        raw_size: built.best.raw_size,
        ap_count: built.best.ap_count,
        best_trial: built.best.trial_index,
        elapsed_ms: start.elapsed().as_millis() as u64,
        vol_s_estimate: built.volume.mean,
        vol_s_std_error: built.volume.std_error,
        size_floor: built.floor.floor,
        shape_term: built.floor.shape_term,
        behrend_size: None,
        behrend_bound: bounds::behrend_bound(n)?,
        elkin_bound: bounds::elkin_bound(n)?,
    };
    let text = match format {
        ReportFormat::Json => report.to_json() + "\n",
        ReportFormat::Csv => report.to_csv(),
    };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn cmd_verify(path: &PathBuf, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = fs::read_to_string(path).map_err(io_failure)?;
    let mut set = setfile::parse_set(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    if apcore::verify_ap_free(&mut set) {
        writeln!(out, "ok: {} elements, no 3-term progression", set.len()).map_err(io_failure)?;
        Ok(EXIT_OK)
    } else {
        let t = apcore::first_3ap(&set).expect("a progression exists");
        writeln!(out, "progression found: {t}").map_err(io_failure)?;
        Ok(EXIT_NOT_FREE)
    }
}

#[derive(Serialize)]
struct Comparison {
    n: u64,
    d: usize,
    delta: f64,
    r: f64,
    elkin_size: u64,
    behrend_size: u64,
    behrend_digits: u32,
    behrend_base: u64,
    vol_s_estimate: f64,
    size_floor: f64,
    shape_term: f64,
    bounds: bounds::BoundReport,
    r3_exact: Option<usize>,
}

/// N at or below which `compare` also runs the exact oracle.
const COMPARE_ORACLE_LIMIT: u64 = 40;

fn cmd_compare(n: u64, run: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let params = elkin::derive_params(n, run.c_delta, run.trials, run.seed)?;
    let built = elkin::construct(&params)?;
    let baseline = behrend::behrend_construct(n)?;
    let r3_exact = if n <= COMPARE_ORACLE_LIMIT {
        Some(oracle::exact_r3(n, oracle::DEFAULT_NODE_BUDGET)?.r3)
    } else {
        None
    };
    let cmp = Comparison {
        n,
        d: params.d,
        delta: params.delta,
        r: params.spec.r(),
        elkin_size: built.set.len() as u64,
        behrend_size: baseline.set.len() as u64,
        behrend_digits: baseline.params.digits,
        behrend_base: baseline.params.base,
        vol_s_estimate: built.volume.mean,
        size_floor: built.floor.floor,
        shape_term: built.floor.shape_term,
        bounds: bounds::bound_report(n, built.set.len() as u64)?,
        r3_exact,
    };
    let text = serde_json::to_string_pretty(&cmp).expect("comparison serializes");
    writeln!(out, "{text}").map_err(io_failure)?;
    Ok(EXIT_OK)
}

pub fn parse_n_list(text: &str) -> Result<Vec<u64>, String> {
    text.split(',')
        .map(|part| {
            let part = part.trim();
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(format!("malformed N value {part:?} in --n-list"));
            }
            part.parse().map_err(|_| format!("N value {part} is too large"))
        })
        .collect()
}

/// One sweep row. Both sets are certified by their constructors.
pub fn sweep_row(n: u64, run: &RunArgs) -> crate::error::Result<SweepRow> {
    let params = elkin::derive_params(n, run.c_delta, run.trials, run.seed)?;
    let built = elkin::construct(&params)?;
    let baseline = behrend::behrend_construct(n)?;
    let elkin_bound = bounds::elkin_bound(n)?;
    Ok(SweepRow {
        n,
        d: params.d,
        delta: params.delta,
        r: params.spec.r(),
        elkin_size: built.set.len() as u64,
        behrend_size: baseline.set.len() as u64,
        behrend_bound: bounds::behrend_bound(n)?,
        elkin_bound,
        ratio: built.set.len() as f64 / elkin_bound,
    })
}

fn cmd_sweep(n_list: &str, run: &RunArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let ns = parse_n_list(n_list).map_err(usage)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for n in ns {
        w.serialize(sweep_row(n, run)?)
            .map_err(|e| usage(format!("csv error: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| usage(format!("csv error: {e}")))?;
    out.write_all(&bytes).map_err(io_failure)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OracleOutput<'a> {
    n: u64,
    r3: usize,
    witness: &'a [u64],
    nodes_explored: u64,
}

fn cmd_oracle(n: u64, budget: u64, out: &mut dyn Write) -> Result<i32, Failure> {
    let res = oracle::exact_r3(n, budget)?;
    let text = serde_json::to_string(&OracleOutput {
        n,
        r3: res.r3,
        witness: res.witness.elements(),
        nodes_explored: res.nodes_explored,
    })
    .expect("oracle output serializes");
    writeln!(out, "{text}").map_err(io_failure)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("progfree").chain(args.iter().copied()), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn n_list_parsing() {
        assert_eq!(parse_n_list("1000,10000, 100000").unwrap(), vec![1000, 10_000, 100_000]);
        assert!(parse_n_list("10,,20").is_err());
        assert!(parse_n_list("10,x").is_err());
        assert!(parse_n_list("-5").is_err());
    }

    #[test]
    fn missing_n_is_usage_error() {
        let (code, _, err) = run_args(&["construct"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn bad_parameters_exit_two() {
        assert_eq!(run_args(&["construct", "--n", "5"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["construct", "--n", "100", "--c-delta", "-1"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["sweep", "--n-list", "100,abc"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["construct", "--n", "100", "--threads", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["oracle", "--n", "30", "--budget", "10"]).0, EXIT_USAGE);
    }

    #[test]
    fn oracle_command() {
        let (code, out, _) = run_args(&["oracle", "--n", "9"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("\"r3\":5"), "{out}");
    }

    #[test]
    fn compare_command() {
        let (code, out, _) = run_args(&["compare", "--n", "30", "--trials", "8"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["r3_exact"], 12);
        assert!(v["elkin_size"].as_u64().unwrap() >= 1);
    }
}
