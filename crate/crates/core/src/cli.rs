//! Command-line front end used by the `tbell` binary.
//!
//! Exit codes: 0 on success, 1 when `validate` finds a counterexample, 2 on
//! any usage or precondition error. Reports go to stdout unless `--output`
//! is given, in which case they are written atomically.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classical::QuerySchedule;
use crate::error::{Error, Result};
use crate::experiment::{
    ceil_sqrt_pow2, classical_report, pair_distribution, quantum_report, sweep, ExperimentConfig, IterationPolicy, Method, SweepOptions, Variant, MIN_EXPERIMENT_BITS,
};
use crate::qsim::MAX_SUBSPACE_BITS;
use crate::report::{write_atomic, Format, Payload, PairRecord};
use crate::validate::{run_all, Fault, ValidateOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tbell", version, about = "Entropic temporal Bell inequality for classical and quantum oracle search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the inequality for Grover's search with mid-circuit output measurements.
    RunQuantum(RunQuantumArgs),
    /// Evaluate the inequality for a deterministic classical query schedule.
    RunClassical(RunClassicalArgs),
    /// Report the joint distribution of one measured pair (A_k, A_{k+1}).
    Check(CheckArgs),
    /// One quantum report per n, with the classical sequential baseline.
    Sweep(SweepArgs),
    /// Run the built-in self-check suites.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Exact,
    MonteCarlo,
}

impl From<ModeArg> for Method {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Analytic => Method::Analytic,
            ModeArg::Exact => Method::Exact,
            ModeArg::MonteCarlo => Method::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Standard,
    HaltOnHit,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::HaltOnHit => Variant::HaltOnHit,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    CeilSqrt,
    GroverOptimal,
}

impl From<PolicyArg> for IterationPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::CeilSqrt => IterationPolicy::CeilSqrt,
            PolicyArg::GroverOptimal => IterationPolicy::GroverOptimal,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FaultArg {
    DiffusionSign,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: ModeArg,
    /// Simulated copies per measured pair (monte-carlo mode).
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, env = "TBL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "standard")]
    pub variant: VariantArg,
}

#[derive(Debug, Args)]
pub struct RunQuantumArgs {
    #[arg(long)]
    pub n: u32,
    /// Iteration budget; defaults to ceil(sqrt(2^n)).
    #[arg(long = "L")]
    pub iterations: Option<u64>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Information target I in bits; defaults to n.
    #[arg(long)]
    pub target: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RunClassicalArgs {
    /// Problem size; defaults to the schedule header when --schedule is given.
    #[arg(long, required_unless_present = "schedule")]
    pub n: Option<u32>,
    /// Schedule file: `n=<int>` header, then one query input per line.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, env = "TBL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "standard")]
    pub variant: VariantArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Range of n, as `a..b`, `a..=b` (both inclusive) or a single value.
    #[arg(long, default_value = "3..12", value_parser = parse_n_range)]
    pub n: (u32, u32),
    #[arg(long, value_enum, default_value = "ceil-sqrt")]
    pub policy: PolicyArg,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Skip the classical sequential baseline.
    #[arg(long)]
    pub no_classical: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Largest n simulated on the dense state-vector engine (at most 12).
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(3..=12))]
    pub n_max: u32,
    #[arg(long, env = "TBL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

fn parse_n_range(s: &str) -> std::result::Result<(u32, u32), String> {
    let parse = |v: &str| v.trim().parse::<u32>().map_err(|_| format!("`{v}` is not an integer"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn emit(payload: &Payload, output: &OutputArgs, out: &mut dyn Write) -> Result<()> {
    let text = payload.serialize(output.format.into())?;
    match &output.output {
        Some(path) => write_atomic(path, &text),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn run_quantum(args: &RunQuantumArgs, out: &mut dyn Write) -> Result<()> {
    if !(MIN_EXPERIMENT_BITS..=MAX_SUBSPACE_BITS).contains(&args.n) {
        return Err(Error::out_of_range("n", args.n, MIN_EXPERIMENT_BITS, MAX_SUBSPACE_BITS));
    }
    let iterations = args.iterations.unwrap_or_else(|| ceil_sqrt_pow2(args.n));
    let policy = if args.iterations.is_some() { "fixed" } else { IterationPolicy::CeilSqrt.label() };
    let config = ExperimentConfig {
        n: args.n,
        iterations,
        mode: args.sampling.mode.into(),
        samples: args.sampling.samples,
        seed: args.sampling.seed,
        variant: args.sampling.variant.into(),
    };
    let report = quantum_report(&config, policy, args.target)?;
    emit(&Payload::Report(report), &args.output, out)
}

fn run_classical(args: &RunClassicalArgs, out: &mut dyn Write) -> Result<()> {
    let (schedule, policy) = match &args.schedule {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let schedule = QuerySchedule::parse(&text)?;
            if let Some(n) = args.n {
                if n != schedule.n() {
                    return Err(Error::Usage(format!("--n {n} disagrees with the schedule header n={}", schedule.n())));
                }
            }
            (schedule, "classical-schedule")
        }
        None => (QuerySchedule::sequential(args.n.expect("clap requires --n without --schedule"))?, "classical-sequential"),
    };
    let report = classical_report(&schedule, policy, args.target)?;
    emit(&Payload::Report(report), &args.output, out)
}

fn check(args: &CheckArgs, out: &mut dyn Write) -> Result<()> {
    let config = ExperimentConfig {
        n: args.n,
        iterations: args.k + 1,
        mode: args.mode.into(),
        samples: args.samples,
        seed: args.seed,
        variant: args.variant.into(),
    };
    config.validate()?;
    let pair = pair_distribution(&config, args.k)?;
    emit(&Payload::Pair(PairRecord::from_distribution(&pair)), &args.output, out)
}

fn run_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let (lo, hi) = args.n;
    for n in [lo, hi] {
        if !(MIN_EXPERIMENT_BITS..=MAX_SUBSPACE_BITS).contains(&n) {
            return Err(Error::out_of_range("n", n, MIN_EXPERIMENT_BITS, MAX_SUBSPACE_BITS));
        }
    }
    let options = SweepOptions {
        policy: args.policy.into(),
        mode: args.sampling.mode.into(),
        variant: args.sampling.variant.into(),
        samples: args.sampling.samples,
        seed: args.sampling.seed,
        classical_baseline: !args.no_classical,
    };
    let reports = sweep(lo..=hi, &options)?;
    emit(&Payload::Sweep(reports), &args.output, out)
}

fn validate(args: &ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let options = ValidateOptions {
        n_max: args.n_max,
        seed: args.seed,
        fault: args.inject_fault.map(|FaultArg::DiffusionSign| Fault::DiffusionSign),
    };
    let results = run_all(&options);
    for r in &results {
        let _ = writeln!(out, "{r}");
    }
    match results.iter().find(|r| !r.passed()) {
        None => EXIT_OK,
        Some(first) => {
            let _ = writeln!(err, "error: {} failed: {}", first.name, first.failure.as_deref().unwrap_or(""));
            EXIT_CHECK_FAILED
        }
    }
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
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::RunQuantum(a) => run_quantum(a, out),
        Command::RunClassical(a) => run_classical(a, out),
        Command::Check(a) => check(a, out),
        Command::Sweep(a) => run_sweep(a, out),
        Command::Validate(a) => return validate(a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
