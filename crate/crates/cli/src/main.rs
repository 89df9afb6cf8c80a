mod commands;
mod error;
mod output;
mod params;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use commands::Command;
use error::CliError;
use output::{Artifact, TOOL, VERSION};
use params::{Format, Params, Resolver};
use sweep::Range;

#[derive(Parser)]
#[command(name = "laser-entropy", version, about = "Entropy flow of an ideal laser beam")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// k_B√(Ṅℓ) and the branching heuristic.
    Asymptotic(RunArgs),
    /// Lowest eigenvalue of the reduced operator.
    Spectral(RunArgs),
    /// Feynman–Kac Monte Carlo decay rate.
    Montecarlo(RunArgs),
    /// Number-basis purities against quadrature and segment sampling.
    Brute(RunArgs),
    /// One-dimensional blackbody beam.
    Thermal(RunArgs),
    /// Laser against thermal entropy flow at equal power.
    Compare(RunArgs),
    /// Monte Carlo against spectral decay rate; exit code 4 when they disagree.
    Crosscheck(RunArgs),
    /// Run a command over a grid of parameter values.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    params: Params,
    /// Flat JSON object keyed by flag names; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the artifact here instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Record elapsed wall time in the artifact (which then differs run to run).
    #[arg(long)]
    wall_time: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(value_enum)]
    base: Command,
    /// name=start:stop:points[:log]; repeat for a product grid.
    #[arg(long = "range", required = true)]
    ranges: Vec<String>,
    #[command(flatten)]
    run: RunArgs,
}

fn merged(run: &RunArgs) -> Result<Map<String, Value>, CliError> {
    let file = run.config.as_deref().map(Params::from_file).transpose()?;
    Ok(params::merge(file.as_ref(), &run.params))
}

fn format_of(values: &Map<String, Value>, default: Format) -> Result<Format, CliError> {
    match values.get("format") {
        None | Some(Value::Null) => Ok(default),
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|_| CliError::config("format", format!("expected \"json\" or \"csv\", got {v}"))),
    }
}

fn thread_pool(values: &Map<String, Value>) -> Result<rayon::ThreadPool, CliError> {
    let threads = match values.get("threads") {
        None | Some(Value::Null) => 0,
        Some(v) => v
            .as_u64()
            .ok_or_else(|| CliError::config("threads", format!("expected a non-negative integer, got {v}")))?
            as usize,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config("threads", e.to_string()))
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_single(command: Command, run: &RunArgs) -> Result<bool, CliError> {
    let started = Instant::now();
    let values = merged(run)?;
    let format = format_of(&values, Format::Json)?;
    let pool = thread_pool(&values)?;
    let mut resolver = Resolver::new(values);
    let outcome = pool.install(|| commands::run(command, &mut resolver))?;
    let seed = resolver.seed()?;
    let artifact = Artifact {
        tool: TOOL,
        version: VERSION,
        command: command.name(),
        seed,
        config: resolver.used(),
        result: &outcome.result,
        wall_time_s: run.wall_time.then(|| started.elapsed().as_secs_f64()),
    };
    let text = match format {
        Format::Json => artifact.to_json(),
        Format::Csv => artifact.to_csv(outcome.table.as_ref()),
    };
    emit(&text, run.output.as_ref())?;
    Ok(outcome.failed)
}

fn run_sweep(args: &SweepArgs) -> Result<bool, CliError> {
    let started = Instant::now();
    let ranges = args.ranges.iter().map(|s| s.parse::<Range>()).collect::<Result<Vec<_>, _>>()?;
    let values = merged(&args.run)?;
    let format = format_of(&values, Format::Csv)?;
    let pool = thread_pool(&values)?;
    let result = pool.install(|| sweep::sweep(args.base, &values, &ranges))?;
    let mut base: std::collections::BTreeMap<String, Value> = values
        .iter()
        .filter(|(k, _)| k.as_str() != "threads" && k.as_str() != "format")
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    base.insert("ranges".into(), json!(ranges));
    base.insert("base_command".into(), json!(args.base.name()));
    let seed = base.get("seed").and_then(Value::as_u64).unwrap_or(0);
    let rows = Value::Array(result.rows);
    let artifact = Artifact {
        tool: TOOL,
        version: VERSION,
        command: "sweep",
        seed,
        config: &base,
        result: &rows,
        wall_time_s: args.run.wall_time.then(|| started.elapsed().as_secs_f64()),
    };
    let text = match format {
        Format::Json => artifact.to_json(),
        Format::Csv => artifact.to_csv(Some(&result.table)),
    };
    emit(&text, args.run.output.as_ref())?;
    Ok(result.failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Cmd::Asymptotic(a) => run_single(Command::Asymptotic, a),
        Cmd::Spectral(a) => run_single(Command::Spectral, a),
        Cmd::Montecarlo(a) => run_single(Command::Montecarlo, a),
        Cmd::Brute(a) => run_single(Command::Brute, a),
        Cmd::Thermal(a) => run_single(Command::Thermal, a),
        Cmd::Compare(a) => run_single(Command::Compare, a),
        Cmd::Crosscheck(a) => run_single(Command::Crosscheck, a),
        Cmd::Sweep(a) => run_sweep(a),
    };
    match outcome {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("{}", json!({"error": "crosscheck", "message": "Monte Carlo and spectral rates disagree", "exit_code": 4}));
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
