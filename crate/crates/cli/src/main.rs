//! `poicomp`: exact laws, variate streams and identity checks for
//! compositions of Poisson-type processes.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid configuration, 3 a
//! numerical routine failed (the operation is named on stderr).

mod commands;
mod emit;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use poicomp::verify::{registry, run_suite, RunConfig};
use serde::Serialize;

use commands::{FieldExperiment, LawParams, PmfLaw, SampleLaw};
use emit::Format;

/// Seed used when neither `--seed` nor `POICOMP_SEED` is given.
const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Parser, Debug)]
#[command(name = "poicomp", version, about)]
struct Cli {
    /// Master seed; every draw derives from it
    #[arg(long, global = true, env = "POICOMP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Worker threads (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate an exact law as rows {k, p, tail_bound}
    Pmf {
        #[arg(long, value_enum)]
        law: PmfLaw,
        /// Last row; by default rows continue until the tail is below --tail-tol
        #[arg(long)]
        kmax: Option<u32>,
        #[arg(long, default_value_t = 1e-12)]
        tail_tol: f64,
        #[command(flatten)]
        params: LawParams,
    },
    /// Draw variates, one record {value} each
    Sample {
        #[arg(long, value_enum)]
        law: SampleLaw,
        #[arg(long, short = 'n', default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        params: LawParams,
    },
    /// Run identity checks and emit one report per check
    Verify {
        /// Check name, repeatable; `all` runs the whole registry
        #[arg(long = "check", default_value = "all")]
        checks: Vec<String>,
        #[arg(long, short = 'n', default_value_t = 1_000_000)]
        samples: usize,
        /// Record wall-clock time in runtime_ms (otherwise 0)
        #[arg(long)]
        timings: bool,
        /// Print the registered checks and exit
        #[arg(long)]
        list: bool,
    },
    /// Planar field experiments
    Field {
        #[arg(long, value_enum, default_value_t = FieldExperiment::Counts)]
        experiment: FieldExperiment,
        #[arg(long, short = 'n', default_value_t = 100_000)]
        samples: usize,
        /// Grid intervals on [0, radius] for the contact experiment
        #[arg(long, default_value_t = 60)]
        points: usize,
        #[command(flatten)]
        params: LawParams,
    },
    /// Cauchy scale and characteristic function of continued fractions
    Cfrac {
        /// Depths, comma separated
        #[arg(long, value_delimiter = ',', default_value = "3")]
        depth: Vec<u32>,
        #[arg(long, short = 'n', default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
}

enum Failure {
    Config(String),
    Numeric(poicomp::Error),
}

impl From<poicomp::Error> for Failure {
    fn from(e: poicomp::Error) -> Self {
        match e {
            poicomp::Error::InvalidParameter { .. } | poicomp::Error::DegenerateRates { .. } | poicomp::Error::UnknownCheck(_) => {
                Failure::Config(e.to_string())
            }
            e => Failure::Numeric(e),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Config(format!("output: {e}"))
    }
}

#[derive(Serialize)]
struct CheckInfo {
    name: &'static str,
    summary: &'static str,
}

fn emit<T: Serialize>(records: &[T], cli: &Cli) -> Result<(), Failure> {
    let mut buf = Vec::new();
    emit::write_records(records, cli.format, &mut buf)?;
    match &cli.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    let seed = cli.seed;
    match &cli.command {
        Command::Pmf {
            law,
            kmax,
            tail_tol,
            params,
        } => emit(&commands::pmf(*law, params, *kmax, *tail_tol)?, cli)?,
        Command::Sample { law, samples, params } => emit(&commands::sample(*law, params, *samples, seed)?, cli)?,
        Command::Verify { list: true, .. } => {
            let info: Vec<CheckInfo> = registry()
                .iter()
                .map(|c| CheckInfo {
                    name: c.name,
                    summary: c.summary,
                })
                .collect();
            emit(&info, cli)?;
        }
        Command::Verify {
            checks,
            samples,
            timings,
            ..
        } => {
            let config = RunConfig {
                samples: *samples,
                seed,
                timings: *timings,
            };
            let reports = run_suite(checks, &config, None)?;
            emit(&reports, cli)?;
            for r in reports.iter().filter(|r| !r.passed) {
                eprintln!("FAILED {}", r.check_name);
            }
            return Ok(reports.iter().all(|r| r.passed));
        }
        Command::Field {
            experiment,
            samples,
            points,
            params,
        } => match experiment {
            FieldExperiment::Counts => emit(&commands::field_counts(params, *samples, seed)?, cli)?,
            FieldExperiment::Contact => emit(&commands::field_contact(params, *samples, seed, *points)?, cli)?,
        },
        Command::Cfrac { depth, samples, beta } => emit(&commands::cfrac(depth, *samples, seed, *beta)?, cli)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: threads: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| execute(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            let op = e.operation().unwrap_or("unknown");
            eprintln!("numeric error in {op}: {e}");
            ExitCode::from(3)
        }
    }
}
