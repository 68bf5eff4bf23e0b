use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ppbell::cli::{self, Format, HistConfig, RunConfig};
use ppbell::sampler::{PairNumber, SamplerKind};
use ppbell::sim::Variable;
use ppbell::validate::JACOBIAN;

/// Positive-P phase-space simulation of photonic Bell tests.
#[derive(Debug, Parser)]
#[command(name = "ppbell", version)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Samples per sweep point (default depends on the subcommand).
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Number of photon pairs N (1..=8).
    #[arg(long, global = true, default_value_t = 1)]
    pairs: u32,

    #[arg(long, global = true, value_enum, default_value_t = SamplerArg::Exact)]
    sampler: SamplerArg,

    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    theta_min: f64,

    #[arg(long, global = true, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    theta_max: f64,

    #[arg(long, global = true, default_value_t = 25)]
    theta_steps: usize,

    /// Worker threads (default: available cores). Results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output file; `-` or absent writes to stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplerArg {
    Exact,
    Rejection,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep Δ(θ) over the theta grid.
    Chsh,
    /// Histogram the real parts of one or two phase-space variables.
    Hist {
        /// `spin:<A|B>:<theta>`, `corr:<theta_a>:<theta_b>` or
        /// `number:<A+|A-|B+|B->`; give once for 1D, twice for 2D.
        #[arg(long = "var", allow_hyphen_values = true)]
        vars: Vec<String>,

        #[arg(long, default_value_t = 101)]
        bins: usize,

        #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
        range_min: f64,

        #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
        range_max: f64,
    },
    /// Run the cross-check suites; exits nonzero if any check fails.
    Validate {
        /// Jacobian used in the construction-consistency check (negative control).
        #[arg(long, default_value_t = JACOBIAN, hide = true)]
        jacobian: f64,
    },
    /// Write raw samples, one row of 16 real coordinates per sample.
    Dump {
        #[arg(long, default_value_t = cli::DEFAULT_DUMP_CAP)]
        max_samples: u64,
    },
}

fn run(args: Cli) -> ppbell::Result<bool> {
    let c = &args.common;
    let default_samples = match args.command {
        Command::Chsh => 2_000_000,
        Command::Hist { .. } => 1_000_000,
        Command::Validate { .. } => 100_000,
        Command::Dump { .. } => 1_000,
    };
    let default_format = match args.command {
        Command::Hist { .. } | Command::Validate { .. } => Format::Json,
        _ => Format::Csv,
    };
    let cfg = RunConfig {
        seed: c.seed,
        samples: c.samples.unwrap_or(default_samples),
        pairs: PairNumber::new(c.pairs)?,
        sampler: match c.sampler {
            SamplerArg::Exact => SamplerKind::Exact,
            SamplerArg::Rejection => SamplerKind::Rejection,
        },
        theta_min: c.theta_min,
        theta_max: c.theta_max,
        theta_steps: c.theta_steps,
        workers: c.workers.unwrap_or_else(cli::default_workers),
        output: c.output.clone(),
        format: match c.format {
            Some(FormatArg::Csv) => Format::Csv,
            Some(FormatArg::Json) => Format::Json,
            None => default_format,
        },
    };

    match args.command {
        Command::Chsh => {
            cli::cmd_chsh(&cfg)?;
            Ok(true)
        }
        Command::Hist {
            vars,
            bins,
            range_min,
            range_max,
        } => {
            let mut hist = HistConfig {
                bins,
                range_min,
                range_max,
                ..HistConfig::default()
            };
            if !vars.is_empty() {
                hist.variables = vars.iter().map(|v| v.parse::<Variable>()).collect::<Result<_, _>>()?;
            }
            let run = cli::cmd_hist(&cfg, &hist)?;
            for (k, v) in run.variables.iter().enumerate() {
                eprintln!(
                    "{}: fraction with |Re| > 1 = {:.6}",
                    v.describe(),
                    run.out_of_bounds_fraction(k)
                );
            }
            Ok(true)
        }
        Command::Validate { jacobian } => {
            let report = cli::cmd_validate(&cfg, jacobian)?;
            for c in &report.checks {
                eprintln!(
                    "{} {:<40} {} = {:.3e} (tol {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.metric,
                    c.score,
                    c.tolerance
                );
            }
            Ok(report.passed)
        }
        Command::Dump { max_samples } => {
            cli::cmd_dump(&cfg, max_samples)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
