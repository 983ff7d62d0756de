use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};

mod commands;
mod input;
mod output;

use output::{Envelope, Format};

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(name = "egdss", version, about = "Stress-strength reliability under the EGD(3, λ) model")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    out: Format,
    /// Worker threads for simulations (results do not depend on it).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Master seed for stochastic commands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum likelihood fit of λ to a sample.
    Fit {
        /// Data file, or an embedded dataset name (jute10, jute20).
        #[arg(long)]
        data: String,
    },
    /// R = P(X > Y) for given rates, closed form and quadrature.
    Reliability {
        #[arg(long, allow_negative_numbers = true)]
        lambda1: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda2: f64,
    },
    /// Estimate R with a delta-method confidence interval.
    EstimateR {
        #[arg(long)]
        strength: String,
        #[arg(long)]
        stress: String,
        #[arg(long, default_value_t = 0.95, allow_negative_numbers = true)]
        level: f64,
    },
    /// Kolmogorov-Smirnov and Cramér-von Mises tests of the fitted model.
    Gof {
        #[arg(long)]
        data: String,
    },
    /// Monte Carlo study of the estimators.
    Simulate {
        #[arg(long, allow_negative_numbers = true)]
        lambda1: f64,
        #[arg(long, allow_negative_numbers = true)]
        lambda2: f64,
        /// Comma-separated sample sizes; `n` means n = m, `NxM` sets both.
        #[arg(long, value_parser = parse_sizes)]
        sizes: Sizes,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0.95, allow_negative_numbers = true)]
        level: f64,
    },
    /// Rerun a reference table and compare with its printed values.
    Repro {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        table: u8,
    },
}

#[derive(Clone, Debug)]
struct Sizes(Vec<(usize, usize)>);

fn parse_sizes(s: &str) -> Result<Sizes, String> {
    let size = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad sample size {t:?}"));
    s.split(',')
        .map(|part| match part.split_once(['x', 'X']) {
            Some((n, m)) => Ok((size(n)?, size(m)?)),
            None => size(part).map(|n| (n, n)),
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Sizes)
}

fn run(cli: &Cli, argv: &[String]) -> Result<String> {
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let report = match &cli.command {
        Command::Fit { data } => commands::fit(data)?,
        Command::Reliability { lambda1, lambda2 } => commands::reliability(*lambda1, *lambda2)?,
        Command::EstimateR {
            strength,
            stress,
            level,
        } => commands::estimate(strength, stress, *level)?,
        Command::Gof { data } => commands::gof(data)?,
        Command::Simulate {
            lambda1,
            lambda2,
            sizes,
            reps,
            level,
        } => commands::simulate(*lambda1, *lambda2, sizes.0.clone(), *reps, *level, seed)?,
        Command::Repro { table } => commands::repro(*table, seed)?,
    };
    Ok(match cli.out {
        Format::Text => report.text,
        Format::Csv => report.csv,
        Format::Json => {
            let env = Envelope {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: argv,
                inputs: &report.inputs,
                seed: report.seed,
                result: &report.result,
            };
            output::to_json(&env)? + "\n"
        }
    })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            eprintln!("\n{}", Cli::command().render_usage());
            return ExitCode::from(2);
        }
    };
    let result = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| run(&cli, &argv))),
        None => run(&cli, &argv),
    };
    match result {
        Ok(s) => {
            print!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
