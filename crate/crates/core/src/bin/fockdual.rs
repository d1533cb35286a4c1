use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fockdual::cli::{self, ReportFormat, RunConfig, WeightSource};

#[derive(Parser)]
#[command(version, about = "Conjugate weights, Laplace sandwiches and weighted Fock space duality checks")]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Weight spec as JSON: {"n": .., "terms": [{"type": "power"|"radial_power", "p": .., "coef": ..}]}
    #[arg(long, global = true, conflicts_with = "weight_preset")]
    weight: Option<PathBuf>,

    /// fock:N, power:P:N, radial:P:N, kinked:N or bump:N
    #[arg(long, global = true)]
    weight_preset: Option<String>,

    /// Moment-table degree (default 10 for n ≤ 2)
    #[arg(long, global = true)]
    degree: Option<u32>,

    #[arg(long, global = true, default_value = "reports")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Grid refinements in the identity convergence check
    #[arg(long, global = true, default_value_t = 1)]
    refine: u32,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    Conjugate,
    Identities,
    Sandwich,
    Moments,
    Duality,
    All,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let weight = match (args.weight, args.weight_preset) {
        (Some(p), _) => WeightSource::Json(p),
        (None, Some(s)) => WeightSource::Preset(s),
        (None, None) => WeightSource::Preset("fock:1".into()),
    };
    let cfg = RunConfig {
        weight,
        degree: args.degree,
        out: args.out,
        format: match args.format {
            Format::Csv => ReportFormat::Csv,
            Format::Json => ReportFormat::Json,
        },
        seed: args.seed,
        refine: args.refine,
    };
    let run = match args.command {
        Command::Conjugate => cli::cmd_conjugate,
        Command::Identities => cli::cmd_identities,
        Command::Sandwich => cli::cmd_sandwich,
        Command::Moments => cli::cmd_moments,
        Command::Duality => cli::cmd_duality,
        Command::All => cli::cmd_all,
    };
    match run(&cfg) {
        Ok(result) => {
            print!("{}", cli::render(&result));
            ExitCode::from(result.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
