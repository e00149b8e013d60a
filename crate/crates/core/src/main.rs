//! Batch front-end: experiment configs in, CSV/DOT/JSON artifacts out.
//!
//! Exit codes: 0 ok, 2 config error, 3 verification failure, 4 resource cap.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schreier_growth::experiment::{run_experiment, ExperimentConfig, ExperimentKind};
use schreier_growth::Error;

#[derive(Parser)]
#[command(name = "schreier-growth", version, about = "Group action growth workbench")]
struct Cli {
    /// JSON experiment config; subcommand flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker pool size.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Runs a verification suite.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Measures a growth table for a family.
    Growth {
        #[command(subcommand)]
        family: GrowthFamily,
    },
    /// Runs the sparse-support lower-bound probe.
    Probe {
        #[command(subcommand)]
        target: ProbeTarget,
    },
    /// Exports a finite graph in DOT format.
    Export {
        #[command(subcommand)]
        what: ExportWhat,
    },
}

#[derive(Subcommand)]
enum VerifySuite {
    Grigorchuk {
        #[arg(long, default_value_t = 12)]
        max_level: u32,
        #[arg(long, default_value_t = 6)]
        max_word: usize,
    },
    Lamplighter {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u8,
        #[arg(long, default_value_t = 8)]
        max_word: usize,
    },
    Houghton {
        #[arg(long, default_value_t = 1000)]
        vol_max: u32,
        #[arg(long, default_value_t = 64)]
        pair_max: u32,
    },
    Gluing {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        q_max: usize,
        #[arg(long, default_value_t = 256)]
        piece_cap: usize,
        #[arg(long, default_value_t = 64)]
        radius_max: u32,
        #[arg(long, default_value_t = 500)]
        words: usize,
    },
}

#[derive(Subcommand)]
enum GrowthFamily {
    Grigorchuk {
        #[arg(long, default_value_t = 12)]
        max_level: u32,
        #[arg(long, default_value_t = 64)]
        n_max: u32,
    },
    Lamplighter {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u8,
        #[arg(long, default_value_t = 64)]
        m_max: u64,
        #[arg(long, default_value_t = 64)]
        n_max: u32,
    },
    Houghton {
        #[arg(long, default_value_t = 1000)]
        n_max: u32,
    },
    HoughtonPair {
        #[arg(long, default_value_t = 64)]
        n_max: u32,
    },
}

#[derive(Subcommand)]
enum ProbeTarget {
    FreeProduct(ProbeArgs),
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long, default_value = "houghton2")]
    left: String,
    #[arg(long, default_value = "Z")]
    right: String,
    /// Comma-separated list of radii.
    #[arg(long = "R", value_delimiter = ',', default_values_t = vec![16, 24, 32, 48, 64])]
    r_list: Vec<u32>,
}

#[derive(Subcommand)]
enum ExportWhat {
    Dot {
        #[arg(long)]
        family: String,
        #[arg(long)]
        level: Option<u32>,
        #[arg(long)]
        m: Option<u64>,
    },
}

fn kind_of(command: Command) -> ExperimentKind {
    match command {
        Command::Verify { suite } => match suite {
            VerifySuite::Grigorchuk { max_level, max_word } => {
                ExperimentKind::VerifyGrigorchuk { max_level, max_word }
            }
            VerifySuite::Lamplighter { p, d, max_word } => {
                ExperimentKind::VerifyLamplighter { p, d, max_word }
            }
            VerifySuite::Houghton { vol_max, pair_max } => {
                ExperimentKind::VerifyHoughton { vol_max, pair_max }
            }
            VerifySuite::Gluing { count, q_max, piece_cap, radius_max, words } => {
                ExperimentKind::VerifyGluing { count, q_max, piece_cap, radius_max, words }
            }
        },
        Command::Growth { family } => match family {
            GrowthFamily::Grigorchuk { max_level, n_max } => {
                ExperimentKind::GrowthGrigorchuk { max_level, n_max }
            }
            GrowthFamily::Lamplighter { p, d, m_max, n_max } => {
                ExperimentKind::GrowthLamplighter { p, d, m_max, n_max }
            }
            GrowthFamily::Houghton { n_max } => ExperimentKind::GrowthHoughton { n_max },
            GrowthFamily::HoughtonPair { n_max } => ExperimentKind::GrowthHoughtonPair { n_max },
        },
        Command::Probe { target } => match target {
            ProbeTarget::FreeProduct(args) => ExperimentKind::ProbeFreeProduct {
                left: args.left,
                right: args.right,
                r_list: args.r_list,
            },
        },
        Command::Export { what } => match what {
            ExportWhat::Dot { family, level, m } => ExperimentKind::ExportDot { family, level, m },
        },
    }
}

fn build_config(cli: Cli) -> Result<ExperimentConfig, Error> {
    match (cli.command, &cli.config) {
        (Some(command), _) => Ok(ExperimentConfig {
            kind: kind_of(command),
            seed: cli.seed,
            jobs: cli.jobs,
            out_dir: cli.out,
        }),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let mut config: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| Error::Config {
                    field: path.display().to_string(),
                    reason: e.to_string(),
                })?;
            // Flags still override file-level settings.
            if cli.seed != 0 {
                config.seed = cli.seed;
            }
            if cli.jobs != 1 {
                config.jobs = cli.jobs;
            }
            if cli.out != PathBuf::from("out") {
                config.out_dir = cli.out;
            }
            Ok(config)
        }
        (None, None) => Err(Error::Config {
            field: "command".into(),
            reason: "either a subcommand or --config is required".into(),
        }),
    }
}

fn exit_code_for(error: &Error) -> ExitCode {
    match error {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::UnknownFactor(_) => {
            ExitCode::from(2)
        }
        Error::CapExceeded { .. } => ExitCode::from(4),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(cli) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = config.validate() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(config.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run_experiment(&config)) {
        Ok(outcome) => {
            for check in &outcome.checks {
                println!(
                    "{} {}: {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            for artifact in &outcome.artifacts {
                println!("wrote {}", artifact.display());
            }
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
