use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use photon_dwell::cli::{self, config, figures, validate, CliError};

#[derive(Parser)]
#[command(name = "photon-dwell", version, about = "Photon dwell times in two-level media and cavities")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scenario.
    Run {
        config: PathBuf,
        /// Output CSV; overrides `[output] path`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the dataset behind a figure.
    Figure { name: String, out: PathBuf },
    /// Evaluate a scenario over the `[sweep]` axis.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the validation suite.
    Validate {
        #[arg(long, value_enum, default_value_t = ProfileArg::Fast)]
        profile: ProfileArg,
        /// Fixed number of spectral quadrature intervals.
        #[arg(long)]
        grid_points: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Fast,
    Full,
}

fn execute(command: Command) -> Result<(), CliError> {
    cli::configure_threads()?;
    match command {
        Command::Run { config, out } => {
            let cfg = config::load_config(&config)?;
            cli::emit(&cli::run(&cfg)?, out.as_deref().or(cfg.scenario.output.as_deref()))
        }
        Command::Sweep { config, out } => {
            let cfg = config::load_config(&config)?;
            cli::emit(&cli::sweep(&cfg)?, out.as_deref().or(cfg.scenario.output.as_deref()))
        }
        Command::Figure { name, out } => cli::emit(&figures::figure(&name)?, Some(&out)),
        Command::Validate { profile, grid_points } => {
            let opts = validate::ValidateOptions {
                profile: match profile {
                    ProfileArg::Fast => validate::Profile::Fast,
                    ProfileArg::Full => validate::Profile::Full,
                },
                grid_points,
            };
            let checks = validate::run_checks(&opts);
            for c in &checks {
                println!("{}", c.line());
            }
            let failed = validate::failures(&checks);
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(failed.join(", ")))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let args = Args::parse();
    match execute(args.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("photon-dwell: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
