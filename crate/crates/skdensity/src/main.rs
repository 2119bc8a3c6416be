use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use skdensity::cli::{self, OutputOptions};

#[derive(Parser)]
#[command(
    name = "skdensity",
    version,
    about = "Density reconstruction and option pricing with cardinal sk-splines"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Directory receiving all output files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Clamp negative density values to zero after diagnostics are recorded.
    #[arg(long, global = true)]
    clamp_negative: bool,

    /// Worker thread count; falls back to SKDENSITY_THREADS, then all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a density from a JSON config; writes CSV and diagnostics.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reconstruct and price the configured payoff; writes the result JSON.
    Price {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run validation suites and write a pass/fail report.
    Validate {
        /// Suite selector: all, cardinal, torus or oracle.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Shorthand for --suite torus.
        #[arg(long)]
        torus: bool,
    },
}

fn configure_threads(flag: Option<usize>) {
    let from_env = std::env::var("SKDENSITY_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = flag.or(from_env) {
        // a pool may already exist when embedded in tests; that is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads(cli.threads);
    let opts = OutputOptions {
        out_dir: cli.out.clone(),
        clamp_negative: cli.clamp_negative,
    };

    let outcome = match &cli.command {
        Command::Reconstruct { config } => cli::cmd_reconstruct(config, &opts).map(|()| 0u8),
        Command::Price { config } => cli::cmd_price(config, &opts).map(|()| 0u8),
        Command::Validate { suite, torus } => {
            let selector = if *torus { "torus" } else { suite.as_str() };
            cli::cmd_validate(selector, &opts).map(|all_passed| if all_passed { 0u8 } else { 2 })
        }
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
