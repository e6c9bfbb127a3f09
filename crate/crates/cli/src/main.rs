use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qgraph_cli::{CliError, Options};

/// Scattering networks, erasure channels and capacity sweeps.
#[derive(Parser)]
#[command(name = "qgraph", version)]
struct Cli {
    /// Output directory (default: the scenario's `output`, else ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a scenario, then write its CSV/SVG/JSON outputs.
    Run { scenario: PathBuf },
    /// Run the scenario's cross-checks and print the residuals.
    Verify { scenario: PathBuf },
    /// Compose two scattering matrices over a wiring and print the result.
    Star { a: PathBuf, b: PathBuf, wiring: PathBuf },
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let opts = Options { out: cli.out };
    match cli.command {
        Command::Run { scenario } => qgraph_cli::run(&scenario, &opts).map(|_| ()),
        Command::Verify { scenario } => qgraph_cli::verify(&scenario).map(|_| ()),
        Command::Star { a, b, wiring } => {
            println!("{}", qgraph_cli::star_files(&a, &b, &wiring)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(3);
        }
    };

    match pool.install(|| dispatch(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
