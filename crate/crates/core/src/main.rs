use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nhsim::bench::{self, RunConfig, Table, DEFAULT_ORACLE_REFINE};
use nhsim::Error;

#[derive(Parser)]
#[command(name = "nhsim", version, about = "Nonholonomic integrator benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output CSV path (overrides `out` in the config; stdout if neither)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Reserved; all runs are deterministic
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Oracle step is the integrator step divided by this
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_REFINE)]
    oracle_refine: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured integrator and write one row per node
    Simulate { config: PathBuf },
    /// Final-time error against the oracle for a halving step-size sweep
    Converge {
        config: PathBuf,
        /// Comma-separated step sizes, e.g. 0.02,0.01,0.005
        #[arg(long, value_delimiter = ',', required = true)]
        steps: Vec<f64>,
    },
    /// GNI, RDP and RK2 side by side with the oracle
    Compare { config: PathBuf },
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    bench::parse_config(&text)
}

fn emit(table: &Table, cli_out: &Option<PathBuf>, cfg: &RunConfig) -> Result<(), Error> {
    bench::write_csv(table, cli_out.as_deref().or(cfg.out.as_deref()))
}

/// Returns the error that decides the exit code, if any, after the output
/// has been written.
fn run(cli: &Cli) -> Result<Option<Error>, Error> {
    match &cli.command {
        Command::Simulate { config } => {
            let cfg = load(config)?;
            let sim = bench::simulate(&cfg)?;
            for w in sim.run.warnings.iter().chain(&sim.run.diagnostics) {
                eprintln!("{w}");
            }
            emit(&sim.table, &cli.out, &cfg)?;
            Ok(sim.run.error)
        }
        Command::Converge { config, steps } => {
            let cfg = load(config)?;
            let report = bench::converge(&cfg, steps, cli.oracle_refine)?;
            eprintln!("{} slope: {:.3}", cfg.integrator.name(), report.slope);
            emit(&report.table(), &cli.out, &cfg)?;
            Ok(None)
        }
        Command::Compare { config } => {
            let cfg = load(config)?;
            let cmp = bench::compare(&cfg, cli.oracle_refine)?;
            for s in &cmp.summaries {
                eprintln!(
                    "{}: final position error {:.3e}, energy error {:.3e}",
                    s.integrator.name(),
                    s.final_position_error,
                    s.final_energy_error
                );
                for d in &s.diagnostics {
                    eprintln!("  {d}");
                }
                if let Some(e) = &s.error {
                    eprintln!("  failed: {e}");
                }
            }
            emit(&cmp.table, &cli.out, &cfg)?;
            Ok(None)
        }
    }
}

/// Output piped into `head` and the like.
fn is_broken_pipe(e: &Error) -> bool {
    let io = match e {
        Error::Csv(c) => match c.kind() {
            csv::ErrorKind::Io(io) => io,
            _ => return false,
        },
        Error::Io { source, .. } => source,
        _ => return false,
    };
    io.kind() == std::io::ErrorKind::BrokenPipe
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() || matches!(e, Error::Io { .. }) {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(None) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Ok(Some(e)) | Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
