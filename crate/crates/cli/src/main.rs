use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qheat_cli::{execute, CliError, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(
    name = "qheat",
    version,
    about = "Heat pumping through a modulated two-level junction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config; defaults reproduce the reference setup.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, env = "QHEAT_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Net current and geometric reference over frequencies and initial states.
    FluxSweep,
    /// Dynamical, geometric and non-adiabatic parts per bath.
    Decompose,
    /// Initial-state contribution per interval.
    Phi0Profile,
    /// Non-Markovian decay rate against its Markovian value.
    LambdaTrace,
    /// Continuous adiabatic currents, line and surface forms.
    Geometric,
}

impl From<Command> for ExperimentKind {
    fn from(c: Command) -> Self {
        match c {
            Command::FluxSweep => ExperimentKind::FluxSweep,
            Command::Decompose => ExperimentKind::Decompose,
            Command::Phi0Profile => ExperimentKind::Phi0Profile,
            Command::LambdaTrace => ExperimentKind::LambdaTrace,
            Command::Geometric => ExperimentKind::Geometric,
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(CliError::field("threads", "must be at least 1"));
        }
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    let kind = cli.command.into();
    // compute into memory first so a failed run leaves no partial file
    let mut buffer = Vec::new();
    pool.install(|| execute(kind, &config, &mut buffer))?;
    match &cli.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(&buffer)?;
            w.flush()?;
        }
        None => io::stdout().lock().write_all(&buffer)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qheat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
