use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use modeloss::commands::{self, CommandOutput};
use modeloss::config::RunConfig;
use modeloss::error::{CliError, Result};
use modeloss::verify;

#[derive(Debug, Parser)]
#[command(name = "modeloss", version, about = "Activation spectra, lossy mode channels and trainability sweeps")]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (same as `--set out.dir=<dir>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run a single seed (same as `--set sweep.seeds=<seed>`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gap samples, spectrum and the closed-form comparison.
    Spectrum,
    /// Per-mode channel coefficients and the commutator residual.
    Channel {
        /// Compose the channel with itself this many times.
        #[arg(long, default_value_t = 1)]
        compose: usize,
    },
    /// Degraded activations for each requested loss level.
    Degrade,
    /// Train across loss levels and seeds.
    TrainSweep,
    /// Run the acceptance checks.
    Verify {
        /// Include the Moons sweep.
        #[arg(long)]
        full: bool,
    },
}

fn overrides(cli: &Cli) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for raw in &cli.set {
        let (k, v) = raw
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--set expects KEY=VALUE, got `{raw}`")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(dir) = &cli.out {
        out.push(("out.dir".into(), dir.display().to_string()));
    }
    if let Some(seed) = cli.seed {
        out.push(("sweep.seeds".into(), seed.to_string()));
    }
    Ok(out)
}

fn emit(config: &RunConfig, output: &CommandOutput) -> Result<()> {
    output.write_to(&config.out_dir)?;
    let mut stdout = std::io::stdout().lock();
    for line in &output.lines {
        writeln!(stdout, "{line}").map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let config = RunConfig::load(cli.config.as_deref(), &overrides(&cli)?)?;
    match cli.command {
        Command::Spectrum => emit(&config, &commands::spectrum(&config)?),
        Command::Channel { compose } => emit(&config, &commands::channel(&config, compose)?),
        Command::Degrade => emit(&config, &commands::degrade(&config)?),
        Command::TrainSweep => emit(&config, &commands::train_sweep(&config)?),
        Command::Verify { full } => {
            let outcomes = verify::run_all(full);
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::VerifyFailed(failed))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
