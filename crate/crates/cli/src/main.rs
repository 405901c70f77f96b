use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use preisach_cli::output::to_json;
use preisach_cli::{
    cmd_bounds, cmd_control, cmd_oracle_check, cmd_simulate, cmd_sweep, CliError, ExperimentConfig,
    EXIT_MAX_PULSES, EXIT_ORACLE_MISMATCH,
};

/// Remnant control experiments on a Preisach hysteresis operator.
///
/// Exit codes: 0 success, 1 I/O failure, 2 config error, 3 degenerate
/// bounds, 4 controller hit max_pulses, 5 oracle mismatch.
#[derive(Parser)]
#[command(name = "preisach", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON). See configs/ for examples.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Scan lines per axis for sector bounds of analytic fields [config default 512].
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Relays per axis of the fine oracle lattice [config default 300].
    #[arg(long, global = true)]
    oracle_n: Option<usize>,
    /// Seed for random sweep values [config default 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Sector bounds, reachable remnants and the largest admissible gain.
    Bounds,
    /// Run the controller; writes trace.csv, signal.csv, summary.json.
    Control,
    /// Apply the open-loop "plan"; writes remnants.csv, signal.csv, summary.json.
    Simulate,
    /// Compare a control trace against relay lattices of oracle_n / 2 and oracle_n.
    OracleCheck,
    /// Controller runs over the "sweep" values, one directory per run.
    Sweep,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(r) = cli.resolution {
        cfg.resolution = r;
    }
    if let Some(n) = cli.oracle_n {
        cfg.oracle_n = n;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    // recheck the overrides
    let text = serde_json::to_string(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    ExperimentConfig::from_json(&text)?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = load(cli)?;
    let out = cli.out.as_path();
    let code = match cli.command {
        Command::Bounds => {
            let r = cmd_bounds(&cfg, Some(out))?;
            print!("{}", to_json("bounds", &r)?);
            0
        }
        Command::Control => {
            let s = cmd_control(&cfg, out)?;
            print!("{}", to_json("summary", &s)?);
            if s.converged {
                0
            } else {
                eprintln!("controller stopped after {} pulses without converging", s.pulses);
                EXIT_MAX_PULSES
            }
        }
        Command::Simulate => {
            let s = cmd_simulate(&cfg, out)?;
            print!("{}", to_json("summary", &s)?);
            0
        }
        Command::OracleCheck => {
            let r = cmd_oracle_check(&cfg, out)?;
            print!("{}", to_json("oracle report", &r)?);
            if r.pass {
                0
            } else {
                eprintln!(
                    "oracle deviation {:.4} exceeds {} at n = {}",
                    r.deviation_fine, r.tolerance, r.n_fine
                );
                EXIT_ORACLE_MISMATCH
            }
        }
        Command::Sweep => {
            let r = cmd_sweep(&cfg, out)?;
            print!("{}", to_json("sweep report", &r)?);
            0
        }
    };
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
