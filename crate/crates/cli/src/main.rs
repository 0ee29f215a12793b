use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qthermo_cli::commands;
use qthermo_cli::presets::{self, Command as PresetCommand, PRESET_IDS};
use qthermo_cli::{CliError, CliResult, ScenarioConfig};

/// Open-qubit thermodynamics: trajectories, non-Markovianity measures,
/// event times and plots.
#[derive(Parser)]
#[command(name = "qthermo", version)]
struct Cli {
    /// Output directory; the QTHERMO_OUT environment variable takes precedence.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides time.horizon of the config.
    #[arg(long, global = true, value_name = "T")]
    horizon: Option<f64>,
    /// Overrides time.points of the config.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Thermodynamic ledger along a trajectory.
    Simulate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// A non-Markovianity measure, optionally swept over a channel parameter.
    Measure {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Sudden death, adiabatic time, freezing and work balances.
    Events {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// SVG line plot of CSV columns against the first column.
    Plot {
        csv: PathBuf,
        /// Comma-separated column names.
        #[arg(long, value_delimiter = ',', required = true)]
        columns: Vec<String>,
        /// SVG path; defaults to the CSV stem inside the output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a figure preset; `list` prints the ids.
    Preset { id: String },
}

fn out_dir(cli: &Cli) -> PathBuf {
    match std::env::var_os("QTHERMO_OUT") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => cli.out.clone().unwrap_or_else(|| PathBuf::from(".")),
    }
}

fn load(cli: &Cli, path: &Path) -> CliResult<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg: ScenarioConfig = text.parse()?;
    if let Some(h) = cli.horizon {
        if !(h > 0.0) {
            return Err(CliError::usage(format!("--horizon must be positive, got {h}")));
        }
        cfg.time.horizon = h;
    }
    if let Some(n) = cli.grid {
        if n < 2 {
            return Err(CliError::usage(format!("--grid needs at least 2 points, got {n}")));
        }
        cfg.time.points = n;
    }
    Ok(cfg)
}

fn report(outcome: &commands::Outcome) {
    println!("{}", outcome.summary);
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let dir = out_dir(cli);
    match &cli.command {
        Cmd::Simulate { config } => report(&PresetCommand::Simulate.run(&load(cli, config)?, &dir)?),
        Cmd::Measure { config } => report(&PresetCommand::Measure.run(&load(cli, config)?, &dir)?),
        Cmd::Events { config } => report(&PresetCommand::Events.run(&load(cli, config)?, &dir)?),
        Cmd::Plot { csv, columns, output } => {
            let svg = match output {
                Some(p) => p.clone(),
                None => {
                    let stem = csv.file_stem().ok_or_else(|| CliError::usage("CSV path has no file name"))?;
                    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
                    dir.join(stem).with_extension("svg")
                }
            };
            commands::plot(csv, columns, &svg)?;
            println!("wrote {}", svg.display());
        }
        Cmd::Preset { id } if id == "list" => {
            for id in PRESET_IDS {
                println!("{id}");
            }
        }
        Cmd::Preset { id } => {
            if cli.horizon.is_some() || cli.grid.is_some() {
                return Err(CliError::usage("presets have fixed grids; --horizon and --grid do not apply"));
            }
            for (outcome, svg) in presets::run_preset(id, &dir)? {
                report(&outcome);
                if let Some(svg) = svg {
                    println!("wrote {}", svg.display());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
