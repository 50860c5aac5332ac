use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use uavsim::maneuver::StageTwoFormula;
use uavsim::mission::output::{render_run, render_sweep, Format};
use uavsim::mission::sweep::linspace;
use uavsim::mission::{run_mission, run_sweep, MissionConfig, SweepSpec, SweepVariable, PRESETS};
use uavsim::profile::PowerProfile;
use uavsim::wpt::SourcePolicy;
use uavsim::{Error, Result};

/// Quadrotor UAV mission energy simulator.
#[derive(Parser)]
#[command(name = "uavsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single mission and print its report.
    Run {
        #[command(flatten)]
        source: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep one variable over a grid and print one row per point.
    Sweep {
        #[command(flatten)]
        source: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// rotor-velocity, distance-{x,y,z}, wind-{x,y,z}, source-distance,
        /// source-power or battery-size
        #[arg(long = "var")]
        variable: SweepVariable,
        #[arg(long, requires_all = ["stop", "points"], conflicts_with = "grid", allow_negative_numbers = true)]
        start: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        /// Explicit comma-separated grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
        /// Constant laser source power, W, replacing the configured policy.
        #[arg(long)]
        source_power: Option<f64>,
    },
    /// Check a configuration without running it.
    Validate {
        #[command(flatten)]
        source: ConfigArgs,
    },
    /// List the bundled parameter sets.
    Presets,
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML mission file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled parameter set.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    stage2_mode: Option<StageTwoFormula>,
    /// Integration step, s.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = Format::Csv)]
    format: Format,
}

impl ConfigArgs {
    fn load(&self) -> Result<MissionConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                MissionConfig::from_toml(&text)?
            }
            (None, Some(name)) => MissionConfig::from_preset(name)?,
            (None, None) => return Err(Error::Config("one of --config or --preset is required".into())),
        };
        if let Some(mode) = self.stage2_mode {
            cfg.stage2_mode = mode;
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl OutputArgs {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { source, output } => {
            let run = run_mission(&source.load()?)?;
            output.emit(&render_run(&run, output.format)?)
        }
        Command::Sweep {
            source,
            output,
            variable,
            start,
            stop,
            points,
            grid,
            source_power,
        } => {
            let mut config = source.load()?;
            if let Some(w) = source_power {
                config.source = SourcePolicy::Fixed(PowerProfile::Constant(w));
            }
            let grid = match (grid, start, stop, points) {
                (Some(g), ..) => g,
                (None, Some(a), Some(b), Some(n)) => linspace(a, b, n),
                _ => return Err(Error::Config("give --grid or --start/--stop/--points".into())),
            };
            let table = run_sweep(&SweepSpec { variable, grid, config })?;
            output.emit(&render_sweep(&table, output.format)?)
        }
        Command::Validate { source } => {
            source.load()?;
            println!("ok");
            Ok(())
        }
        Command::Presets => {
            for (name, about, _) in PRESETS {
                println!("{name}\t{about}");
            }
            Ok(())
        }
    }
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
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
