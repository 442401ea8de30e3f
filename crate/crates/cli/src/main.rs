use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use sortition_cli::{cmd_replay, cmd_run, cmd_sweep, OutputBundle, RunMode, ScenarioFile};
use sortition_core::presets;

#[derive(Parser)]
#[command(
    name = "sortition",
    version,
    about = "Merit-based sortition experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (merit, random baseline, or both over the same population)
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value = "paired")]
        mode: RunMode,
        #[arg(long, env = "SORTITION_OUT", default_value = "sortition-out")]
        out: PathBuf,
    },
    /// Sweep the percentile over an even grid, paired merit/random runs per point and seed
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 10)]
        seeds: usize,
        #[arg(long, env = "SORTITION_OUT", default_value = "sortition-out")]
        out: PathBuf,
    },
    /// Regenerate an output directory from its manifest.json
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, env = "SORTITION_OUT", default_value = "sortition-out")]
        out: PathBuf,
    },
    /// Bundled scenarios
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// List preset names
    List,
    /// Print a preset as a scenario file
    Show { name: String },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML)
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Bundled scenario name, see `presets list`
    #[arg(long)]
    preset: Option<String>,
    /// Master seed, overriding the scenario's
    #[arg(long)]
    seed: Option<u64>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioFile> {
        let file = match (&self.config, &self.preset) {
            (Some(path), None) => ScenarioFile::load(path)?,
            (None, Some(name)) => ScenarioFile::from_preset(name)?,
            _ => bail!("pass either --config PATH or --preset NAME"),
        };
        Ok(file.with_seed(self.seed))
    }
}

fn report(bundle: &OutputBundle) {
    for f in &bundle.files {
        println!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            scenario,
            mode,
            out,
        } => report(&cmd_run(&scenario.load()?, mode, &out)?),
        Command::Sweep {
            scenario,
            points,
            seeds,
            out,
        } => report(&cmd_sweep(&scenario.load()?, points, seeds, &out)?),
        Command::Replay { manifest, out } => report(&cmd_replay(&manifest, &out)?),
        Command::Presets { action } => match action {
            PresetAction::List => {
                for p in presets::PRESETS {
                    println!("{:<18} {}", p.name, p.summary);
                }
            }
            PresetAction::Show { name } => {
                print!("{}", ScenarioFile::from_preset(&name)?.to_toml()?)
            }
        },
    }
    Ok(())
}
