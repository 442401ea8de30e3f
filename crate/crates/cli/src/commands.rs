use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sortition_core::experiments::{
    percentile_sweep_seeds, run_paired, run_scenario, seed_range, RunSummary, SelectionMode, Trace,
};

use crate::config::ScenarioFile;
use crate::output;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Merit,
    Random,
    Paired,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase", deny_unknown_fields)]
pub enum Invocation {
    Run { mode: RunMode },
    Sweep { points: usize, seeds: usize },
}

/// Everything needed to regenerate an output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub manifest_version: u32,
    pub csv_schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub core_version: String,
    pub seed: u64,
    pub invocation: Invocation,
    pub config: ScenarioFile,
    pub files: Vec<String>,
}

impl Manifest {
    fn new(config: &ScenarioFile, invocation: Invocation, files: Vec<String>) -> Self {
        Manifest {
            manifest_version: MANIFEST_VERSION,
            csv_schema_version: output::CSV_SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            core_version: sortition_core::VERSION.to_string(),
            seed: config.sim.seed,
            invocation,
            config: config.clone(),
            files,
        }
    }

    /// Key-sorted, pretty-printed JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> Result<String> {
        // serde_json::Value keeps object keys in a BTreeMap
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)? + "\n")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .with_context(|| format!("invalid manifest {}", path.display()))?;
        if manifest.manifest_version != MANIFEST_VERSION {
            bail!(
                "manifest version {} is not supported (expected {MANIFEST_VERSION})",
                manifest.manifest_version
            );
        }
        Ok(manifest)
    }
}

/// What a command wrote.
#[derive(Debug, Clone)]
pub struct OutputBundle {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub manifest: Manifest,
}

fn prepare_dir(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))
}

fn write_file<F>(out_dir: &Path, name: &str, files: &mut Vec<PathBuf>, write: F) -> Result<()>
where
    F: FnOnce(BufWriter<File>) -> Result<()>,
{
    let path = out_dir.join(name);
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    write(BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))?;
    files.push(path);
    Ok(())
}

fn finish(out_dir: &Path, mut files: Vec<PathBuf>, manifest: Manifest) -> Result<OutputBundle> {
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, manifest.to_canonical_json()?)
        .with_context(|| format!("cannot write {}", path.display()))?;
    files.push(path);
    Ok(OutputBundle {
        out_dir: out_dir.to_path_buf(),
        files,
        manifest,
    })
}

/// Runs one scenario in the requested mode(s) and writes the per-epoch,
/// per-participant, trajectory and summary tables.
pub fn cmd_run(config: &ScenarioFile, mode: RunMode, out_dir: &Path) -> Result<OutputBundle> {
    prepare_dir(out_dir)?;
    let runs: Vec<RunSummary> = match mode {
        RunMode::Merit => vec![run_scenario(&config.scenario(SelectionMode::Merit))?],
        RunMode::Random => vec![run_scenario(&config.scenario(SelectionMode::Random))?],
        RunMode::Paired => {
            let (merit, random) = run_paired(&config.scenario(SelectionMode::Merit), Trace::Full)?;
            vec![merit, random]
        }
    };
    let refs: Vec<&RunSummary> = runs.iter().collect();

    let mut files = Vec::new();
    write_file(out_dir, "epochs.csv", &mut files, |w| {
        output::write_epochs(w, &refs)
    })?;
    write_file(out_dir, "participants.csv", &mut files, |w| {
        output::write_participants(w, &refs)
    })?;
    write_file(out_dir, "trajectories.csv", &mut files, |w| {
        output::write_trajectories(w, &refs)
    })?;
    write_file(out_dir, "summary.csv", &mut files, |w| {
        output::write_summary(w, &refs)
    })?;

    let names = file_names(&files);
    finish(
        out_dir,
        files,
        Manifest::new(config, Invocation::Run { mode }, names),
    )
}

/// Percentile sweep over `points` grid values and `seeds` consecutive seeds
/// starting at the configured seed.
pub fn cmd_sweep(
    config: &ScenarioFile,
    points: usize,
    seeds: usize,
    out_dir: &Path,
) -> Result<OutputBundle> {
    if points == 0 {
        bail!("--points must be at least 1");
    }
    if seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    prepare_dir(out_dir)?;
    let base = config.scenario(SelectionMode::Merit);
    let sweep = percentile_sweep_seeds(&base, points, &seed_range(config.sim.seed, seeds))?;

    let mut files = Vec::new();
    write_file(out_dir, "sweep.csv", &mut files, |w| {
        output::write_sweep(w, &sweep)
    })?;
    let names = file_names(&files);
    finish(
        out_dir,
        files,
        Manifest::new(config, Invocation::Sweep { points, seeds }, names),
    )
}

/// Re-executes the command recorded in a manifest.
pub fn cmd_replay(manifest_path: &Path, out_dir: &Path) -> Result<OutputBundle> {
    let manifest = Manifest::load(manifest_path)?;
    match manifest.invocation {
        Invocation::Run { mode } => cmd_run(&manifest.config, mode, out_dir),
        Invocation::Sweep { points, seeds } => cmd_sweep(&manifest.config, points, seeds, out_dir),
    }
}

fn file_names(files: &[PathBuf]) -> Vec<String> {
    let mut names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name())
        .map(|n| n.to_string_lossy().into_owned())
        .collect();
    names.push(MANIFEST_FILE.to_string());
    names
}
