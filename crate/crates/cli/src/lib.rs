//! Command-line front end: JSON configurations in, tables and reports out.
//!
//! Every run writes `manifest.json` next to its outputs. Passing that file back
//! as `--config` repeats the run with the same resolved configuration and seed.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use error::{CliError, CliResult};
use output::{Format, RunContext};

pub const TOOL_NAME: &str = "qcavity";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(
    name = "qcavity",
    version,
    about = "Open-system cavity QED simulations and estimates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON configuration, or a manifest.json written by an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Base seed for stochastic runs; overrides the manifest seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Table format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Absorption spectrum of the collective Rabi doublet.
    Spectrum(CommonArgs),
    /// Master-equation evolution.
    Evolve(CommonArgs),
    /// Stochastic trajectory ensemble.
    Trajectories(CommonArgs),
    /// Collapse times of phase-entangled cat states.
    Cat(CommonArgs),
    /// Microtubule cavity parameter estimates and feasibility verdict.
    Estimate(CommonArgs),
    /// Far-field interference hologram.
    Hologram(CommonArgs),
    /// Feasibility verdict over a range of one estimation parameter.
    Sweep(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => commands::spectrum::SpectrumConfig::NAME,
            Command::Evolve(_) => commands::evolve::EvolveConfig::NAME,
            Command::Trajectories(_) => commands::trajectories::TrajectoriesConfig::NAME,
            Command::Cat(_) => commands::cat::CatConfig::NAME,
            Command::Estimate(_) => commands::estimate::EstimateConfig::NAME,
            Command::Hologram(_) => commands::hologram::HologramConfig::NAME,
            Command::Sweep(_) => commands::sweep::SweepConfig::NAME,
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Spectrum(a)
            | Command::Evolve(a)
            | Command::Trajectories(a)
            | Command::Cat(a)
            | Command::Estimate(a)
            | Command::Hologram(a)
            | Command::Sweep(a) => a,
        }
    }
}

/// A command's configuration: resolved once, then executed.
pub trait Task: Serialize + DeserializeOwned {
    const NAME: &'static str;

    /// Configuration used when `--config` is omitted.
    fn default_config() -> Option<Self> {
        None
    }

    /// Validates and fills every default so the result reproduces the run.
    fn resolve(self) -> CliResult<Self>;

    fn execute(&self, ctx: &RunContext) -> CliResult<()>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub format: Format,
    pub config: serde_json::Value,
}

impl Manifest {
    fn detect(value: &serde_json::Value) -> bool {
        value.get("tool").and_then(|t| t.as_str()) == Some(TOOL_NAME) && value.get("config").is_some()
    }
}

/// Raw configuration plus whatever an input manifest pinned.
struct Loaded {
    config: Option<serde_json::Value>,
    seed: Option<u64>,
    format: Option<Format>,
}

fn load(command: &str, args: &CommonArgs) -> CliResult<Loaded> {
    let Some(path) = &args.config else {
        return Ok(Loaded {
            config: None,
            seed: None,
            format: None,
        });
    };
    let text = output::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: invalid JSON: {e}", path.display())))?;
    if !Manifest::detect(&value) {
        return Ok(Loaded {
            config: Some(value),
            seed: None,
            format: None,
        });
    }
    let manifest: Manifest = config::parse(value)?;
    if manifest.command != command {
        return Err(CliError::config(format!(
            "manifest was written by '{}', not '{command}'",
            manifest.command
        )));
    }
    Ok(Loaded {
        config: Some(manifest.config),
        seed: Some(manifest.seed),
        format: Some(manifest.format),
    })
}

fn run_task<T: Task>(args: &CommonArgs) -> CliResult<()> {
    let loaded = load(T::NAME, args)?;
    let cfg: T = match loaded.config {
        Some(v) => config::parse(v)?,
        None => T::default_config().ok_or_else(|| CliError::config(format!("'{}' needs --config <file>", T::NAME)))?,
    };
    let cfg = cfg.resolve()?;
    let ctx = RunContext {
        out: args.out.clone(),
        seed: args.seed.or(loaded.seed).unwrap_or(0),
        format: args.format.or(loaded.format).unwrap_or_default(),
    };
    ctx.prepare()?;
    let manifest = Manifest {
        tool: TOOL_NAME.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: T::NAME.into(),
        seed: ctx.seed,
        format: ctx.format,
        config: config::to_value(&cfg)?,
    };
    ctx.write_json(MANIFEST_FILE, &manifest)?;
    cfg.execute(&ctx)
}

pub fn run(cli: &Cli) -> CliResult<()> {
    use commands::*;
    let args = cli.command.args();
    log::debug!("running {} with {:?}", cli.command.name(), args);
    match &cli.command {
        Command::Spectrum(_) => run_task::<spectrum::SpectrumConfig>(args),
        Command::Evolve(_) => run_task::<evolve::EvolveConfig>(args),
        Command::Trajectories(_) => run_task::<trajectories::TrajectoriesConfig>(args),
        Command::Cat(_) => run_task::<cat::CatConfig>(args),
        Command::Estimate(_) => run_task::<estimate::EstimateConfig>(args),
        Command::Hologram(_) => run_task::<hologram::HologramConfig>(args),
        Command::Sweep(_) => run_task::<sweep::SweepConfig>(args),
    }
}
