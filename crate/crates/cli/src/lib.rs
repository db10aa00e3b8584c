//! Scenario runner for `nvcool-core`: figure data, cooling runs, Langevin
//! ensembles, oracle validation, parameter sweeps and regression comparison.

pub mod compare;
pub mod error;
pub mod output;
pub mod scenarios;
pub mod validate;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::Value;

use nvcool_core::params::apply_overrides;
use nvcool_core::SystemConfig;

pub use error::{CliError, CliResult};
pub use output::Format;

pub const SCENARIOS: &[&str] = &[
    "trap",
    "validate",
    "fig3",
    "fig4",
    "cool",
    "ensemble",
    "validate-oracles",
    "sweep",
    "compare",
];

/// Which friction model drives the `cool` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FieldKind {
    Analytic,
    LinearResponse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PotentialKind {
    Harmonic,
    Full,
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "nvcool",
    version,
    about = "Spin-rotation cooling of a levitated nanodiamond",
    after_help = "Scenarios: trap, validate, fig3, fig4, cool, ensemble, validate-oracles, sweep, compare\n\
                  Exit codes: 0 ok, 1 usage, 2 physics check failed, 3 bad config, 4 I/O"
)]
pub struct Cli {
    /// Scenario to run.
    pub scenario: String,

    /// Two output files (compare only).
    pub files: Vec<PathBuf>,

    /// JSON config file with unit-tagged values.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Override a config key, e.g. --set zeeman_B1=2:MHz (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Output directory.
    #[arg(long, env = "NVCOOL_OUT", default_value = "nvcool-out")]
    pub out: PathBuf,

    /// sweep: config key to vary.
    #[arg(long)]
    pub param: Option<String>,

    /// sweep: comma-separated values, e.g. 1:per_us,2:per_us.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,

    /// Orientation α for sweep, cool and ensemble (degrees).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha_deg: f64,

    /// Orientation β for sweep (degrees).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta_deg: f64,

    /// cool: impose a constant κ_β in units of h instead of the spin field.
    #[arg(long)]
    pub kappa_h: Option<f64>,

    /// cool: friction model when no κ is imposed.
    #[arg(long, value_enum, default_value_t = FieldKind::Analytic)]
    pub field: FieldKind,

    /// cool: trap potential.
    #[arg(long, value_enum, default_value_t = PotentialKind::Harmonic)]
    pub potential: PotentialKind,

    /// cool: initial displacement from equilibrium (degrees).
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub displacement_deg: f64,

    /// cool: duration in predicted damping times.
    #[arg(long, default_value_t = 3.0)]
    pub duration: f64,

    /// cool: output samples.
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,

    /// ensemble: number of trajectories.
    #[arg(long, default_value_t = 200)]
    pub n_traj: usize,

    /// ensemble: burn-in in damping times.
    #[arg(long, default_value_t = 8.0)]
    pub burn_in: f64,

    /// ensemble: averaging window in damping times.
    #[arg(long, default_value_t = 40.0)]
    pub window: f64,

    /// ensemble: time step as a fraction of 1/max(ω₀, κ/I₁).
    #[arg(long, default_value_t = 0.05)]
    pub dt_factor: f64,

    /// compare: relative tolerance per value.
    #[arg(long, default_value_t = 0.0)]
    pub rtol: f64,
}

/// Loaded configuration: the override-applied document and its resolution.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub doc: Value,
    pub cfg: SystemConfig,
}

pub fn parse_overrides(set: &[String]) -> CliResult<Vec<(String, String)>> {
    set.iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))
        })
        .collect()
}

pub fn load_config(path: &Path, overrides: &[(String, String)]) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    apply_overrides(&mut doc, overrides)?;
    let cfg = SystemConfig::from_json_value(&doc)?;
    Ok(Loaded { doc, cfg })
}

/// Parses `args` (including the program name) and runs the scenario.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match scenarios::dispatch(&cli, command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("nvcool {}: {e}", cli.scenario);
            e.exit_code()
        }
    }
}
