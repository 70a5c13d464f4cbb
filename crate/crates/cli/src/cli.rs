//! Command-line flags. Every per-subcommand flag mirrors a config key and
//! overrides the config file value when given.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{parse_config, KernelName, KuramotoExperiment, ModelName, RunConfig, ScenarioName, SubcommandName};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "sonon", version, about = "Ring-mode fields, pilot-wave ensembles, oscillator locking and Bell-test audits")]
pub struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Output directory (config key `output_dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Trajectories, trials per geometry, or trials per setting pair.
    #[arg(long, global = true, value_name = "N")]
    pub trials: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Radial scan of a ring-mode field against its far-field form.
    FieldScan(FieldScanFlags),
    /// Bohmian trajectory ensemble for a 1D scenario.
    PilotWave(PilotWaveFlags),
    /// Oscillator locking experiments.
    Kuramoto(KuramotoFlags),
    /// CHSH Monte Carlo for a local model or the quantum oracle.
    Bell(BellFlags),
    /// Light-cone audit of Bell-test geometries.
    Audit(AuditFlags),
}

#[derive(Debug, Default, Args, Serialize)]
pub struct FieldScanFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_r: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring_radius: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polar_deg: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub azimuth_deg: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_min: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_nodes: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

#[derive(Debug, Default, Args, Serialize)]
pub struct PilotWaveFlags {
    #[arg(long, value_parser = parse_enum::<ScenarioName>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioName>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_max: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_samples: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_travel_cells: Option<f64>,
}

#[derive(Debug, Default, Args, Serialize)]
pub struct KuramotoFlags {
    #[arg(long, value_parser = parse_enum::<KuramotoExperiment>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub experiment: Option<KuramotoExperiment>,
    /// Comma-separated largest angles in degrees.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<f64>,
    #[arg(long, value_parser = parse_enum::<KernelName>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelName>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_k_r: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_radii: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_values: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perimeter: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transient: Option<f64>,
}

#[derive(Debug, Default, Args, Serialize)]
pub struct BellFlags {
    #[arg(long, value_parser = parse_enum::<ModelName>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelName>,
    /// `A(a),A(a'),B(b),B(b')` as ±1 values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<i8>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub communication_allowed: Option<bool>,
    /// `a,a',b,b'` in degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settings_deg: Option<Vec<f64>>,
}

#[derive(Debug, Default, Args, Serialize)]
pub struct AuditFlags {
    /// Comma-separated preset names.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presets: Option<Vec<String>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset_dir: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed_m_per_s: Option<f64>,
}

fn parse_enum<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn to_map<T: Serialize>(flags: &T) -> Map<String, Value> {
    match serde_json::to_value(flags) {
        Ok(Value::Object(map)) => map,
        _ => Map::new(),
    }
}

impl Cli {
    /// Resolves flags and the optional config file into a validated config.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let (name, mut overrides) = match &self.command {
            Command::FieldScan(f) => (SubcommandName::FieldScan, to_map(f)),
            Command::PilotWave(f) => (SubcommandName::PilotWave, to_map(f)),
            Command::Kuramoto(f) => (SubcommandName::Kuramoto, to_map(f)),
            Command::Bell(f) => (SubcommandName::Bell, to_map(f)),
            Command::Audit(f) => (SubcommandName::Audit, to_map(f)),
        };
        if let Some(seed) = self.seed {
            overrides.insert("seed".into(), seed.into());
        }
        if let Some(out) = &self.out {
            overrides.insert("output_dir".into(), Value::String(out.to_string_lossy().into_owned()));
        }
        if let Some(trials) = self.trials {
            overrides.insert("trials".into(), trials.into());
        }
        parse_config(name, self.config.as_deref(), overrides)
    }
}
