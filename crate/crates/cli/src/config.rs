//! Run configuration: JSON file merged with command-line overrides, then
//! validated per subcommand.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use sonon::bell::{ExperimentGeometry, LocalModelKind, LocalModelSpec, Settings, MIN_TRIALS_PER_PAIR, SPEED_OF_LIGHT};
use sonon::field::{SononMode, MAX_ORDER, MIN_QUAD_NODES};
use sonon::pilot::{Axis, EnsembleOptions, ScenarioKind, ScenarioSpec, MIN_TRAJECTORIES};
use sonon::sync::{default_angles, ClusterOptions, GeometryConfig, Kernel};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubcommandName {
    FieldScan,
    PilotWave,
    Kuramoto,
    Bell,
    Audit,
}

impl SubcommandName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubcommandName::FieldScan => "field-scan",
            SubcommandName::PilotWave => "pilot-wave",
            SubcommandName::Kuramoto => "kuramoto",
            SubcommandName::Bell => "bell",
            SubcommandName::Audit => "audit",
        }
    }
}

pub const DEFAULT_OUTPUT_DIR: &str = "out";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: SubcommandName,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Params {
    FieldScan(FieldScanParams),
    PilotWave(PilotWaveParams),
    Kuramoto(KuramotoParams),
    Bell(BellParams),
    Audit(AuditParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldScanParams {
    pub m: u32,
    pub n: u32,
    pub k_r: f64,
    pub ring_radius: f64,
    pub omega0: f64,
    pub amplitude: f64,
    /// Direction of the radial scan, from the ring axis.
    pub polar_deg: f64,
    pub azimuth_deg: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    pub quad_nodes: usize,
    pub time: f64,
}

impl Default for FieldScanParams {
    fn default() -> Self {
        Self {
            m: 1,
            n: 0,
            k_r: 1.0,
            ring_radius: 1.0,
            omega0: 1.0,
            amplitude: 1.0,
            polar_deg: 90.0,
            azimuth_deg: 0.0,
            r_min: 2.0,
            r_max: 40.0,
            samples: 200,
            quad_nodes: 512,
            time: 0.0,
        }
    }
}

impl FieldScanParams {
    pub fn mode(&self) -> SononMode {
        SononMode { m: self.m, n: self.n, k_r: self.k_r, ring_radius: self.ring_radius, omega0: self.omega0, amplitude: self.amplitude }
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.m > MAX_ORDER {
            return Err(CliError::config("m", format!("must be at most {MAX_ORDER}, got {}", self.m)));
        }
        if self.m == 0 && self.n == 0 {
            return Err(CliError::config("n", "(m, n) = (0, 0) is not a ring mode"));
        }
        for (key, v) in [("k_r", self.k_r), ("ring_radius", self.ring_radius), ("omega0", self.omega0)] {
            positive(key, v)?;
        }
        finite("amplitude", self.amplitude)?;
        finite("time", self.time)?;
        finite("azimuth_deg", self.azimuth_deg)?;
        if !(0.0..=180.0).contains(&self.polar_deg) {
            return Err(CliError::config("polar_deg", format!("must lie in [0, 180], got {}", self.polar_deg)));
        }
        positive("r_min", self.r_min)?;
        if self.r_max <= self.r_min || !self.r_max.is_finite() {
            return Err(CliError::config("r_max", format!("must exceed r_min = {}, got {}", self.r_min, self.r_max)));
        }
        if self.samples < 2 {
            return Err(CliError::config("samples", format!("must be at least 2, got {}", self.samples)));
        }
        if self.quad_nodes < MIN_QUAD_NODES {
            return Err(CliError::config("quad_nodes", format!("must be at least {MIN_QUAD_NODES}, got {}", self.quad_nodes)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    DoubleSlit,
    GaussianFree,
    PlaneWave,
    Barrier,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PilotWaveParams {
    pub scenario: ScenarioName,
    /// Number of trajectories.
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavenumber: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<f64>,
    pub record_every: usize,
    pub bins: usize,
    /// Grid cells a trajectory may travel in one step before the step is split.
    pub max_travel_cells: f64,
}

impl Default for PilotWaveParams {
    fn default() -> Self {
        Self {
            scenario: ScenarioName::DoubleSlit,
            trials: 2000,
            dt: None,
            t_final: None,
            grid_min: None,
            grid_max: None,
            grid_samples: None,
            sigma0: None,
            k0: None,
            x0: None,
            separation: None,
            wavenumber: None,
            height: None,
            width: None,
            position: None,
            record_every: 10,
            bins: 120,
            max_travel_cells: EnsembleOptions::default().max_travel_cells,
        }
    }
}

impl PilotWaveParams {
    /// Scenario defaults with the configured overrides applied.
    pub fn scenario_spec(&self) -> Result<ScenarioSpec, CliError> {
        let mut spec = match self.scenario {
            ScenarioName::DoubleSlit => ScenarioSpec::double_slit(),
            ScenarioName::GaussianFree => ScenarioSpec::gaussian_free(),
            ScenarioName::PlaneWave => ScenarioSpec::plane_wave(),
            ScenarioName::Barrier => ScenarioSpec::barrier(),
        };
        let set = |key: &'static str, value: Option<f64>, slot: Option<&mut f64>| -> Result<(), CliError> {
            match (value, slot) {
                (Some(v), Some(s)) => {
                    finite(key, v)?;
                    *s = v;
                    Ok(())
                }
                (Some(_), None) => Err(CliError::config(key, format!("not used by scenario {}", spec_label(self.scenario)))),
                (None, _) => Ok(()),
            }
        };
        {
            let (sigma0, k0, x0, separation, wavenumber, height, width, position) = match &mut spec.kind {
                ScenarioKind::PlaneWave { wavenumber } => (None, None, None, None, Some(wavenumber), None, None, None),
                ScenarioKind::GaussianFree { sigma0, k0, x0 } => (Some(sigma0), Some(k0), Some(x0), None, None, None, None, None),
                ScenarioKind::DoubleSlit { sigma0, separation, k0 } => {
                    (Some(sigma0), Some(k0), None, Some(separation), None, None, None, None)
                }
                ScenarioKind::Barrier { sigma0, k0, x0, height, width, position } => {
                    (Some(sigma0), Some(k0), Some(x0), None, None, Some(height), Some(width), Some(position))
                }
            };
            set("sigma0", self.sigma0, sigma0)?;
            set("k0", self.k0, k0)?;
            set("x0", self.x0, x0)?;
            set("separation", self.separation, separation)?;
            set("wavenumber", self.wavenumber, wavenumber)?;
            set("height", self.height, height)?;
            set("width", self.width, width)?;
            set("position", self.position, position)?;
        }
        if let Some(dt) = self.dt {
            positive("dt", dt)?;
            spec.dt = dt;
        }
        if let Some(t) = self.t_final {
            positive("t_final", t)?;
            spec.t_final = t;
        }
        if let Some(v) = self.grid_min {
            finite("grid_min", v)?;
            spec.grid.min = v;
        }
        if let Some(v) = self.grid_max {
            finite("grid_max", v)?;
            spec.grid.max = v;
        }
        if let Some(v) = self.grid_samples {
            spec.grid.samples = v;
        }
        Axis::new(spec.grid.min, spec.grid.max, spec.grid.samples).map_err(|e| CliError::config("grid_samples", e))?;
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.trials < MIN_TRAJECTORIES {
            return Err(CliError::config("trials", format!("need at least {MIN_TRAJECTORIES} trajectories, got {}", self.trials)));
        }
        if self.record_every == 0 {
            return Err(CliError::config("record_every", "must be at least 1"));
        }
        if self.bins == 0 {
            return Err(CliError::config("bins", "must be at least 1"));
        }
        positive("max_travel_cells", self.max_travel_cells)?;
        self.scenario_spec().map(|_| ())
    }
}

fn spec_label(name: ScenarioName) -> &'static str {
    match name {
        ScenarioName::DoubleSlit => "double_slit",
        ScenarioName::GaussianFree => "gaussian_free",
        ScenarioName::PlaneWave => "plane_wave",
        ScenarioName::Barrier => "barrier",
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KuramotoExperiment {
    TriangleSweep,
    Tetrahedron,
    Threshold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelName {
    InverseR,
    Uniform,
    Signed,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KuramotoParams {
    pub experiment: KuramotoExperiment,
    /// Largest triangle angles in degrees.
    pub angles: Vec<f64>,
    pub coupling: f64,
    pub kernel: KernelName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_k_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_radii: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel_values: Option<Vec<f64>>,
    pub omega0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<f64>,
    pub detuning: Vec<f64>,
    /// Trials per geometry.
    pub trials: usize,
    pub perimeter: f64,
    /// Tetrahedron edge.
    pub edge: f64,
    /// Pair distance for the threshold bisection.
    pub distance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transient: Option<f64>,
}

impl Default for KuramotoParams {
    fn default() -> Self {
        Self {
            experiment: KuramotoExperiment::TriangleSweep,
            angles: default_angles(),
            coupling: 1.0,
            kernel: KernelName::InverseR,
            kernel_k_r: None,
            kernel_radii: None,
            kernel_values: None,
            omega0: 1.0,
            jitter: None,
            detuning: Vec::new(),
            trials: 200,
            perimeter: 3.0,
            edge: 1.0,
            distance: 1.0,
            tol: None,
            window: None,
            transient: None,
        }
    }
}

impl KuramotoParams {
    pub fn kernel(&self) -> Result<Kernel, CliError> {
        let unused = |key: &str| CliError::config(key, "only used with a matching kernel");
        let kernel = match self.kernel {
            KernelName::InverseR | KernelName::Uniform => {
                if self.kernel_k_r.is_some() {
                    return Err(unused("kernel_k_r"));
                }
                if self.kernel_radii.is_some() || self.kernel_values.is_some() {
                    return Err(unused("kernel_radii"));
                }
                if self.kernel == KernelName::Uniform {
                    Kernel::Uniform
                } else {
                    Kernel::InverseR
                }
            }
            KernelName::Signed => Kernel::Signed { k_r: self.kernel_k_r.ok_or_else(|| CliError::config("kernel_k_r", "required by the signed kernel"))? },
            KernelName::Table => Kernel::Table {
                radii: self.kernel_radii.clone().ok_or_else(|| CliError::config("kernel_radii", "required by the table kernel"))?,
                values: self.kernel_values.clone().ok_or_else(|| CliError::config("kernel_values", "required by the table kernel"))?,
            },
        };
        kernel.validate().map_err(|e| CliError::config("kernel", e))?;
        Ok(kernel)
    }

    pub fn geometry_config(&self) -> Result<GeometryConfig, CliError> {
        let clusters = match (self.tol, self.window, self.transient) {
            (None, None, None) => None,
            (tol, window, transient) => {
                let base = ClusterOptions::for_coupling(self.coupling);
                Some(ClusterOptions {
                    tol: tol.unwrap_or(base.tol),
                    window: window.unwrap_or(base.window),
                    transient: transient.unwrap_or(base.transient),
                })
            }
        };
        Ok(GeometryConfig {
            coupling: self.coupling,
            kernel: self.kernel()?,
            omega0: self.omega0,
            jitter: self.jitter,
            detuning: self.detuning.clone(),
            trials: self.trials,
            perimeter: self.perimeter,
            clusters,
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.angles.is_empty() {
            return Err(CliError::config("angles", "must not be empty"));
        }
        if let Some(a) = self.angles.iter().find(|a| !(60.0..=180.0).contains(*a)) {
            return Err(CliError::config("angles", format!("{a}° is outside [60°, 180°]")));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(CliError::config("coupling", format!("must be non-negative, got {}", self.coupling)));
        }
        finite("omega0", self.omega0)?;
        if let Some(j) = self.jitter {
            if !(j >= 0.0 && j.is_finite()) {
                return Err(CliError::config("jitter", format!("must be non-negative, got {j}")));
            }
        }
        if self.trials == 0 {
            return Err(CliError::config("trials", "must be at least 1"));
        }
        positive("perimeter", self.perimeter)?;
        positive("edge", self.edge)?;
        positive("distance", self.distance)?;
        if let Some(t) = self.tol {
            positive("tol", t)?;
        }
        if let Some(w) = self.window {
            positive("window", w)?;
        }
        if let Some(t) = self.transient {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::config("transient", format!("must be non-negative, got {t}")));
            }
        }
        let oscillators = match self.experiment {
            KuramotoExperiment::TriangleSweep => Some(3),
            KuramotoExperiment::Tetrahedron => Some(4),
            KuramotoExperiment::Threshold => None,
        };
        if let Some(n) = oscillators {
            if !self.detuning.is_empty() && self.detuning.len() != n {
                return Err(CliError::config("detuning", format!("needs {n} entries, got {}", self.detuning.len())));
            }
        }
        if self.experiment == KuramotoExperiment::Threshold && self.coupling == 0.0 {
            return Err(CliError::config("coupling", "threshold bisection needs positive coupling"));
        }
        self.geometry_config()?.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    SharedPhase,
    QuantumOracle,
    DeterministicTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BellParams {
    pub model: ModelName,
    /// `[A(a), A(a′), B(b), B(b′)]` for the deterministic table.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<[i8; 4]>,
    /// Defaults to true for the quantum oracle and false otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub communication_allowed: Option<bool>,
    /// `(a, a′, b, b′)` in degrees.
    pub settings_deg: [f64; 4],
    /// Trials per setting pair.
    pub trials: usize,
}

impl Default for BellParams {
    fn default() -> Self {
        Self { model: ModelName::SharedPhase, table: None, communication_allowed: None, settings_deg: [0.0, 45.0, 22.5, 67.5], trials: 100_000 }
    }
}

impl BellParams {
    pub fn settings(&self) -> Settings {
        let [a, ap, b, bp] = self.settings_deg;
        Settings::from_degrees(a, ap, b, bp)
    }

    pub fn model(&self) -> Result<LocalModelSpec, CliError> {
        let kind = match self.model {
            ModelName::SharedPhase => LocalModelKind::SharedPhase,
            ModelName::QuantumOracle => LocalModelKind::QuantumOracle,
            ModelName::DeterministicTable => LocalModelKind::DeterministicTable {
                table: self.table.ok_or_else(|| CliError::config("table", "required by the deterministic_table model"))?,
            },
        };
        if self.table.is_some() && self.model != ModelName::DeterministicTable {
            return Err(CliError::config("table", "only used by the deterministic_table model"));
        }
        let communication_allowed = self.communication_allowed.unwrap_or(self.model == ModelName::QuantumOracle);
        Ok(LocalModelSpec { kind, communication_allowed })
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.trials < MIN_TRIALS_PER_PAIR {
            return Err(CliError::config("trials", format!("need at least {MIN_TRIALS_PER_PAIR} per setting pair, got {}", self.trials)));
        }
        if self.settings_deg.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("settings_deg", "angles must be finite"));
        }
        if let Some(t) = self.table {
            if t.iter().any(|v| v.abs() != 1) {
                return Err(CliError::config("table", format!("entries must be ±1, got {t:?}")));
            }
        }
        self.model()?.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditParams {
    /// Preset names to audit; all available presets when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presets: Option<Vec<String>>,
    /// Directory of preset JSON files used instead of the built-in set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset_dir: Option<PathBuf>,
    pub speed_m_per_s: f64,
}

impl Default for AuditParams {
    fn default() -> Self {
        Self { presets: None, preset_dir: None, speed_m_per_s: SPEED_OF_LIGHT }
    }
}

impl AuditParams {
    pub fn geometries(&self) -> Result<Vec<ExperimentGeometry>, CliError> {
        let available = match &self.preset_dir {
            Some(dir) => ExperimentGeometry::load_dir(dir).map_err(|e| CliError::config("preset_dir", e))?,
            None => ExperimentGeometry::builtin(),
        };
        match &self.presets {
            None => Ok(available),
            Some(names) => names
                .iter()
                .map(|n| {
                    available
                        .iter()
                        .find(|g| &g.name == n)
                        .cloned()
                        .ok_or_else(|| CliError::config("presets", format!("unknown preset {n:?}")))
                })
                .collect(),
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        positive("speed_m_per_s", self.speed_m_per_s)?;
        if self.geometries()?.is_empty() {
            return Err(CliError::config("presets", "no presets selected"));
        }
        Ok(())
    }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(key, format!("must be positive, got {v}")))
    }
}

fn finite(key: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(key, format!("must be finite, got {v}")))
    }
}

fn deserialize_params<T: DeserializeOwned>(map: Map<String, Value>) -> Result<T, CliError> {
    serde_path_to_error::deserialize(Value::Object(map)).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            CliError::Config(inner.to_string())
        } else {
            CliError::config(&path, inner)
        }
    })
}

/// Reads a JSON config object from `path`.
pub fn read_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::Config(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(CliError::Config(format!("{}: {e}", path.display()))),
    }
}

/// Merges `overrides` over the file contents (if any) and validates the result
/// for `subcommand`.
pub fn parse_config(subcommand: SubcommandName, file: Option<&Path>, overrides: Map<String, Value>) -> Result<RunConfig, CliError> {
    let mut map = match file {
        Some(path) => read_config_file(path)?,
        None => Map::new(),
    };
    map.extend(overrides);
    build_config(subcommand, map)
}

pub fn build_config(subcommand: SubcommandName, mut map: Map<String, Value>) -> Result<RunConfig, CliError> {
    if let Some(v) = map.remove("subcommand") {
        let named: SubcommandName =
            serde_json::from_value(v).map_err(|e| CliError::config("subcommand", e))?;
        if named != subcommand {
            return Err(CliError::config(
                "subcommand",
                format!("config is for {} but {} was invoked", named.as_str(), subcommand.as_str()),
            ));
        }
    }
    let seed = match map.remove("seed") {
        None | Some(Value::Null) => 0,
        Some(v) => serde_json::from_value::<u64>(v).map_err(|e| CliError::config("seed", e))?,
    };
    let output_dir = match map.remove("output_dir") {
        None | Some(Value::Null) => PathBuf::from(DEFAULT_OUTPUT_DIR),
        Some(v) => serde_json::from_value::<PathBuf>(v).map_err(|e| CliError::config("output_dir", e))?,
    };
    let params = match subcommand {
        SubcommandName::FieldScan => {
            let p: FieldScanParams = deserialize_params(map)?;
            p.validate()?;
            Params::FieldScan(p)
        }
        SubcommandName::PilotWave => {
            let p: PilotWaveParams = deserialize_params(map)?;
            p.validate()?;
            Params::PilotWave(p)
        }
        SubcommandName::Kuramoto => {
            let p: KuramotoParams = deserialize_params(map)?;
            p.validate()?;
            Params::Kuramoto(p)
        }
        SubcommandName::Bell => {
            let p: BellParams = deserialize_params(map)?;
            p.validate()?;
            Params::Bell(p)
        }
        SubcommandName::Audit => {
            let p: AuditParams = deserialize_params(map)?;
            p.validate()?;
            Params::Audit(p)
        }
    };
    Ok(RunConfig { subcommand, seed, output_dir, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn obj(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn minimal_bell_config_fills_defaults() {
        let c = build_config(SubcommandName::Bell, obj(json!({"subcommand": "bell", "model": "shared_phase"}))).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.params, Params::Bell(BellParams::default()));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = build_config(SubcommandName::Bell, obj(json!({"modle": "shared_phase"}))).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("modle"), "{err}");
    }

    #[test]
    fn type_mismatch_is_named() {
        let err = build_config(SubcommandName::FieldScan, obj(json!({"samples": "many"}))).unwrap_err();
        assert!(err.to_string().contains("samples"), "{err}");
        let err = build_config(SubcommandName::Bell, obj(json!({"seed": -3}))).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn out_of_range_angle_is_named() {
        let err = build_config(SubcommandName::Kuramoto, obj(json!({"angles": [90.0, 200.0]}))).unwrap_err();
        assert!(err.to_string().contains("angles"), "{err}");
    }

    #[test]
    fn mismatched_subcommand_is_rejected() {
        let err = build_config(SubcommandName::Audit, obj(json!({"subcommand": "bell"}))).unwrap_err();
        assert!(err.to_string().contains("subcommand"));
    }

    #[test]
    fn scenario_overrides_apply_or_are_rejected() {
        let c = build_config(SubcommandName::PilotWave, obj(json!({"scenario": "barrier", "height": 2.0}))).unwrap();
        let Params::PilotWave(p) = c.params else { panic!() };
        assert!(matches!(p.scenario_spec().unwrap().kind, ScenarioKind::Barrier { height, .. } if height == 2.0));
        let err = build_config(SubcommandName::PilotWave, obj(json!({"scenario": "plane_wave", "height": 2.0}))).unwrap_err();
        assert!(err.to_string().contains("height"));
    }

    #[test]
    fn oracle_without_channel_is_refused() {
        let err =
            build_config(SubcommandName::Bell, obj(json!({"model": "quantum_oracle", "communication_allowed": false}))).unwrap_err();
        assert!(err.to_string().contains("communication channel"));
    }
}
