//! Run configuration: experiment, seed, format and a flat parameter map.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dotqip_core::{Frame, PulseShape, SignConvention, TargetKind};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{validation, CliError};

pub const OUT_DIR_ENV: &str = "DOTQIP_OUT_DIR";
pub const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Bell,
    Ghz,
    Ghz2,
    Decohere,
    Teleport,
    NmrSweep,
    Vinter,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Bell => "bell",
            Experiment::Ghz => "ghz",
            Experiment::Ghz2 => "ghz2",
            Experiment::Decohere => "decohere",
            Experiment::Teleport => "teleport",
            Experiment::NmrSweep => "nmr-sweep",
            Experiment::Vinter => "vinter",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Experiment::Teleport => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Toggle {
    On,
    Off,
}

impl Toggle {
    pub fn is_on(self) -> bool {
        self == Toggle::On
    }
}

/// Fully resolved configuration. Serializes to the flat document recorded
/// in every output file; `output_path` is deliberately not part of it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub output_path: PathBuf,
    #[serde(flatten)]
    pub parameters: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn params<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        let map: Map<String, Value> = self.parameters.clone().into_iter().collect();
        serde_json::from_value(Value::Object(map)).map_err(|e| validation(format!("{}: {e}", self.experiment.name())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config is plain data")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationParams {
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub phi: f64,
    pub tmax: f64,
    pub dt: f64,
    pub gamma: f64,
    pub detuning: f64,
    pub convention: SignConvention,
    pub shape: PulseShape,
    pub frame: Frame,
    pub epsilon_ev: f64,
}

impl Default for GenerationParams {
    fn default() -> Self {
        GenerationParams {
            w: 0.1,
            a: 0.04,
            phi: 0.0,
            tmax: 100.0,
            dt: 0.05,
            gamma: 0.0,
            detuning: 0.0,
            convention: SignConvention::DensityMatrix,
            shape: PulseShape::Cosine,
            frame: Frame::Rotating,
            epsilon_ev: 2.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecohereParams {
    pub target: TargetKind,
    #[serde(rename = "W")]
    pub w: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub phi: f64,
    pub gammas: Vec<f64>,
    pub tmax: f64,
    pub dt: f64,
    pub convention: SignConvention,
    pub shape: PulseShape,
}

impl Default for DecohereParams {
    fn default() -> Self {
        DecohereParams {
            target: TargetKind::Bell,
            w: 0.1,
            a: 0.04,
            phi: std::f64::consts::FRAC_PI_2,
            gammas: vec![0.0, 1e-4, 1e-3, 1e-2],
            tmax: 200.0,
            dt: 0.5,
            convention: SignConvention::DensityMatrix,
            shape: PulseShape::Cosine,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TeleportParams {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_im: f64,
    pub beta_im: f64,
    /// Forced measurement outcome "b1b2"; sampled from the seed when absent.
    pub outcome: Option<String>,
}

impl Default for TeleportParams {
    fn default() -> Self {
        TeleportParams { alpha: 1.0, beta: 0.0, alpha_im: 0.0, beta_im: 0.0, outcome: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NmrParams {
    pub hbar_omega0_mev: f64,
    pub ratio: f64,
    pub mstar: f64,
    pub g: f64,
    pub c_over_l0sq_mhz: f64,
    pub gamma_n_mhz_per_t: f64,
    pub zeeman: Toggle,
    pub coupling_reduction: f64,
    pub bmin: f64,
    pub bmax: f64,
    pub steps: usize,
    pub ir: Toggle,
}

impl Default for NmrParams {
    fn default() -> Self {
        NmrParams {
            hbar_omega0_mev: 5.4,
            ratio: 3.0,
            mstar: 0.19,
            g: 2.0,
            c_over_l0sq_mhz: 60.0,
            gamma_n_mhz_per_t: 10.705,
            zeeman: Toggle::On,
            coupling_reduction: 1.0,
            bmin: 0.02,
            bmax: 12.0,
            steps: 600,
            ir: Toggle::Off,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VinterParams {
    pub alpha: f64,
    /// Each dot's electrons sit at (±radius, 0) from its center.
    pub radius: f64,
    pub dmin: f64,
    pub dmax: f64,
    pub steps: usize,
}

impl Default for VinterParams {
    fn default() -> Self {
        VinterParams { alpha: 1.0, radius: 0.5, dmin: 1.5, dmax: 10.0, steps: 50 }
    }
}

/// Parameters in canonical form: every key present, defaults filled in.
fn canonical(experiment: Experiment, raw: Map<String, Value>) -> Result<BTreeMap<String, Value>, CliError> {
    fn fill<T: DeserializeOwned + Serialize>(raw: Map<String, Value>, name: &str) -> Result<Value, CliError> {
        let typed: T = serde_json::from_value(Value::Object(raw)).map_err(|e| validation(format!("{name}: {e}")))?;
        Ok(serde_json::to_value(typed).expect("plain data"))
    }
    let name = experiment.name();
    let value = match experiment {
        Experiment::Bell | Experiment::Ghz | Experiment::Ghz2 => fill::<GenerationParams>(raw, name)?,
        Experiment::Decohere => fill::<DecohereParams>(raw, name)?,
        Experiment::Teleport => fill::<TeleportParams>(raw, name)?,
        Experiment::NmrSweep => fill::<NmrParams>(raw, name)?,
        Experiment::Vinter => fill::<VinterParams>(raw, name)?,
    };
    match value {
        Value::Object(m) => Ok(m.into_iter().collect()),
        _ => unreachable!("parameter structs serialize to objects"),
    }
}

/// Reads a configuration document: a flat JSON object, a JSON output file
/// (its `metadata.config`), or a CSV output file (its `# config:` line).
pub fn load_config_file(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| validation(format!("cannot read config {}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| validation(format!("config {}: {e}", path.display()));
    let value: Value = if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).map_err(bad)?;
        match v.pointer("/metadata/config") {
            Some(inner) => inner.clone(),
            None => v,
        }
    } else {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
            .ok_or_else(|| validation(format!("{}: no `{}` line", path.display(), CONFIG_PREFIX.trim())))?;
        serde_json::from_str(line).map_err(bad)?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => Err(validation(format!("config {} must be a JSON object", path.display()))),
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub parameters: Map<String, Value>,
}

/// Merges file values under command-line values and fills defaults.
pub fn resolve(
    experiment: Experiment,
    file: Option<Map<String, Value>>,
    flags: Overrides,
) -> Result<RunConfig, CliError> {
    let mut raw = file.unwrap_or_default();
    let file_experiment = raw.remove("experiment");
    if let Some(v) = file_experiment {
        let e: Experiment = serde_json::from_value(v).map_err(|e| validation(format!("experiment: {e}")))?;
        if e != experiment {
            return Err(validation(format!("config is for `{}`, not `{}`", e.name(), experiment.name())));
        }
    }
    let file_seed = raw.remove("seed").map(serde_json::from_value::<u64>).transpose();
    let file_seed = file_seed.map_err(|e| validation(format!("seed: {e}")))?;
    let file_format = raw.remove("format").map(serde_json::from_value::<Format>).transpose();
    let file_format = file_format.map_err(|e| validation(format!("format: {e}")))?;
    raw.extend(flags.parameters);

    let format = flags.format.or(file_format).unwrap_or(experiment.default_format());
    if experiment == Experiment::Teleport && format == Format::Csv {
        return Err(validation("teleport writes a JSON record; use --format json"));
    }
    let parameters = canonical(experiment, raw)?;
    let output_path = match flags.out {
        Some(p) => p,
        None => {
            let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
            dir.join(format!("{}.{}", experiment.name(), format.extension()))
        }
    };
    Ok(RunConfig { experiment, seed: flags.seed.or(file_seed).unwrap_or(0), format, output_path, parameters })
}
