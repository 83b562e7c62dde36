//! Command-line driver: argument parsing, configuration resolution, and
//! deterministic output files for each experiment.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

pub use config::{resolve, Experiment, Format, Overrides, RunConfig};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "dotqip", version, about = "Exciton entanglement, teleportation and NMR-switch experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-dot Bell-state generation.
    Bell(GenerationArgs),
    /// Three-dot GHZ generation from |0⟩.
    Ghz(GenerationArgs),
    /// Three-dot GHZ generation from |1⟩.
    Ghz2(GenerationArgs),
    /// Target overlap under pure dephasing for a list of rates.
    Decohere(DecohereArgs),
    /// Teleportation circuit with measurement and correction.
    Teleport(TeleportArgs),
    /// NMR frequency shift versus magnetic field.
    NmrSweep(NmrArgs),
    /// Inter-dot electron interaction versus dot separation.
    Vinter(VinterArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// Flat JSON config, or an earlier output file whose metadata to reuse.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; defaults to $DOTQIP_OUT_DIR/<experiment>.<ext>.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct GenerationArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    /// Förster coupling, units of ε.
    #[arg(long = "W")]
    #[serde(rename = "W")]
    w: Option<f64>,
    /// Laser amplitude, units of ε.
    #[arg(long = "A")]
    #[serde(rename = "A")]
    a: Option<f64>,
    /// Target phase φ.
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Pure-dephasing rate Γ; 0 selects exact unitary evolution.
    #[arg(long)]
    gamma: Option<f64>,
    /// Δ_ω = ε − ω.
    #[arg(long)]
    detuning: Option<f64>,
    /// wavefunction | density-matrix
    #[arg(long)]
    convention: Option<String>,
    /// cosine | rwa-constant
    #[arg(long)]
    shape: Option<String>,
    /// rotating | lab
    #[arg(long)]
    frame: Option<String>,
    /// Band gap in eV, recorded for unit conversion.
    #[arg(long)]
    epsilon_ev: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct DecohereArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    /// bell | ghz | ghz2
    #[arg(long)]
    target: Option<String>,
    #[arg(long = "W")]
    #[serde(rename = "W")]
    w: Option<f64>,
    #[arg(long = "A")]
    #[serde(rename = "A")]
    a: Option<f64>,
    #[arg(long)]
    phi: Option<f64>,
    /// Comma-separated dephasing rates.
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    convention: Option<String>,
    #[arg(long)]
    shape: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct TeleportArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha_im: Option<f64>,
    #[arg(long)]
    beta_im: Option<f64>,
    /// Force the measured bits, e.g. 01; sampled from --seed otherwise.
    #[arg(long)]
    outcome: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct NmrArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    #[arg(long)]
    hbar_omega0_mev: Option<f64>,
    /// (α/l₀²)/(ℏω₀)
    #[arg(long)]
    ratio: Option<f64>,
    /// m*/mₑ
    #[arg(long)]
    mstar: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    c_over_l0sq_mhz: Option<f64>,
    #[arg(long)]
    gamma_n_mhz_per_t: Option<f64>,
    /// on | off
    #[arg(long)]
    zeeman: Option<String>,
    #[arg(long)]
    coupling_reduction: Option<f64>,
    #[arg(long)]
    bmin: Option<f64>,
    #[arg(long)]
    bmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// on | off
    #[arg(long)]
    ir: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[command(allow_negative_numbers = true)]
struct VinterArgs {
    #[command(flatten)]
    #[serde(skip)]
    common: Common,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    dmin: Option<f64>,
    #[arg(long)]
    dmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

fn given<T: Serialize>(args: &T) -> Map<String, Value> {
    match serde_json::to_value(args).expect("plain data") {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

fn split(command: &Command) -> (Experiment, &Common, Map<String, Value>) {
    match command {
        Command::Bell(a) => (Experiment::Bell, &a.common, given(a)),
        Command::Ghz(a) => (Experiment::Ghz, &a.common, given(a)),
        Command::Ghz2(a) => (Experiment::Ghz2, &a.common, given(a)),
        Command::Decohere(a) => (Experiment::Decohere, &a.common, given(a)),
        Command::Teleport(a) => (Experiment::Teleport, &a.common, given(a)),
        Command::NmrSweep(a) => (Experiment::NmrSweep, &a.common, given(a)),
        Command::Vinter(a) => (Experiment::Vinter, &a.common, given(a)),
    }
}

/// Runs a resolved configuration and writes its output file.
pub fn run(cfg: &RunConfig, workers: usize) -> Result<PathBuf, CliError> {
    if workers == 0 {
        return Err(error::validation("workers must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let out = experiments::dispatch(cfg, &pool)?;
    let bytes = output::render(cfg, &out)?;
    output::write_atomic(&cfg.output_path, &bytes)?;
    Ok(cfg.output_path.clone())
}

/// Full command-line entry point; returns the process exit code.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    let err = CliError::Validation(e.to_string().trim().to_string());
                    eprintln!("{}", err.record());
                    err.exit_code()
                }
            };
        }
    };
    let (experiment, common, flags) = split(&cli.command);
    let result = (|| {
        let file = common.config.as_deref().map(config::load_config_file).transpose()?;
        let overrides =
            Overrides { seed: common.seed, format: common.format, out: common.out.clone(), parameters: flags };
        let cfg = resolve(experiment, file, overrides)?;
        run(&cfg, common.workers)
    })();
    match result {
        Ok(path) => {
            println!("{}", path.display());
            0
        }
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}
