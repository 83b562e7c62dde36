//! Dispatch from a resolved configuration to the core library.

use dotqip_core::linalg::C64;
use dotqip_core::nmr::{
    sweep_fields, v_inter_planar, v_inter_stacked, BOHR_MAGNETON, ELECTRON_MASS, HBAR, JOULE_PER_MEV,
};
use dotqip_core::{
    nmr_point, overlap_series, phase_optimized_overlap, teleport_with_measurement, time_steps, DephasingSpec,
    DotParams, DriveSpec, ExcitonSystemParams, Frame, GenerationRun, QubitState, TargetKind, UnitContext,
};
use rayon::prelude::*;

use crate::config::{DecohereParams, Experiment, GenerationParams, NmrParams, RunConfig, TeleportParams, VinterParams};
use crate::error::{validation, CliError};
use crate::output::{Cell, Output, Table};

/// Upper bound on rows per trajectory, to catch runaway `tmax/dt`.
const MAX_SAMPLES: f64 = 1e7;

pub fn dispatch(cfg: &RunConfig, pool: &rayon::ThreadPool) -> Result<Output, CliError> {
    match cfg.experiment {
        Experiment::Bell => generation(TargetKind::Bell, &cfg.params()?),
        Experiment::Ghz => generation(TargetKind::Ghz, &cfg.params()?),
        Experiment::Ghz2 => generation(TargetKind::Ghz2, &cfg.params()?),
        Experiment::Decohere => pool.install(|| decohere(&cfg.params()?)),
        Experiment::Teleport => teleport(&cfg.params()?, cfg.seed),
        Experiment::NmrSweep => pool.install(|| nmr_sweep(&cfg.params()?)),
        Experiment::Vinter => vinter(&cfg.params()?),
    }
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(validation(format!("{name} must be finite")))
    }
}

fn time_axis(tmax: f64, dt: f64) -> Result<Vec<f64>, CliError> {
    if !(finite("tmax", tmax)? > 0.0) || !(finite("dt", dt)? > 0.0) {
        return Err(validation("tmax and dt must be positive"));
    }
    if tmax / dt > MAX_SAMPLES {
        return Err(validation(format!("tmax/dt exceeds {MAX_SAMPLES} samples")));
    }
    Ok(time_steps(tmax, dt))
}

fn run_for(kind: TargetKind, p: &GenerationParams, gamma: f64) -> Result<GenerationRun, CliError> {
    for (name, v) in [("W", p.w), ("A", p.a), ("phi", p.phi), ("gamma", gamma), ("detuning", p.detuning)] {
        finite(name, v)?;
    }
    if gamma < 0.0 {
        return Err(validation("gamma must be non-negative"));
    }
    UnitContext::new(p.epsilon_ev)?;
    let system = ExcitonSystemParams::new(kind.n_dots(), p.w, p.convention);
    system.validate()?;
    let drive = DriveSpec {
        amplitude: p.a,
        carrier_freq: 1.0 - p.detuning,
        detuning: p.detuning,
        phase_target: p.phi,
        shape: p.shape,
        duration: p.tmax,
    };
    drive.validate()?;
    Ok(GenerationRun {
        system,
        drive,
        initial_level: if kind == TargetKind::Ghz2 { 1 } else { 0 },
        dephasing: DephasingSpec::rate(gamma),
        frame: p.frame,
    })
}

fn generation(kind: TargetKind, p: &GenerationParams) -> Result<Output, CliError> {
    let times = time_axis(p.tmax, p.dt)?;
    let traj = run_for(kind, p, p.gamma)?.simulate(&times)?;
    let overlap = overlap_series(&traj, kind, p.phi)?;
    let dim = kind.n_dots() as usize + 1;
    let mut columns = vec!["t", overlap_column(kind)];
    columns.extend(["rho00", "rho11", "rho22", "rho33"].into_iter().take(dim));
    columns.push("purity");
    let rows = traj
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut row = vec![Cell::Real(traj.times[i]), Cell::Real(overlap[i])];
            row.extend(s.populations().into_iter().map(Cell::Real));
            row.push(Cell::Real(s.purity()));
            row
        })
        .collect();
    Ok(Output::Table(Table { columns, rows }))
}

fn overlap_column(kind: TargetKind) -> &'static str {
    match kind {
        TargetKind::Bell => "O_bell",
        TargetKind::Ghz => "O_ghz",
        TargetKind::Ghz2 => "O_ghz2",
    }
}

fn decohere(p: &DecohereParams) -> Result<Output, CliError> {
    if p.gammas.is_empty() {
        return Err(validation("gammas must not be empty"));
    }
    let times = time_axis(p.tmax, p.dt)?;
    let base = GenerationParams {
        w: p.w,
        a: p.a,
        phi: p.phi,
        tmax: p.tmax,
        dt: p.dt,
        convention: p.convention,
        shape: p.shape,
        frame: Frame::Rotating,
        ..GenerationParams::default()
    };
    let runs = p.gammas.iter().map(|&g| run_for(p.target, &base, g)).collect::<Result<Vec<_>, _>>()?;
    let blocks: Vec<Vec<Vec<Cell>>> = runs
        .par_iter()
        .map(|run| -> Result<_, CliError> {
            let traj = run.simulate(&times)?;
            let fixed = overlap_series(&traj, p.target, p.phi)?;
            traj.states
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Ok(vec![
                        Cell::Real(run.dephasing.gamma),
                        Cell::Real(traj.times[i]),
                        Cell::Real(fixed[i]),
                        Cell::Real(phase_optimized_overlap(s, p.target)?),
                        Cell::Real(s.purity()),
                        Cell::Real(s.trace()),
                    ])
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(Output::Table(Table {
        columns: vec!["gamma", "t", "O_target", "O_envelope", "purity", "trace"],
        rows: blocks.into_iter().flatten().collect(),
    }))
}

fn teleport(p: &TeleportParams, seed: u64) -> Result<Output, CliError> {
    let input = QubitState::new(C64::new(p.alpha, p.alpha_im), C64::new(p.beta, p.beta_im))?;
    let outcome = match p.outcome.as_deref() {
        None => None,
        Some("00") => Some((0, 0)),
        Some("01") => Some((0, 1)),
        Some("10") => Some((1, 0)),
        Some("11") => Some((1, 1)),
        Some(other) => return Err(validation(format!("outcome must be one of 00, 01, 10, 11; got {other:?}"))),
    };
    let record = teleport_with_measurement(&input, outcome, seed)?;
    Ok(Output::Record(serde_json::to_value(record).expect("plain data")))
}

pub fn dot_params(p: &NmrParams) -> DotParams {
    DotParams {
        effective_mass: p.mstar * ELECTRON_MASS,
        omega0: p.hbar_omega0_mev * JOULE_PER_MEV / HBAR,
        interaction_ratio: p.ratio,
        hyperfine_scale: p.c_over_l0sq_mhz * 1e6,
        gyro_e: p.g * BOHR_MAGNETON / HBAR,
        gyro_n: std::f64::consts::TAU * p.gamma_n_mhz_per_t * 1e6,
        g_factor: p.g,
        zeeman: p.zeeman.is_on(),
        coupling_reduction: p.coupling_reduction,
    }
}

fn nmr_sweep(p: &NmrParams) -> Result<Output, CliError> {
    let dot = dot_params(p);
    dot.validate()?;
    let fields = sweep_fields(p.bmin, p.bmax, p.steps)?;
    let points = fields.par_iter().map(|&b| nmr_point(b, &dot, p.ir.is_on())).collect::<Result<Vec<_>, _>>()?;
    let rows = points
        .iter()
        .map(|pt| {
            vec![
                Cell::Real(pt.b_field),
                Cell::Real(pt.freq_ratio),
                Cell::Int(i64::from(pt.ground.m)),
                Cell::Int(i64::from(pt.ground.spin_s)),
                Cell::Real(pt.a_m / 1e6),
                Cell::Real(pt.omega_nmr / 1e6),
                Cell::Real(pt.relative_shift),
            ]
        })
        .collect();
    Ok(Output::Table(Table {
        columns: vec!["B_T", "wc_over_w0", "m", "S", "A_m_MHz", "omega_nmr_MHz", "rel_shift"],
        rows,
    }))
}

fn vinter(p: &VinterParams) -> Result<Output, CliError> {
    for (name, v) in [("alpha", p.alpha), ("radius", p.radius), ("dmin", p.dmin), ("dmax", p.dmax)] {
        finite(name, v)?;
    }
    if !(p.radius >= 0.0 && p.dmin > 2.0 * p.radius && p.dmax > p.dmin) {
        return Err(validation("need radius >= 0, dmin > 2*radius and dmax > dmin"));
    }
    if p.steps < 2 {
        return Err(validation("steps must be at least 2"));
    }
    let r = p.radius;
    let dot = [[-r, 0.0], [r, 0.0]];
    let rows = (0..p.steps)
        .map(|k| {
            let d = p.dmin + (p.dmax - p.dmin) * k as f64 / (p.steps - 1) as f64;
            let stacked = v_inter_stacked(&[dot, dot], p.alpha, d)?;
            let beside = [[d - r, 0.0], [d + r, 0.0]];
            let planar = v_inter_planar(&[dot, beside], p.alpha)?;
            Ok(vec![Cell::Real(d), Cell::Real(stacked), Cell::Real(planar)])
        })
        .collect::<Result<_, CliError>>()?;
    Ok(Output::Table(Table { columns: vec!["d", "v_inter_1", "v_inter_2"], rows }))
}
