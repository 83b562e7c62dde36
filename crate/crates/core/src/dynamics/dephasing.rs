use serde::{Deserialize, Serialize};

use crate::algebra::{collective_ops, OperatorMatrix};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, hermitian_norm, max_abs_diff, CMatrix, I};

use super::state::StateRepr;
use super::trajectory::{check_times, Trajectory};
use super::unitary::check_subspace;
use super::QuantumState;

/// Parameters of the bath spectral density behind the dephasing rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    pub exponent_n: u32,
    pub cutoff: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DephasingSpec {
    pub gamma: f64,
    pub spectral: Option<SpectralParams>,
}

impl DephasingSpec {
    pub fn rate(gamma: f64) -> Self {
        DephasingSpec { gamma, spectral: None }
    }
}

/// Largest allowed step as a fraction of the fastest time scale.
const STEP_FRACTION: f64 = 1.0 / 50.0;
/// Maximum change of ρ between a step and its halved version, per output interval.
const CONSISTENCY_TOL: f64 = 1e-10;
const MAX_SUBSTEPS: usize = 1 << 22;

struct Generator {
    h: CMatrix,
    jz: CMatrix,
    jz2: CMatrix,
    gamma: f64,
}

impl Generator {
    /// −i[H,ρ] − Γ(Jz²ρ + ρJz² − 2JzρJz)
    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let unitary = (&self.h * rho - rho * &self.h) * (-I);
        if self.gamma == 0.0 {
            return unitary;
        }
        let deph = &self.jz2 * rho + rho * &self.jz2 - (&self.jz * rho * &self.jz) * c(2.0);
        unitary - deph * c(self.gamma)
    }

    fn rk4(&self, rho: &CMatrix, dt: f64, steps: usize) -> CMatrix {
        let mut r = rho.clone();
        let h = c(dt);
        let half = c(dt / 2.0);
        for _ in 0..steps {
            let k1 = self.apply(&r);
            let k2 = self.apply(&(&r + &k1 * half));
            let k3 = self.apply(&(&r + &k2 * half));
            let k4 = self.apply(&(&r + &k3 * h));
            r += (k1 + (k2 + k3) * c(2.0) + k4) * (h / 6.0);
        }
        (&r + r.adjoint()) * c(0.5)
    }
}

/// Integrates the pure-dephasing master equation with collapse operator Jz.
///
/// Uses classical RK4 with a step no larger than 1/50 of min(2π/‖H‖, 1/Γ).
/// Each output interval is integrated twice, with n and 2n substeps, and n
/// doubles until the two agree to within 1e-10 entrywise.
pub fn evolve_dephasing(
    h: &OperatorMatrix,
    spec: &DephasingSpec,
    initial: &QuantumState,
    times: &[f64],
) -> Result<Trajectory> {
    check_subspace(h, initial)?;
    check_times(times)?;
    if !(spec.gamma >= 0.0 && spec.gamma.is_finite()) {
        return Err(invalid("gamma", "must be non-negative"));
    }
    if times.first().is_some_and(|&t| t < 0.0) {
        return Err(invalid("times", "must start at or after 0"));
    }
    let ops = collective_ops(initial.subspace());
    let jz = ops.jz.into_entries();
    let gen = Generator { h: h.entries().clone(), jz2: &jz * &jz, jz, gamma: spec.gamma };

    let norm = hermitian_norm(&gen.h);
    let mut h_max = f64::INFINITY;
    if norm > 0.0 {
        h_max = h_max.min(STEP_FRACTION * std::f64::consts::TAU / norm);
    }
    if spec.gamma > 0.0 {
        h_max = h_max.min(STEP_FRACTION / spec.gamma);
    }

    let sub = initial.subspace();
    let frame = initial.frame();
    let mut rho = initial.density();
    let mut t_prev = 0.0;
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - t_prev;
        if span > 0.0 {
            rho = advance(&gen, &rho, t_prev, span, h_max)?;
        }
        t_prev = t;
        states.push(QuantumState::from_parts(sub, StateRepr::Mixed(rho.clone()), frame));
    }
    Ok(Trajectory::new(times.to_vec(), states))
}

fn advance(gen: &Generator, rho: &CMatrix, t0: f64, span: f64, h_max: f64) -> Result<CMatrix> {
    let mut n = if h_max.is_finite() { (span / h_max).ceil().max(1.0) as usize } else { 1 };
    if n > MAX_SUBSTEPS {
        return Err(Error::Integration { time: t0, reason: format!("{n} substeps needed for one output interval") });
    }
    let mut coarse = gen.rk4(rho, span / n as f64, n);
    loop {
        let fine = gen.rk4(rho, span / (2 * n) as f64, 2 * n);
        if fine.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Integration { time: t0 + span, reason: "non-finite density matrix".into() });
        }
        if max_abs_diff(&coarse, &fine) <= CONSISTENCY_TOL {
            return Ok(fine);
        }
        n *= 2;
        if n > MAX_SUBSTEPS {
            return Err(Error::Integration { time: t0, reason: "step refinement did not converge".into() });
        }
        coarse = fine;
    }
}
