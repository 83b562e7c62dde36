//! Time evolution in the driven subspace: exact unitary evolution through
//! the eigenbasis, and pure dephasing through a master equation.

mod bath;
mod dephasing;
mod state;
mod trajectory;
mod unitary;

pub use bath::{gamma_from_spectrum, spectral_integral};
pub use dephasing::{evolve_dephasing, DephasingSpec, SpectralParams};
pub use state::{QuantumState, StateRepr};
pub use trajectory::{time_grid, time_steps, Trajectory};
pub use unitary::{evolve_unitary, SpectralDecomposition};

use crate::error::{Error, Result};
use crate::linalg::{cis, trace};

/// Tr[ρ_target ρ].
pub fn overlap(state: &QuantumState, target: &QuantumState) -> Result<f64> {
    if state.subspace() != target.subspace() {
        return Err(Error::SubspaceMismatch("overlap between different subspaces".into()));
    }
    Ok(match (state.amplitudes(), target.amplitudes()) {
        (Some(a), Some(b)) => b.dotc(a).norm_sqr(),
        _ => trace(&(target.density() * state.density())).re,
    })
}

/// ⟨v|ρ|v⟩ for v = (|a⟩ + e^{iθ}|b⟩)/√2.
pub(crate) fn pair_overlap(state: &QuantumState, a: usize, b: usize, theta: f64) -> f64 {
    match state.amplitudes() {
        Some(psi) => 0.5 * (psi[a] + cis(-theta) * psi[b]).norm_sqr(),
        None => 0.5 * (state.population(a) + state.population(b)) + (cis(theta) * state.element(a, b)).re,
    }
}

fn check_levels(traj: &Trajectory, n_dots: u32, what: &str) -> Result<()> {
    match traj.states.first() {
        Some(s) if s.subspace().n_dots() != n_dots || s.subspace().dim() != n_dots as usize + 1 => {
            Err(Error::SubspaceMismatch(format!("{what} needs the driven {n_dots}-dot subspace")))
        }
        _ => Ok(()),
    }
}

/// Probability of the Bell state (|0⟩ + e^{−iφ}|2⟩)/√2 along a two-dot
/// trajectory, i.e. ½|ψ₀ + e^{iφ}ψ₂|² for pure states.
pub fn bell_probability(traj: &Trajectory, phi: f64) -> Result<Vec<f64>> {
    check_levels(traj, 2, "Bell probability")?;
    Ok(traj.states.iter().map(|s| pair_overlap(s, 0, 2, -phi)).collect())
}

/// Probability of the GHZ state (|0⟩ + e^{iφ}|3⟩)/√2 along a three-dot
/// trajectory, i.e. ½|ψ₀ + e^{−iφ}ψ₃|² for pure states.
pub fn ghz_probability(traj: &Trajectory, phi: f64) -> Result<Vec<f64>> {
    check_levels(traj, 3, "GHZ probability")?;
    Ok(traj.states.iter().map(|s| pair_overlap(s, 0, 3, phi)).collect())
}
