use crate::algebra::OperatorMatrix;
use crate::error::{Error, Result};
use crate::linalg::{cis, eigh, CMatrix, CVector};

use super::state::StateRepr;
use super::trajectory::{check_times, Trajectory};
use super::QuantumState;

/// Eigen-decomposition of H together with the expansion coefficients
/// C_k = ⟨ψ_k|Ψ(0)⟩ of an initial state (pure states only).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub energies: Vec<f64>,
    /// Column k is |ψ_k⟩.
    pub vectors: CMatrix,
    pub coefficients: Option<CVector>,
}

impl SpectralDecomposition {
    pub fn new(h: &OperatorMatrix, initial: Option<&QuantumState>) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::InvalidParameter { name: "h", reason: "Hamiltonian must be Hermitian".into() });
        }
        let (energies, vectors) = eigh(h.entries());
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::Eigen("non-finite eigenvalue".into()));
        }
        let coefficients = initial.and_then(|s| s.amplitudes()).map(|psi| vectors.adjoint() * psi);
        Ok(SpectralDecomposition { energies, vectors, coefficients })
    }

    /// Σ_k C_k e^{−iE_k t} |ψ_k⟩.
    pub fn amplitudes_at(&self, t: f64) -> Option<CVector> {
        let coeffs = self.coefficients.as_ref()?;
        let phased = CVector::from_fn(coeffs.len(), |k, _| coeffs[k] * cis(-self.energies[k] * t));
        Some(&self.vectors * phased)
    }

    pub fn propagator(&self, t: f64) -> CMatrix {
        let d = self.energies.len();
        let phased = CMatrix::from_fn(d, d, |r, k| self.vectors[(r, k)] * cis(-self.energies[k] * t));
        phased * self.vectors.adjoint()
    }
}

pub(crate) fn check_subspace(h: &OperatorMatrix, initial: &QuantumState) -> Result<()> {
    if h.subspace() != Some(initial.subspace()) {
        return Err(Error::SubspaceMismatch(format!(
            "Hamiltonian on {:?}, state on {:?}",
            h.space(),
            initial.subspace()
        )));
    }
    Ok(())
}

/// Exact evolution through the eigenbasis of `h`.
pub fn evolve_unitary(h: &OperatorMatrix, initial: &QuantumState, times: &[f64]) -> Result<Trajectory> {
    check_subspace(h, initial)?;
    check_times(times)?;
    let spec = SpectralDecomposition::new(h, Some(initial))?;
    let sub = initial.subspace();
    let frame = initial.frame();
    let states = match initial.repr() {
        StateRepr::Pure(_) => times
            .iter()
            .map(|&t| {
                let psi = spec.amplitudes_at(t).expect("pure initial state has coefficients");
                QuantumState::from_parts(sub, StateRepr::Pure(psi), frame)
            })
            .collect(),
        StateRepr::Mixed(rho0) => {
            let rot = spec.vectors.adjoint() * rho0 * &spec.vectors;
            times
                .iter()
                .map(|&t| {
                    let d = rot.nrows();
                    let phased =
                        CMatrix::from_fn(d, d, |r, s| rot[(r, s)] * cis(-(spec.energies[r] - spec.energies[s]) * t));
                    let rho = &spec.vectors * phased * spec.vectors.adjoint();
                    QuantumState::from_parts(sub, StateRepr::Mixed(rho), frame)
                })
                .collect()
        }
    };
    Ok(Trajectory::new(times.to_vec(), states))
}
