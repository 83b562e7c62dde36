use crate::algebra::DickeSubspace;
use crate::error::{Error, Result};
use crate::hamiltonian::{conjugate_diagonal, frame_phases, Direction, Frame, FrameTransform};
use crate::linalg::{c, hermitian_eigenvalues, hermiticity_error, outer, trace, CMatrix, CVector, C64};

pub const TRACE_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = -1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum StateRepr {
    Pure(CVector),
    Mixed(CMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    subspace: DickeSubspace,
    repr: StateRepr,
    frame: Frame,
}

impl QuantumState {
    /// The basis state |index⟩ (index 0 is M = -J).
    pub fn basis(subspace: DickeSubspace, index: usize) -> Result<Self> {
        if index >= subspace.dim() {
            return Err(Error::InvalidIndex(format!("basis index {index} >= {}", subspace.dim())));
        }
        let mut psi = CVector::zeros(subspace.dim());
        psi[index] = c(1.0);
        Ok(Self::from_parts(subspace, StateRepr::Pure(psi), Frame::Rotating))
    }

    pub fn pure(subspace: DickeSubspace, psi: CVector) -> Result<Self> {
        check_dim(subspace, psi.len())?;
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter { name: "psi", reason: format!("norm {norm} != 1") });
        }
        Ok(Self::from_parts(subspace, StateRepr::Pure(psi), Frame::Rotating))
    }

    /// Normalizes `psi` first; rejects the zero vector.
    pub fn pure_normalized(subspace: DickeSubspace, psi: CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidParameter { name: "psi", reason: "cannot normalize".into() });
        }
        Self::pure(subspace, psi.unscale(norm))
    }

    pub fn mixed(subspace: DickeSubspace, rho: CMatrix) -> Result<Self> {
        check_dim(subspace, rho.nrows())?;
        if rho.ncols() != rho.nrows() {
            return Err(Error::SubspaceMismatch("density matrix is not square".into()));
        }
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("trace {tr} != 1") });
        }
        let herm = hermiticity_error(&rho);
        if herm > 1e-12 {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("not Hermitian ({herm:e})") });
        }
        let min = hermitian_eigenvalues(&rho)[0];
        if min < POSITIVITY_TOL {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("negative eigenvalue {min:e}") });
        }
        Ok(Self::from_parts(subspace, StateRepr::Mixed(rho), Frame::Rotating))
    }

    pub(crate) fn from_parts(subspace: DickeSubspace, repr: StateRepr, frame: Frame) -> Self {
        QuantumState { subspace, repr, frame }
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn subspace(&self) -> DickeSubspace {
        self.subspace
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn repr(&self) -> &StateRepr {
        &self.repr
    }

    pub fn amplitudes(&self) -> Option<&CVector> {
        match &self.repr {
            StateRepr::Pure(psi) => Some(psi),
            StateRepr::Mixed(_) => None,
        }
    }

    pub fn density(&self) -> CMatrix {
        match &self.repr {
            StateRepr::Pure(psi) => outer(psi),
            StateRepr::Mixed(rho) => rho.clone(),
        }
    }

    /// ρ_rs without forming the full density matrix.
    pub fn element(&self, r: usize, s: usize) -> C64 {
        match &self.repr {
            StateRepr::Pure(psi) => psi[r] * psi[s].conj(),
            StateRepr::Mixed(rho) => rho[(r, s)],
        }
    }

    pub fn population(&self, index: usize) -> f64 {
        self.element(index, index).re
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.subspace.dim()).map(|i| self.population(i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.populations().iter().sum()
    }

    pub fn purity(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(psi) => psi.norm_squared().powi(2),
            StateRepr::Mixed(rho) => rho.iter().map(|z| z.norm_sqr()).sum(),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        match &self.repr {
            StateRepr::Pure(_) => {
                if self.subspace.dim() == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            StateRepr::Mixed(rho) => hermitian_eigenvalues(rho)[0],
        }
    }

    /// Tr[ρ O] for an operator given as a matrix.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        match &self.repr {
            StateRepr::Pure(psi) => (psi.adjoint() * op * psi)[(0, 0)],
            StateRepr::Mixed(rho) => trace(&(rho * op)),
        }
    }

    pub fn to_mixed(&self) -> QuantumState {
        QuantumState { subspace: self.subspace, repr: StateRepr::Mixed(self.density()), frame: self.frame }
    }
}

fn check_dim(subspace: DickeSubspace, len: usize) -> Result<()> {
    if len != subspace.dim() {
        return Err(Error::SubspaceMismatch(format!("state has dimension {len}, subspace {}", subspace.dim())));
    }
    Ok(())
}

impl FrameTransform for QuantumState {
    fn transform_frame(&self, carrier_freq: f64, t: f64, direction: Direction) -> Result<Self> {
        let phases = frame_phases(self.subspace, carrier_freq, t, direction);
        let repr = match &self.repr {
            StateRepr::Pure(psi) => StateRepr::Pure(CVector::from_fn(psi.len(), |i, _| phases[i] * psi[i])),
            StateRepr::Mixed(rho) => StateRepr::Mixed(conjugate_diagonal(rho, &phases)),
        };
        let frame = match direction {
            Direction::ToLab => Frame::Lab,
            Direction::ToRotating => Frame::Rotating,
        };
        Ok(QuantumState { subspace: self.subspace, repr, frame })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{active_subspace, rotating_frame};
    use crate::linalg::max_abs_diff;

    #[test]
    fn validation() {
        let s = active_subspace(2).unwrap();
        assert!(QuantumState::basis(s, 3).is_err());
        assert!(QuantumState::pure(s, CVector::from_element(3, c(1.0))).is_err());
        assert!(QuantumState::pure(s, CVector::from_element(2, c(1.0))).is_err());
        let ok = QuantumState::pure_normalized(s, CVector::from_element(3, c(1.0))).unwrap();
        assert!((ok.purity() - 1.0).abs() < 1e-15);
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.2), c(-0.2), c(0.0)]));
        assert!(QuantumState::mixed(s, neg).is_err());
        let half = CMatrix::identity(3, 3) * c(0.5);
        assert!(QuantumState::mixed(s, half).is_err());
        let mixed = QuantumState::mixed(s, CMatrix::identity(3, 3) * c(1.0 / 3.0)).unwrap();
        assert!((mixed.purity() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_states_are_frame_invariant() {
        let s = active_subspace(3).unwrap();
        let st = QuantumState::basis(s, 2).unwrap().to_mixed();
        let lab = rotating_frame(&st, 1.0, 3.7, Direction::ToLab).unwrap();
        assert_eq!(lab.frame(), Frame::Lab);
        assert!(max_abs_diff(&lab.density(), &st.density()) < 1e-15);
    }
}
