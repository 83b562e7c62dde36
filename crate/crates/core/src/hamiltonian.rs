//! Rotating-frame exciton Hamiltonians for two and three driven dots.

use serde::{Deserialize, Serialize};

use crate::algebra::{build_subspace, collective_ops, DickeSubspace, HalfInt, OperatorMatrix, Space};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, cis, CMatrix, C64};

/// Overall sign of the drive and Förster terms.
///
/// `Wavefunction`: H = Δ Jz + a(J₊+J₋) + W(J²−Jz²).
/// `DensityMatrix`: H = Δ Jz − a(J₊+J₋) − W(J²−Jz²).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    Wavefunction,
    #[default]
    DensityMatrix,
}

impl SignConvention {
    fn sign(self) -> f64 {
        match self {
            SignConvention::Wavefunction => 1.0,
            SignConvention::DensityMatrix => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SignConvention::Wavefunction => "wavefunction",
            SignConvention::DensityMatrix => "density-matrix",
        }
    }
}

/// How the laser amplitude enters the rotating-frame coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseShape {
    /// ξ(t) = A e^{-iωt}: coupling A.
    RwaConstant,
    /// ξ(t) = A cos(ωt): coupling A/2 after dropping counter-rotating terms.
    #[default]
    Cosine,
}

impl PulseShape {
    pub fn coupling(self, amplitude: f64) -> f64 {
        match self {
            PulseShape::RwaConstant => amplitude,
            PulseShape::Cosine => amplitude / 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PulseShape::RwaConstant => "rwa-constant",
            PulseShape::Cosine => "cosine",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcitonSystemParams {
    pub n_dots: u32,
    /// Band gap; the unit of energy.
    pub epsilon: f64,
    pub forster_w: f64,
    pub sign_convention: SignConvention,
}

impl ExcitonSystemParams {
    pub fn new(n_dots: u32, forster_w: f64, sign_convention: SignConvention) -> Self {
        ExcitonSystemParams { n_dots, epsilon: 1.0, forster_w, sign_convention }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be positive"));
        }
        // W = 0 is allowed so the non-interacting limit can be simulated.
        if !(self.forster_w >= 0.0 && self.forster_w.is_finite()) {
            return Err(invalid("forster_w", "must be non-negative"));
        }
        active_subspace(self.n_dots).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub amplitude: f64,
    pub carrier_freq: f64,
    /// Δ_ω = ε − ω.
    pub detuning: f64,
    pub phase_target: f64,
    pub shape: PulseShape,
    pub duration: f64,
}

impl DriveSpec {
    /// Resonant drive (ω = ε = 1) of the given amplitude and shape.
    pub fn resonant(amplitude: f64, shape: PulseShape) -> Self {
        DriveSpec { amplitude, carrier_freq: 1.0, detuning: 0.0, phase_target: 0.0, shape, duration: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("amplitude", "must be non-negative"));
        }
        if !(self.duration >= 0.0) {
            return Err(invalid("duration", "must be non-negative"));
        }
        if !self.detuning.is_finite() || !self.carrier_freq.is_finite() {
            return Err(invalid("detuning", "must be finite"));
        }
        Ok(())
    }
}

/// The optically active subspace: J = N/2.
pub fn active_subspace(n_dots: u32) -> Result<DickeSubspace> {
    match n_dots {
        2 | 3 => build_subspace(n_dots, HalfInt::from_doubled(n_dots as i32)),
        other => Err(Error::UnsupportedDots(other)),
    }
}

/// Δ_ω M ± W[J(J+1) − M²], with the Förster sign set by the convention.
pub fn bare_energy(params: &ExcitonSystemParams, detuning: f64, j: HalfInt, m: HalfInt) -> Result<f64> {
    let sub = build_subspace(params.n_dots, j)?;
    sub.index_of(m)?;
    let (jv, mv) = (j.value(), m.value());
    Ok(detuning * mv + params.sign_convention.sign() * params.forster_w * (jv * (jv + 1.0) - mv * mv))
}

pub fn build_hamiltonian(params: &ExcitonSystemParams, drive: &DriveSpec) -> Result<OperatorMatrix> {
    params.validate()?;
    drive.validate()?;
    let sub = active_subspace(params.n_dots)?;
    let ops = collective_ops(sub);
    let s = params.sign_convention.sign();
    let a = drive.shape.coupling(drive.amplitude);
    let jz = ops.jz.entries();
    let h = jz * c(drive.detuning)
        + (ops.jplus.entries() + ops.jminus.entries()) * c(s * a)
        + (ops.j2.entries() - jz * jz) * c(s * params.forster_w);
    let h = (&h + h.adjoint()) * c(0.5);
    OperatorMatrix::new(sub, h)
}

/// Closed-form eigenvalues at resonance for a drive coupling of `amplitude`
/// (the coefficient of J₊+J₋), sorted ascending.
pub fn resonant_spectrum(params: &ExcitonSystemParams, amplitude: f64) -> Result<Vec<f64>> {
    params.validate()?;
    let w = params.forster_w;
    let a = amplitude.abs();
    let mut e = match params.n_dots {
        2 => {
            let root = (16.0 * a * a + w * w).sqrt();
            vec![w, 0.5 * (3.0 * w + root), 0.5 * (3.0 * w - root)]
        }
        3 => {
            let up = ((w + a).powi(2) + 3.0 * a * a).sqrt();
            let down = ((w - a).powi(2) + 3.0 * a * a).sqrt();
            vec![2.5 * w + a + up, 2.5 * w + a - up, 2.5 * w - a + down, 2.5 * w - a - down]
        }
        other => return Err(Error::UnsupportedDots(other)),
    };
    // Flipping both the drive and Förster signs negates H at resonance.
    if params.sign_convention == SignConvention::DensityMatrix {
        e.iter_mut().for_each(|v| *v = -*v);
    }
    e.sort_by(f64::total_cmp);
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Lab,
    #[default]
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToLab,
    ToRotating,
}

/// Diagonal of Λ(t) = exp(−iωJz t), or of its inverse.
pub fn frame_phases(sub: DickeSubspace, carrier_freq: f64, t: f64, direction: Direction) -> Vec<C64> {
    let sign = match direction {
        Direction::ToLab => -1.0,
        Direction::ToRotating => 1.0,
    };
    sub.labels().into_iter().map(|m| cis(sign * carrier_freq * m * t)).collect()
}

/// Objects that can be moved between the lab and rotating frames.
pub trait FrameTransform: Sized {
    fn transform_frame(&self, carrier_freq: f64, t: f64, direction: Direction) -> Result<Self>;
}

pub(crate) fn conjugate_diagonal(m: &CMatrix, phases: &[C64]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, s| phases[r] * m[(r, s)] * phases[s].conj())
}

impl FrameTransform for OperatorMatrix {
    fn transform_frame(&self, carrier_freq: f64, t: f64, direction: Direction) -> Result<Self> {
        let Space::Dicke(sub) = self.space() else {
            return Err(Error::SubspaceMismatch("frame change needs a Dicke subspace".into()));
        };
        let phases = frame_phases(sub, carrier_freq, t, direction);
        OperatorMatrix::new(sub, conjugate_diagonal(self.entries(), &phases))
    }
}

/// Applies Λ(t) (states) or conjugates by it (operators).
pub fn rotating_frame<T: FrameTransform>(x: &T, carrier_freq: f64, t: f64, direction: Direction) -> Result<T> {
    x.transform_frame(carrier_freq, t, direction)
}
