//! Three-qubit teleportation circuit on a statevector register.
//!
//! Qubit 0 (a) carries the input, qubits 1 (b) and 2 (c) start in |0⟩ and
//! become the shared pair. Registers are big-endian: qubit 0 is the most
//! significant bit of the basis index.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, unitarity_error, CMatrix, CVector, C64};

pub const NORM_TOL: f64 = 1e-12;

const A: usize = 0;
const B: usize = 1;
const C: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "QubitStateRepr", into = "QubitStateRepr")]
pub struct QubitState {
    alpha: C64,
    beta: C64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct QubitStateRepr {
    alpha: [f64; 2],
    beta: [f64; 2],
}

impl From<QubitState> for QubitStateRepr {
    fn from(q: QubitState) -> Self {
        QubitStateRepr { alpha: [q.alpha.re, q.alpha.im], beta: [q.beta.re, q.beta.im] }
    }
}

impl TryFrom<QubitStateRepr> for QubitState {
    type Error = Error;
    fn try_from(r: QubitStateRepr) -> Result<Self> {
        QubitState::new(C64::new(r.alpha[0], r.alpha[1]), C64::new(r.beta[0], r.beta[1]))
    }
}

impl QubitState {
    /// α|0⟩ + β|1⟩; requires |α|² + |β|² = 1 within 1e-12.
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(invalid("input", format!("|α|² + |β|² = {norm}, expected 1")));
        }
        Ok(QubitState { alpha, beta })
    }

    /// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        QubitState { alpha: c((theta / 2.0).cos()), beta: C64::from_polar((theta / 2.0).sin(), phi) }
    }

    pub fn zero() -> Self {
        QubitState { alpha: c(1.0), beta: c(0.0) }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn vector(&self) -> CVector {
        CVector::from_vec(vec![self.alpha, self.beta])
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &QubitState) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Register {
    n_qubits: usize,
    amplitudes: CVector,
}

impl Register {
    pub fn new(n_qubits: usize, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != 1 << n_qubits {
            return Err(invalid("amplitudes", format!("need 2^{n_qubits} entries, got {}", amplitudes.len())));
        }
        let norm = amplitudes.norm_squared();
        if !((norm - 1.0).abs() <= NORM_TOL) {
            return Err(invalid("amplitudes", format!("norm² = {norm}")));
        }
        Ok(Register { n_qubits, amplitudes })
    }

    /// Tensor product of single-qubit states, first factor most significant.
    pub fn product(qubits: &[QubitState]) -> Self {
        let mut amps = CVector::from_vec(vec![c(1.0)]);
        for q in qubits {
            amps = amps.kronecker(&q.vector());
        }
        Register { n_qubits: qubits.len(), amplitudes: amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    fn bit(&self, index: usize, qubit: usize) -> usize {
        (index >> (self.n_qubits - 1 - qubit)) & 1
    }

    /// 2×2 reduced density matrix of one qubit.
    pub fn reduced_density(&self, qubit: usize) -> Result<CMatrix> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidIndex(format!("qubit {qubit} of {}", self.n_qubits)));
        }
        let mask = 1 << (self.n_qubits - 1 - qubit);
        let mut rho = CMatrix::zeros(2, 2);
        for i in 0..self.amplitudes.len() {
            let bi = self.bit(i, qubit);
            for bj in 0..2 {
                let j = if bj == bi { i } else { i ^ mask };
                rho[(bi, bj)] += self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        Ok(rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateName {
    H,
    Cnot,
    I,
    X,
    Z,
    MinusIY,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateMatrix {
    pub name: GateName,
    entries: CMatrix,
}

impl GateMatrix {
    pub fn new(name: GateName) -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let m = |rows: usize, v: &[f64]| CMatrix::from_row_iterator(rows, rows, v.iter().map(|x| c(*x)));
        let entries = match name {
            GateName::H => m(2, &[r, r, r, -r]),
            GateName::I => m(2, &[1.0, 0.0, 0.0, 1.0]),
            GateName::X => m(2, &[0.0, 1.0, 1.0, 0.0]),
            GateName::Z => m(2, &[1.0, 0.0, 0.0, -1.0]),
            // −iσ_y
            GateName::MinusIY => m(2, &[0.0, -1.0, 1.0, 0.0]),
            GateName::Cnot => m(4, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0]),
        };
        debug_assert!(unitarity_error(&entries) < 1e-12);
        GateMatrix { name, entries }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn arity(&self) -> usize {
        if self.entries.nrows() == 4 {
            2
        } else {
            1
        }
    }

    /// Correction applied to c after reading (b1, b2) on (a, b).
    pub fn correction(outcome: (u8, u8)) -> Result<Self> {
        let name = match outcome {
            (0, 0) => GateName::I,
            (0, 1) => GateName::X,
            (1, 0) => GateName::Z,
            (1, 1) => GateName::MinusIY,
            other => return Err(invalid("outcome", format!("bits must be 0 or 1, got {other:?}"))),
        };
        Ok(GateMatrix::new(name))
    }
}

/// Applies `gate` to the listed qubits; for CNOT the first target is the control.
pub fn apply_gate(reg: &Register, gate: &GateMatrix, targets: &[usize]) -> Result<Register> {
    let k = gate.arity();
    if targets.len() != k {
        return Err(invalid("targets", format!("{:?} takes {k} qubit(s), got {}", gate.name, targets.len())));
    }
    if targets.iter().any(|&q| q >= reg.n_qubits) {
        return Err(Error::InvalidIndex(format!("targets {targets:?} outside {} qubits", reg.n_qubits)));
    }
    if k == 2 && targets[0] == targets[1] {
        return Err(invalid("targets", "must be distinct"));
    }
    let masks: Vec<usize> = targets.iter().map(|&q| 1 << (reg.n_qubits - 1 - q)).collect();
    let all: usize = masks.iter().sum();
    let sub = 1 << k;
    let mut out = CVector::zeros(reg.amplitudes.len());
    for base in (0..reg.amplitudes.len()).filter(|i| i & all == 0) {
        // local index: first target is the most significant local bit
        let index_of = |local: usize| {
            masks.iter().enumerate().fold(base, |acc, (p, m)| if local >> (k - 1 - p) & 1 == 1 { acc | m } else { acc })
        };
        for row in 0..sub {
            let mut acc = c(0.0);
            for col in 0..sub {
                acc += gate.entries[(row, col)] * reg.amplitudes[index_of(col)];
            }
            out[index_of(row)] = acc;
        }
    }
    Ok(Register { n_qubits: reg.n_qubits, amplitudes: out })
}

/// Shared-pair preparation plus the rotation of the Bell basis of (a, b)
/// onto the computational basis.
fn pre_measurement(input: &QubitState) -> Register {
    let (h, cnot) = (GateMatrix::new(GateName::H), GateMatrix::new(GateName::Cnot));
    let mut reg = Register::product(&[*input, QubitState::zero(), QubitState::zero()]);
    for (gate, targets) in [(&h, &[B][..]), (&cnot, &[B, C][..]), (&cnot, &[A, B][..]), (&h, &[A][..])] {
        reg = apply_gate(&reg, gate, targets).expect("fixed circuit is well formed");
    }
    reg
}

/// Full circuit with the corrections applied coherently: X on c controlled
/// by b, then Z on c controlled by a. Output is |+⟩_a |+⟩_b |Ψ⟩_c.
pub fn teleport_full_circuit(input: &QubitState) -> Register {
    let (h, cnot) = (GateMatrix::new(GateName::H), GateMatrix::new(GateName::Cnot));
    let mut reg = pre_measurement(input);
    // controlled-Z(a, c) = H_c · CNOT(a, c) · H_c
    for (gate, targets) in [(&cnot, &[B, C][..]), (&h, &[C][..]), (&cnot, &[A, C][..]), (&h, &[C][..])] {
        reg = apply_gate(&reg, gate, targets).expect("fixed circuit is well formed");
    }
    reg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeleportRecord {
    pub outcome_bits: (u8, u8),
    pub probability: f64,
    /// Probabilities of the outcomes 00, 01, 10, 11.
    pub outcome_probabilities: [f64; 4],
    pub correction: GateName,
    pub corrected_state: QubitState,
    /// Phase e^{iχ} with corrected = e^{iχ}·input; −1 for outcome 11.
    pub global_phase: [f64; 2],
    pub fidelity: f64,
}

/// Measures (a, b) after the rotation, applies the conditional correction
/// to c, and reports the fidelity with the input. Without a forced outcome
/// the bits are sampled from a ChaCha8 stream seeded with `seed`.
pub fn teleport_with_measurement(input: &QubitState, outcome: Option<(u8, u8)>, seed: u64) -> Result<TeleportRecord> {
    if let Some(o) = outcome {
        GateMatrix::correction(o)?;
    }
    let reg = pre_measurement(input);
    let amps = reg.amplitudes();
    let probs: [f64; 4] = std::array::from_fn(|m| amps[2 * m].norm_sqr() + amps[2 * m + 1].norm_sqr());
    let bits = match outcome {
        Some(o) => o,
        None => {
            let u: f64 = ChaCha8Rng::seed_from_u64(seed).gen();
            let mut acc = 0.0;
            let mut pick = 3;
            for (m, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = m;
                    break;
                }
            }
            ((pick >> 1) as u8, (pick & 1) as u8)
        }
    };
    let m = usize::from(bits.0) * 2 + usize::from(bits.1);
    let p = probs[m];
    if !(p > 0.0) {
        return Err(Error::InvalidParameter { name: "outcome", reason: format!("outcome {bits:?} has probability 0") });
    }
    let scale = c(1.0 / p.sqrt());
    let branch = CVector::from_vec(vec![amps[2 * m] * scale, amps[2 * m + 1] * scale]);
    let gate = GateMatrix::correction(bits)?;
    let fixed = gate.entries() * branch;
    let corrected = QubitState::new(fixed[0], fixed[1])?;
    let inner = input.alpha.conj() * corrected.alpha + input.beta.conj() * corrected.beta;
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { c(1.0) };
    Ok(TeleportRecord {
        outcome_bits: bits,
        probability: p,
        outcome_probabilities: probs,
        correction: gate.name,
        corrected_state: corrected,
        global_phase: [phase.re, phase.im],
        fidelity: inner.norm_sqr().min(1.0),
    })
}

/// Number of sequential pulses that fit in one dephasing time.
pub fn operation_budget(pulse_time: f64, dephasing_time: f64) -> Result<f64> {
    if !(pulse_time > 0.0 && pulse_time.is_finite()) {
        return Err(invalid("pulse_time", "must be positive"));
    }
    if !(dephasing_time > 0.0 && dephasing_time.is_finite()) {
        return Err(invalid("dephasing_time", "must be positive"));
    }
    Ok(dephasing_time / pulse_time)
}
