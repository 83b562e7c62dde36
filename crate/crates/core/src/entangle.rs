//! Entangled target states, small-drive analytic trajectories, analytic
//! pulse lengths, and peak finding for pulse calibration.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    evolve_dephasing, evolve_unitary, overlap, pair_overlap, DephasingSpec, QuantumState, StateRepr, Trajectory,
};
use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{
    active_subspace, build_hamiltonian, Direction, DriveSpec, ExcitonSystemParams, Frame, PulseShape,
};
use crate::linalg::{c, cis, CMatrix, CVector, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    /// (|0⟩ + e^{−iφ}|2⟩)/√2 in the two-dot subspace.
    Bell,
    /// (|0⟩ + e^{iφ}|3⟩)/√2 in the three-dot subspace.
    Ghz,
    /// (|1⟩ + e^{iφ}|2⟩)/√2 in the three-dot subspace.
    Ghz2,
}

impl TargetKind {
    pub fn n_dots(self) -> u32 {
        match self {
            TargetKind::Bell => 2,
            TargetKind::Ghz | TargetKind::Ghz2 => 3,
        }
    }

    /// The two basis levels the target superposes.
    pub fn levels(self) -> (usize, usize) {
        match self {
            TargetKind::Bell => (0, 2),
            TargetKind::Ghz => (0, 3),
            TargetKind::Ghz2 => (1, 2),
        }
    }

    /// Relative phase θ(φ) of the second level: v = (|a⟩ + e^{iθ}|b⟩)/√2.
    ///
    /// The Bell target carries e^{−iφ}: its pseudo-spin expansion has
    /// +cos φ Jx − sin φ Jy on the 0-2 transition, and at φ = π/2 that is
    /// exactly the state the resonant drive produces.
    pub fn relative_phase(self, phi: f64) -> f64 {
        match self {
            TargetKind::Bell => -phi,
            TargetKind::Ghz | TargetKind::Ghz2 => phi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TargetKind::Bell => "bell",
            TargetKind::Ghz => "ghz",
            TargetKind::Ghz2 => "ghz2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntangledTarget {
    pub kind: TargetKind,
    pub phi: f64,
    state: QuantumState,
}

impl EntangledTarget {
    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn rho(&self) -> CMatrix {
        self.state.density()
    }

    pub fn overlap(&self, state: &QuantumState) -> Result<f64> {
        overlap(state, &self.state)
    }
}

pub fn target(kind: TargetKind, phi: f64) -> EntangledTarget {
    let sub = active_subspace(kind.n_dots()).expect("2 and 3 dots are supported");
    let (a, b) = kind.levels();
    let mut v = CVector::zeros(sub.dim());
    v[a] = c(std::f64::consts::FRAC_1_SQRT_2);
    v[b] = cis(kind.relative_phase(phi)) * std::f64::consts::FRAC_1_SQRT_2;
    let state = QuantumState::pure(sub, v).expect("normalized by construction");
    EntangledTarget { kind, phi, state }
}

fn check_kind(state: &QuantumState, kind: TargetKind) -> Result<()> {
    if state.subspace() != active_subspace(kind.n_dots())? {
        return Err(Error::SubspaceMismatch(format!(
            "{} target needs the driven {}-dot subspace",
            kind.name(),
            kind.n_dots()
        )));
    }
    Ok(())
}

/// Overlap with the target at the phase that maximizes it:
/// ½(ρ_aa + ρ_bb) + |ρ_ab|. This is the envelope of the fixed-phase
/// overlap over all φ, and it is the same in the lab and rotating frames.
pub fn phase_optimized_overlap(state: &QuantumState, kind: TargetKind) -> Result<f64> {
    check_kind(state, kind)?;
    let (a, b) = kind.levels();
    Ok(0.5 * (state.population(a) + state.population(b)) + state.element(a, b).norm())
}

/// Fixed-phase target overlap at every trajectory point.
pub fn overlap_series(traj: &Trajectory, kind: TargetKind, phi: f64) -> Result<Vec<f64>> {
    let (a, b) = kind.levels();
    traj.states
        .iter()
        .map(|s| {
            check_kind(s, kind)?;
            Ok(pair_overlap(s, a, b, kind.relative_phase(phi)))
        })
        .collect()
}

pub fn envelope_series(traj: &Trajectory, kind: TargetKind) -> Result<Vec<f64>> {
    traj.states.iter().map(|s| phase_optimized_overlap(s, kind)).collect()
}

/// A driven exciton run: system, drive, starting level, dephasing rate and
/// the frame in which states are reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRun {
    pub system: ExcitonSystemParams,
    pub drive: DriveSpec,
    pub initial_level: usize,
    pub dephasing: DephasingSpec,
    pub frame: Frame,
}

impl GenerationRun {
    /// Resonant run from |0⟩ without dephasing, reported in the rotating frame.
    pub fn resonant(system: ExcitonSystemParams, amplitude: f64, shape: PulseShape) -> Self {
        GenerationRun {
            system,
            drive: DriveSpec::resonant(amplitude, shape),
            initial_level: 0,
            dephasing: DephasingSpec::default(),
            frame: Frame::Rotating,
        }
    }

    /// Exact evolution for Γ = 0, the master equation otherwise.
    pub fn simulate(&self, times: &[f64]) -> Result<Trajectory> {
        let h = build_hamiltonian(&self.system, &self.drive)?;
        let sub = active_subspace(self.system.n_dots)?;
        let initial = QuantumState::basis(sub, self.initial_level)?;
        let traj = if self.dephasing.gamma == 0.0 {
            evolve_unitary(&h, &initial, times)?
        } else {
            evolve_dephasing(&h, &self.dephasing, &initial, times)?
        };
        match self.frame {
            Frame::Rotating => Ok(traj),
            Frame::Lab => traj.transformed(self.drive.carrier_freq, Direction::ToLab),
        }
    }
}

/// Bell oscillation frequency A²/W for a cosine drive of amplitude A.
pub fn omega_bell(amplitude: f64, forster_w: f64) -> f64 {
    amplitude * amplitude / forster_w
}

/// GHZ oscillation frequency d₋ − d₊ + A with d± = W√(1 ± A/W + (A/W)²).
///
/// Evaluated in a rearranged form free of cancellation; for small A/W it
/// behaves as (3/8)A³/W² − (15/128)A⁵/W⁴.
pub fn omega_ghz(amplitude: f64, forster_w: f64) -> f64 {
    let (a, w) = (amplitude, forster_w);
    let x = a / w;
    let root_minus = (1.0 - x + x * x).sqrt();
    let root_plus = (1.0 + x + x * x).sqrt();
    let excess = w * ((-x + x * x) / (root_minus + 1.0) + (x + x * x) / (root_plus + 1.0));
    a * excess / (w * (root_minus + root_plus))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Approximation {
    pub state: QuantumState,
    /// A/W is above 0.2, where the small-drive expansion degrades.
    pub outside_validity: bool,
}

const VALIDITY_LIMIT: f64 = 0.2;
const HARD_LIMIT: f64 = 0.5;

fn check_small_drive(amplitude: f64, forster_w: f64) -> Result<bool> {
    if !(forster_w > 0.0) {
        return Err(invalid("forster_w", "analytic trajectories need W > 0"));
    }
    if !(amplitude >= 0.0) {
        return Err(invalid("amplitude", "must be non-negative"));
    }
    let ratio = amplitude / forster_w;
    if ratio > HARD_LIMIT {
        return Err(invalid("amplitude", format!("A/W = {ratio} exceeds {HARD_LIMIT}")));
    }
    Ok(ratio > VALIDITY_LIMIT)
}

fn mixed_state(n_dots: u32, rho: CMatrix) -> QuantumState {
    let sub = active_subspace(n_dots).expect("supported");
    QuantumState::from_parts(sub, StateRepr::Mixed(rho), Frame::Rotating)
}

/// Small-drive density matrix of two dots started in |0⟩ under a resonant
/// cosine drive: population swings between |0⟩ and |2⟩ at A²/W with the
/// coherence ρ₀₂ = (i/2) sin(ω t).
pub fn approx_bell_rho(t: f64, amplitude: f64, forster_w: f64) -> Result<Approximation> {
    let outside_validity = check_small_drive(amplitude, forster_w)?;
    let wt = omega_bell(amplitude, forster_w) * t;
    let (cs, sn) = (wt.cos(), wt.sin());
    let mut rho = CMatrix::zeros(3, 3);
    rho[(0, 0)] = c(0.5 + 0.5 * cs);
    rho[(2, 2)] = c(0.5 - 0.5 * cs);
    rho[(0, 2)] = I * (0.5 * sn);
    rho[(2, 0)] = -I * (0.5 * sn);
    Ok(Approximation { state: mixed_state(2, rho), outside_validity })
}

/// Small-drive density matrix of three dots started in |0⟩: population
/// swings between |0⟩ and |3⟩ at `omega_ghz` with ρ₀₃ = −(i/2) sin(ω t).
pub fn approx_ghz_rho(t: f64, amplitude: f64, forster_w: f64) -> Result<Approximation> {
    let outside_validity = check_small_drive(amplitude, forster_w)?;
    let wt = omega_ghz(amplitude, forster_w) * t;
    let (cs, sn) = (wt.cos(), wt.sin());
    let mut rho = CMatrix::zeros(4, 4);
    rho[(0, 0)] = c(0.5 + 0.5 * cs);
    rho[(3, 3)] = c(0.5 - 0.5 * cs);
    rho[(0, 3)] = -I * (0.5 * sn);
    rho[(3, 0)] = I * (0.5 * sn);
    Ok(Approximation { state: mixed_state(3, rho), outside_validity })
}

/// Analytic generation time: πW/2A² (Bell), 4πW²/3A³ (GHZ), π/4A (GHZ from |1⟩).
pub fn pulse_length(kind: TargetKind, amplitude: f64, forster_w: f64) -> Result<f64> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(invalid("amplitude", "pulse length needs A > 0"));
    }
    if !(forster_w >= 0.0 && forster_w.is_finite()) {
        return Err(invalid("forster_w", "must be non-negative"));
    }
    let pi = std::f64::consts::PI;
    Ok(match kind {
        TargetKind::Bell => pi * forster_w / (2.0 * amplitude * amplitude),
        TargetKind::Ghz => 4.0 * pi * forster_w * forster_w / (3.0 * amplitude.powi(3)),
        TargetKind::Ghz2 => pi / (4.0 * amplitude),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub time: f64,
    pub value: f64,
    /// Index of the bracketing sample with the largest value.
    pub index: usize,
}

/// First interior local maximum whose sample exceeds `threshold`, refined by
/// a parabola through the three bracketing samples. `None` if there is none.
pub fn find_first_peak(times: &[f64], values: &[f64], threshold: f64) -> Option<Peak> {
    assert_eq!(times.len(), values.len());
    (1..values.len().saturating_sub(1))
        .find(|&i| values[i] > threshold && values[i] >= values[i - 1] && values[i] > values[i + 1])
        .map(|i| refine(times, values, i))
}

/// All interior local maxima above `threshold`, in time order.
pub fn find_peaks(times: &[f64], values: &[f64], threshold: f64) -> Vec<Peak> {
    assert_eq!(times.len(), values.len());
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > threshold && values[i] >= values[i - 1] && values[i] > values[i + 1])
        .map(|i| refine(times, values, i))
        .collect()
}

fn refine(times: &[f64], values: &[f64], i: usize) -> Peak {
    let (t0, t1, t2) = (times[i - 1], times[i], times[i + 1]);
    let (v0, v1, v2) = (values[i - 1], values[i], values[i + 1]);
    let denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
    let a = (t2 * (v1 - v0) + t1 * (v0 - v2) + t0 * (v2 - v1)) / denom;
    let b = (t2 * t2 * (v0 - v1) + t1 * t1 * (v2 - v0) + t0 * t0 * (v1 - v2)) / denom;
    if !(a < 0.0) {
        return Peak { time: t1, value: v1, index: i };
    }
    let t = (-b / (2.0 * a)).clamp(t0, t2);
    // Lagrange form avoids recomputing the constant term.
    let l0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2));
    let l1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2));
    let l2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
    Peak { time: t, value: v0 * l0 + v1 * l1 + v2 * l2, index: i }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{transition_op, Axis, TransitionIndex};
    use crate::dynamics::{bell_probability, evolve_unitary, ghz_probability, time_grid, time_steps};
    use crate::hamiltonian::{
        build_hamiltonian, rotating_frame, Direction, DriveSpec, ExcitonSystemParams, PulseShape, SignConvention,
    };
    use crate::linalg::max_abs_diff;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn pseudo(n: u32, axis: Axis, r: usize, s: usize) -> CMatrix {
        transition_op(active_subspace(n).unwrap(), TransitionIndex::new(axis, r, s).unwrap()).unwrap().into_entries()
    }

    fn bell_pseudo_spin(phi: f64) -> CMatrix {
        CMatrix::identity(3, 3) * c(1.0 / 3.0) + pseudo(2, Axis::Z, 0, 1) * c(1.0 / 3.0)
            - pseudo(2, Axis::Z, 1, 2) * c(1.0 / 3.0)
            + pseudo(2, Axis::X, 0, 2) * c(phi.cos())
            - pseudo(2, Axis::Y, 0, 2) * c(phi.sin())
    }

    fn ghz_pseudo_spin(phi: f64) -> CMatrix {
        CMatrix::identity(4, 4) * c(0.25) + pseudo(3, Axis::Z, 0, 1) * c(0.5) - pseudo(3, Axis::Z, 2, 3) * c(0.5)
            + pseudo(3, Axis::X, 0, 3) * c(phi.cos())
            + pseudo(3, Axis::Y, 0, 3) * c(phi.sin())
    }

    fn exact(
        n: u32,
        a: f64,
        w: f64,
        conv: SignConvention,
        shape: PulseShape,
        init: usize,
        times: &[f64],
    ) -> Trajectory {
        let h = build_hamiltonian(&ExcitonSystemParams::new(n, w, conv), &DriveSpec::resonant(a, shape)).unwrap();
        let s0 = QuantumState::basis(active_subspace(n).unwrap(), init).unwrap();
        evolve_unitary(&h, &s0, times).unwrap()
    }

    #[test]
    fn targets_match_pseudo_spin_expansions() {
        for phi in [0.0, 0.3, FRAC_PI_2, 2.0, -1.2] {
            assert!(max_abs_diff(&target(TargetKind::Bell, phi).rho(), &bell_pseudo_spin(phi)) < 1e-15);
            assert!(max_abs_diff(&target(TargetKind::Ghz, phi).rho(), &ghz_pseudo_spin(phi)) < 1e-15);
        }
        let b0 = target(TargetKind::Bell, 0.0).rho();
        for (r, s) in [(0, 0), (2, 2), (0, 2), (2, 0)] {
            assert_abs_diff_eq!(b0[(r, s)].re, 0.5, epsilon = 1e-15);
        }
        let g2 = target(TargetKind::Ghz2, 0.7).rho();
        assert_abs_diff_eq!(g2[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g2[(2, 2)].re, 0.5, epsilon = 1e-15);
        for kind in [TargetKind::Bell, TargetKind::Ghz, TargetKind::Ghz2] {
            let t = target(kind, 1.1);
            assert_abs_diff_eq!(t.state().purity(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(t.overlap(t.state()).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn probability_formulas_equal_target_overlaps() {
        let times = time_grid(120.0, 241);
        let tb = exact(2, 0.04, 0.1, SignConvention::Wavefunction, PulseShape::RwaConstant, 0, &times);
        let tg = exact(3, 0.04, 0.1, SignConvention::Wavefunction, PulseShape::RwaConstant, 0, &times);
        for phi in [0.0, 0.9, FRAC_PI_2, 3.0] {
            let pb = bell_probability(&tb, phi).unwrap();
            let pg = ghz_probability(&tg, phi).unwrap();
            let (bt, gt) = (target(TargetKind::Bell, phi), target(TargetKind::Ghz, phi));
            for i in 0..times.len() {
                assert_abs_diff_eq!(pb[i], bt.overlap(&tb.states[i]).unwrap(), epsilon = 1e-10);
                assert_abs_diff_eq!(pb[i], bt.overlap(&tb.states[i].to_mixed()).unwrap(), epsilon = 1e-10);
                assert_abs_diff_eq!(pg[i], gt.overlap(&tg.states[i]).unwrap(), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn envelope_bounds_both_frames() {
        let times = time_steps(60.0, 0.05);
        let rot = exact(2, 0.04, 0.1, SignConvention::Wavefunction, PulseShape::RwaConstant, 0, &times);
        let lab = rot.transformed(1.0, Direction::ToLab).unwrap();
        let env = envelope_series(&rot, TargetKind::Bell).unwrap();
        let env_lab = envelope_series(&lab, TargetKind::Bell).unwrap();
        let lab0 = overlap_series(&lab, TargetKind::Bell, 0.0).unwrap();
        let rot0 = overlap_series(&rot, TargetKind::Bell, 0.0).unwrap();
        for i in 0..times.len() {
            assert_abs_diff_eq!(env[i], env_lab[i], epsilon = 1e-12);
            assert!(lab0[i] <= env[i] + 1e-9);
            assert!(rot0[i] <= env[i] + 1e-9);
        }
        // near the envelope maximum the carrier brings the lab signal up to it
        let peak = find_first_peak(&times, &env, 0.9).unwrap();
        let window = times.iter().zip(&lab0).filter(|(t, _)| (**t - peak.time).abs() <= PI / 2.0);
        let best = window.map(|(_, v)| *v).fold(0.0, f64::max);
        assert!(best > peak.value - 1e-2, "{best} vs {}", peak.value);
        // in the rotating frame the antisymmetric component is frozen, capping the φ=0 signal
        assert!(rot0.iter().all(|v| *v <= 0.5 + 1e-12));
    }

    #[test]
    fn approximations_start_in_vacuum_and_hit_targets() {
        let b0 = approx_bell_rho(0.0, 0.02, 0.1).unwrap();
        assert!(!b0.outside_validity);
        let vac = QuantumState::basis(active_subspace(2).unwrap(), 0).unwrap().density();
        assert!(max_abs_diff(&b0.state.density(), &vac) < 1e-15);
        let tau = pulse_length(TargetKind::Bell, 0.02, 0.1).unwrap();
        let bt = approx_bell_rho(tau, 0.02, 0.1).unwrap();
        assert!(max_abs_diff(&bt.state.density(), &target(TargetKind::Bell, FRAC_PI_2).rho()) < 1e-12);
        assert_abs_diff_eq!(bt.state.trace(), 1.0, epsilon = 1e-15);

        let g0 = approx_ghz_rho(0.0, 0.005, 0.1).unwrap();
        let vac3 = QuantumState::basis(active_subspace(3).unwrap(), 0).unwrap().density();
        assert!(max_abs_diff(&g0.state.density(), &vac3) < 1e-15);
        // evaluated at the quarter period of its own frequency the target is exact
        let quarter = FRAC_PI_2 / omega_ghz(0.005, 0.1);
        let gq = approx_ghz_rho(quarter, 0.005, 0.1).unwrap();
        assert!(max_abs_diff(&gq.state.density(), &target(TargetKind::Ghz, FRAC_PI_2).rho()) < 1e-12);

        assert!(approx_bell_rho(1.0, 0.03, 0.1).unwrap().outside_validity);
        assert!(approx_bell_rho(1.0, 0.06, 0.1).is_err());
    }

    // τ_GHZ uses the leading term of the GHZ frequency; the mismatch at τ_GHZ
    // shrinks as (A/W)².
    #[test]
    fn ghz_pulse_length_uses_leading_order_frequency() {
        let w = 0.1;
        let dev = |x: f64| {
            let a = x * w;
            let tau = pulse_length(TargetKind::Ghz, a, w).unwrap();
            let rho = approx_ghz_rho(tau, a, w).unwrap().state.density();
            max_abs_diff(&rho, &target(TargetKind::Ghz, FRAC_PI_2).rho())
        };
        assert!(dev(0.05) < 1e-3);
        let ratio = dev(0.05) / dev(0.025);
        assert!((ratio - 4.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn ghz_frequency_series() {
        for x in [1e-3, 3e-3, 1e-2] {
            let w = 0.1;
            let a = x * w;
            let scaled = omega_ghz(a, w) * w * w / a.powi(3);
            let series = 3.0 / 8.0 - 15.0 / 128.0 * x * x;
            assert!((scaled - series).abs() < 1e-3 * x.powi(2).max(1e-9) + 1e-10, "{scaled} vs {series}");
        }
        // the naive difference agrees where it does not cancel badly
        let (a, w): (f64, f64) = (0.04, 0.1);
        let x = a / w;
        let naive = w * (1.0 - x + x * x).sqrt() - w * (1.0 + x + x * x).sqrt() + a;
        assert_abs_diff_eq!(omega_ghz(a, w), naive, epsilon = 1e-15);
    }

    #[test]
    fn pulse_length_examples() {
        assert_abs_diff_eq!(pulse_length(TargetKind::Bell, 0.02, 0.1).unwrap(), 392.699_081_698_724_15, epsilon = 1e-9);
        assert_abs_diff_eq!(pulse_length(TargetKind::Ghz2, 0.04, 0.1).unwrap(), 19.634_954_084_936_21, epsilon = 1e-9);
        let full = pulse_length(TargetKind::Bell, 0.02, 0.1).unwrap();
        let half = pulse_length(TargetKind::Bell, 0.01, 0.1).unwrap();
        assert_abs_diff_eq!(half / full, 4.0, epsilon = 1e-12);
        assert!(pulse_length(TargetKind::Bell, 0.0, 0.1).is_err());
    }

    #[test]
    fn peak_finder() {
        let times: Vec<f64> = (0..1000).map(|i| i as f64 * 0.01).collect();
        let sin: Vec<f64> = times.iter().map(|t| t.sin()).collect();
        let p = find_first_peak(&times, &sin, 0.9).unwrap();
        assert!((p.time - FRAC_PI_2).abs() < 1e-3);
        assert_abs_diff_eq!(p.value, 1.0, epsilon = 1e-6);
        let mono: Vec<f64> = times.iter().map(|t| t * t).collect();
        assert_eq!(find_first_peak(&times, &mono, 0.0), None);
        assert_eq!(find_first_peak(&times, &sin, 1.5), None);
        assert_eq!(find_first_peak(&[], &[], 0.0), None);
    }

    #[test]
    fn bell_peak_near_analytic_pulse_length() {
        let (a, w) = (0.02, 0.1);
        let tau = pulse_length(TargetKind::Bell, a, w).unwrap();
        let times = time_grid(2.0 * tau, 2001);
        let tr = exact(2, a, w, SignConvention::DensityMatrix, PulseShape::Cosine, 0, &times);
        let o = overlap_series(&tr, TargetKind::Bell, FRAC_PI_2).unwrap();
        let p = find_first_peak(&times, &o, 0.99).unwrap();
        assert!((p.time / tau - 1.0).abs() < 0.05, "{} vs {tau}", p.time);
    }

    #[test]
    fn ghz_variants_oscillate_at_different_rates() {
        let (a, w) = (0.02, 0.1);
        let t_max = 2.5 * pulse_length(TargetKind::Ghz, a, w).unwrap();
        let times = time_grid(t_max, 40001);
        let g = exact(3, a, w, SignConvention::DensityMatrix, PulseShape::Cosine, 0, &times);
        let g2 = exact(3, a, w, SignConvention::DensityMatrix, PulseShape::Cosine, 1, &times);
        let pg = find_first_peak(&times, &envelope_series(&g, TargetKind::Ghz).unwrap(), 0.9).unwrap();
        let pg2 = find_first_peak(&times, &envelope_series(&g2, TargetKind::Ghz2).unwrap(), 0.8).unwrap();
        assert!(pg.time / pg2.time > 3.0, "{} vs {}", pg.time, pg2.time);
    }

    #[test]
    fn generation_run_dispatches_on_rate_and_frame() {
        let times = time_grid(50.0, 11);
        let system = ExcitonSystemParams::new(2, 0.1, SignConvention::DensityMatrix);
        let mut run = GenerationRun::resonant(system, 0.04, PulseShape::Cosine);
        let direct = exact(2, 0.04, 0.1, SignConvention::DensityMatrix, PulseShape::Cosine, 0, &times);
        assert_eq!(run.simulate(&times).unwrap().states, direct.states);
        run.frame = Frame::Lab;
        let lab = run.simulate(&times).unwrap();
        let expect = direct.transformed(1.0, Direction::ToLab).unwrap();
        assert_eq!(lab.states, expect.states);
        run.frame = Frame::Rotating;
        run.dephasing = DephasingSpec::rate(1e-3);
        let noisy = run.simulate(&times).unwrap();
        assert!(noisy.states.last().unwrap().purity() < 1.0 - 1e-3);
        run.initial_level = 7;
        assert!(run.simulate(&times).is_err());
    }

    #[test]
    fn rotating_target_fixed_under_frame_round_trip() {
        let t = target(TargetKind::Ghz, 0.4);
        let lab = rotating_frame(t.state(), 1.0, 3.3, Direction::ToLab).unwrap();
        let back = rotating_frame(&lab, 1.0, 3.3, Direction::ToRotating).unwrap();
        assert!(max_abs_diff(&back.density(), &t.rho()) < 1e-12);
    }

    proptest! {
        #[test]
        fn envelope_dominates_every_phase(phi in -PI..PI, t in 0.0f64..200.0) {
            let tr = exact(3, 0.04, 0.1, SignConvention::DensityMatrix, PulseShape::Cosine, 0, &[t]);
            let env = phase_optimized_overlap(&tr.states[0], TargetKind::Ghz).unwrap();
            let fixed = overlap_series(&tr, TargetKind::Ghz, phi).unwrap()[0];
            prop_assert!(fixed <= env + 1e-12);
        }
    }
}
