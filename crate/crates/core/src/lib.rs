//! Models of optically driven exciton entanglement in coupled quantum dots,
//! a gate-level teleportation circuit, and a hyperfine NMR switch in a
//! two-electron dot.
//!
//! Energies and times in the exciton modules are dimensionless: the band gap
//! ε is the energy unit, ℏ = 1, and times are in units of 1/ε. See [`units`]
//! for the conversion to seconds.

// `!(x > 0.0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod dynamics;
pub mod entangle;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod nmr;
pub mod teleport;
pub mod units;

pub use algebra::{
    build_subspace, collective_ops, transition_op, Axis, CollectiveOps, DickeSubspace, HalfInt, OperatorMatrix, Space,
    TransitionIndex,
};
pub use dynamics::{
    bell_probability, evolve_dephasing, evolve_unitary, gamma_from_spectrum, ghz_probability, overlap, time_grid,
    time_steps, DephasingSpec, QuantumState, SpectralDecomposition, SpectralParams, Trajectory,
};
pub use entangle::{
    approx_bell_rho, approx_ghz_rho, envelope_series, find_first_peak, omega_bell, omega_ghz, overlap_series,
    phase_optimized_overlap, pulse_length, target, EntangledTarget, GenerationRun, Peak, TargetKind,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    active_subspace, build_hamiltonian, resonant_spectrum, rotating_frame, Direction, DriveSpec, ExcitonSystemParams,
    Frame, PulseShape, SignConvention,
};
pub use nmr::{
    delta_coupling, gating_time_bound, ground_state, nmr_frequency, nmr_point, nmr_sweep, spin_hamiltonian, DotParams,
    GroundStateBranch, NmrPoint,
};
pub use teleport::{
    apply_gate, operation_budget, teleport_full_circuit, teleport_with_measurement, GateMatrix, GateName, QubitState,
    Register, TeleportRecord,
};
pub use units::UnitContext;
