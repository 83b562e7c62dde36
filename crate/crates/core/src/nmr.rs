//! Two-electron dot with a ¹³C impurity: ground-state (m, S) branches versus
//! field, the resulting hyperfine coupling A(m), and the nuclear resonance
//! frequency of the triplet-sector spin Hamiltonian.
//!
//! SI units throughout, except energies of the orbital problem (meV) and
//! spin-Hamiltonian entries, which are frequencies in Hz (E/h).

use serde::{Deserialize, Serialize};

use crate::algebra::{build_subspace, collective_ops, HalfInt, OperatorMatrix};
use crate::error::{invalid, Error, Result};
use crate::linalg::{c, eigh};

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const JOULE_PER_MEV: f64 = 1.602_176_634e-22;
pub const HBAR_MEV_S: f64 = 6.582_119_569e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotParams {
    /// m* in kg.
    pub effective_mass: f64,
    /// Confinement frequency ω₀ in rad/s.
    pub omega0: f64,
    /// (α/l₀²)/(ℏω₀).
    pub interaction_ratio: f64,
    /// C/l₀² in Hz.
    pub hyperfine_scale: f64,
    /// γ_e in rad/(s·T).
    pub gyro_e: f64,
    /// γ_n in rad/(s·T).
    pub gyro_n: f64,
    pub g_factor: f64,
    /// Include the electron Zeeman energy −S·g·μ_B·B in the ground-state competition.
    pub zeeman: bool,
    /// Multiplies C; models an off-center impurity.
    pub coupling_reduction: f64,
}

impl DotParams {
    /// Silicon dot (m* = 0.19 mₑ, g = 2, ¹³C nucleus, C/l₀² = 60 MHz).
    pub fn silicon(hbar_omega0_mev: f64) -> Self {
        DotParams {
            effective_mass: 0.19 * ELECTRON_MASS,
            omega0: hbar_omega0_mev * JOULE_PER_MEV / HBAR,
            interaction_ratio: 3.0,
            hyperfine_scale: 60e6,
            gyro_e: 2.0 * BOHR_MAGNETON / HBAR,
            gyro_n: std::f64::consts::TAU * 10.705e6,
            g_factor: 2.0,
            zeeman: true,
            coupling_reduction: 1.0,
        }
    }

    pub fn hbar_omega0_mev(&self) -> f64 {
        self.omega0 * HBAR / JOULE_PER_MEV
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("effective_mass", self.effective_mass),
            ("omega0", self.omega0),
            ("hyperfine_scale", self.hyperfine_scale),
            ("gyro_e", self.gyro_e),
            ("gyro_n", self.gyro_n),
            ("g_factor", self.g_factor),
            ("coupling_reduction", self.coupling_reduction),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.interaction_ratio >= 0.0 && self.interaction_ratio.is_finite()) {
            return Err(invalid("interaction_ratio", "must be non-negative"));
        }
        Ok(())
    }

    /// B corresponding to ω_c/ω₀ = ratio.
    pub fn field_at_ratio(&self, ratio: f64) -> f64 {
        ratio * self.omega0 * self.effective_mass / ELEMENTARY_CHARGE
    }

    pub fn ratio_at_field(&self, b_field: f64) -> f64 {
        ELEMENTARY_CHARGE * b_field / (self.effective_mass * self.omega0)
    }
}

impl Default for DotParams {
    fn default() -> Self {
        DotParams::silicon(5.4)
    }
}

/// μ_m = (m² + ratio)^{1/2}.
pub fn mu(m: u32, interaction_ratio: f64) -> f64 {
    (f64::from(m).powi(2) + interaction_ratio).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequencies {
    pub omega_c: f64,
    /// √(ω_c² + 4ω₀²)
    pub omega: f64,
    /// √(ℏ/m*ω) in m.
    pub l: f64,
    pub l0: f64,
}

pub fn frequencies(b_field: f64, dot: &DotParams) -> Result<Frequencies> {
    check_field(b_field)?;
    let omega_c = ELEMENTARY_CHARGE * b_field / dot.effective_mass;
    let omega = (omega_c * omega_c + 4.0 * dot.omega0 * dot.omega0).sqrt();
    Ok(Frequencies {
        omega_c,
        omega,
        l: (HBAR / (dot.effective_mass * omega)).sqrt(),
        l0: (HBAR / (dot.effective_mass * dot.omega0)).sqrt(),
    })
}

fn check_field(b_field: f64) -> Result<()> {
    if !(b_field >= 0.0 && b_field.is_finite()) {
        return Err(invalid("b_field", format!("must be non-negative, got {b_field}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundStateBranch {
    /// Relative radial quantum number; always 0 here.
    pub n: u32,
    pub m: u32,
    pub spin_s: u8,
    pub energy_mev: f64,
}

impl GroundStateBranch {
    pub fn label(&self) -> (u32, u8) {
        (self.m, self.spin_s)
    }
}

/// Relative-motion energy of branch m at ω_c/ω₀ = ratio, in units of ℏω₀:
/// (1+μ_m)√(1 + ratio²/4) − m·ratio/2, minus the Zeeman gain when enabled.
pub fn branch_energy(m: u32, ratio: f64, dot: &DotParams) -> f64 {
    let spin = f64::from(m % 2);
    let orbital =
        (1.0 + mu(m, dot.interaction_ratio)) * (1.0 + ratio * ratio / 4.0).sqrt() - f64::from(m) * ratio / 2.0;
    // gμ_B B / ℏω₀ = g (m*/mₑ) ratio / 2
    let zeeman =
        if dot.zeeman { spin * dot.g_factor * (dot.effective_mass / ELECTRON_MASS) * ratio / 2.0 } else { 0.0 };
    orbital - zeeman
}

pub fn ground_state_at_ratio(ratio: f64, dot: &DotParams) -> Result<GroundStateBranch> {
    dot.validate()?;
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(invalid("ratio", "must be non-negative"));
    }
    // the optimal m grows roughly like ratio·√(interaction_ratio)/2
    let m_max = 30 + (ratio * (1.0 + dot.interaction_ratio.sqrt())).ceil() as u32;
    let mut best = (0, branch_energy(0, ratio, dot));
    for m in 1..=m_max {
        let e = branch_energy(m, ratio, dot);
        // strict: ties keep the lower m
        if e < best.1 {
            best = (m, e);
        }
    }
    Ok(GroundStateBranch { n: 0, m: best.0, spin_s: (best.0 % 2) as u8, energy_mev: best.1 * dot.hbar_omega0_mev() })
}

pub fn ground_state(b_field: f64, dot: &DotParams) -> Result<GroundStateBranch> {
    check_field(b_field)?;
    ground_state_at_ratio(dot.ratio_at_field(b_field), dot)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub ratio: f64,
    pub b_field: f64,
    pub from: (u32, u8),
    pub to: (u32, u8),
}

/// Ground-state label changes for ω_c/ω₀ in [0, ratio_max], located by
/// bisection after a scan with step 1e-3.
pub fn ground_state_transitions(ratio_max: f64, dot: &DotParams) -> Result<Vec<Transition>> {
    if !(ratio_max > 0.0 && ratio_max.is_finite()) {
        return Err(invalid("ratio_max", "must be positive"));
    }
    let steps = (ratio_max / 1e-3).ceil() as usize;
    let at = |k: usize| ratio_max * k as f64 / steps as f64;
    let mut out = Vec::new();
    let mut prev = ground_state_at_ratio(0.0, dot)?.label();
    for k in 1..=steps {
        let label = ground_state_at_ratio(at(k), dot)?.label();
        if label == prev {
            continue;
        }
        let (mut lo, mut hi) = (at(k - 1), at(k));
        while hi - lo > 1e-13 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if ground_state_at_ratio(mid, dot)?.label() == prev {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let to = ground_state_at_ratio(hi, dot)?.label();
        out.push(Transition { ratio: hi, b_field: dot.field_at_ratio(hi), from: prev, to });
        prev = to;
        if to != label {
            // two crossings inside one scan step; resume from the new label
            out.push(Transition { ratio: at(k), b_field: dot.field_at_ratio(at(k)), from: to, to: label });
            prev = label;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// Δ(m) = 1/(π l² 2^{1+μ_m}) in 1/m², times (1+μ_m)/2 under IR.
    pub delta_m: f64,
    /// A(m) = ½·C·Δ(m) in Hz.
    pub a_m_hz: f64,
}

/// Effective hyperfine coupling of branch m. With `ir_active` the relative
/// wavefunction is mixed with the first excited center-of-mass state, which
/// rescales Δ(m) by (1+μ_m)/2.
pub fn delta_coupling(m: u32, b_field: f64, dot: &DotParams, ir_active: bool) -> Result<Coupling> {
    dot.validate()?;
    let f = frequencies(b_field, dot)?;
    let mu_m = mu(m, dot.interaction_ratio);
    let ir = if ir_active { (1.0 + mu_m) / 2.0 } else { 1.0 };
    let decay = (-(1.0 + mu_m) * std::f64::consts::LN_2).exp();
    let delta_m = ir * decay / (std::f64::consts::PI * f.l * f.l);
    // C = (C/l₀²)·l₀², and l₀²/l² = ω/ω₀
    let a_m_hz =
        ir * 0.5 * dot.coupling_reduction * dot.hyperfine_scale * (f.omega / dot.omega0) * decay / std::f64::consts::PI;
    Ok(Coupling { delta_m, a_m_hz })
}

/// Index of |S_z; I_z⟩ in the 6-dimensional triplet ⊗ nuclear basis.
pub fn spin_index(s_z: i32, i_z_doubled: i32) -> usize {
    ((s_z + 1) * 2 + (i_z_doubled + 1) / 2) as usize
}

/// A[(I₊S₋ + I₋S₊) + 2 I_z S_z] − ν_n I_z + ν_e S_z with ν = γB/2π, in Hz.
/// Basis ordered (S_z, I_z) lexicographically, both ascending.
pub fn spin_hamiltonian(a_m_hz: f64, b_field: f64, dot: &DotParams) -> Result<OperatorMatrix> {
    check_field(b_field)?;
    if !a_m_hz.is_finite() {
        return Err(invalid("a_m", "must be finite"));
    }
    let electron = collective_ops(build_subspace(2, HalfInt::integer(1))?);
    let nucleus = collective_ops(build_subspace(1, HalfInt::from_doubled(1))?);
    let e_id = OperatorMatrix::identity(electron.jz.space());
    let n_id = OperatorMatrix::identity(nucleus.jz.space());
    let flip_flop = electron.jminus.kron(&nucleus.jplus)?.plus(&electron.jplus.kron(&nucleus.jminus)?)?;
    let static_part = electron.jz.kron(&nucleus.jz)?.scaled(c(2.0));
    let nu_n = dot.gyro_n * b_field / std::f64::consts::TAU;
    let nu_e = dot.gyro_e * b_field / std::f64::consts::TAU;
    flip_flop
        .plus(&static_part)?
        .scaled(c(a_m_hz))
        .minus(&e_id.kron(&nucleus.jz)?.scaled(c(nu_n)))?
        .plus(&electron.jz.kron(&n_id)?.scaled(c(nu_e)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmrFrequency {
    /// Closed form for the |S_z=−1, I_z=−½⟩ ↔ lower mixed-state transition, Hz.
    pub closed_form: f64,
    /// Same transition from the 6×6 eigen-decomposition, Hz.
    pub diagonalized: f64,
    /// ν_n + 2A.
    pub approximation: f64,
}

/// Nuclear resonance frequency. Singlet branches are uncoupled and return
/// the bare ν_n = γ_nB/2π in every field.
pub fn nmr_frequency(a_m_hz: f64, b_field: f64, dot: &DotParams, spin_s: u8) -> Result<NmrFrequency> {
    check_field(b_field)?;
    let nu_n = dot.gyro_n * b_field / std::f64::consts::TAU;
    match spin_s {
        0 => return Ok(NmrFrequency { closed_form: nu_n, diagonalized: nu_n, approximation: nu_n }),
        1 => {}
        s => return Err(invalid("spin_s", format!("must be 0 or 1, got {s}"))),
    }
    let closed_form = nu_n + nmr_excess(a_m_hz, b_field, dot);
    let diagonalized = nmr_frequency_diagonalized(a_m_hz, b_field, dot)?;
    Ok(NmrFrequency { closed_form, diagonalized, approximation: nu_n + 2.0 * a_m_hz })
}

/// ω_NMR − ν_n from
/// (3/2)A + ½(ν_n − ν_e) + ½√((A + ν_n + ν_e)² + 8A²),
/// rearranged as 2A + 4A²/(√(X² + 8A²) + X) with X = A + ν_n + ν_e so that
/// the large electron term cancels analytically.
fn nmr_excess(a: f64, b_field: f64, dot: &DotParams) -> f64 {
    let x = a + (dot.gyro_n + dot.gyro_e) * b_field / std::f64::consts::TAU;
    let root = (x * x + 8.0 * a * a).sqrt();
    if x > 0.0 {
        2.0 * a + 4.0 * a * a / (root + x)
    } else {
        2.0 * a - 0.5 * x + 0.5 * root
    }
}

fn nmr_frequency_diagonalized(a_m_hz: f64, b_field: f64, dot: &DotParams) -> Result<f64> {
    let h = spin_hamiltonian(a_m_hz, b_field, dot)?;
    let (energies, vectors) = eigh(h.entries());
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::Eigen("non-finite spin-Hamiltonian eigenvalue".into()));
    }
    let pick = |basis: usize| {
        (0..energies.len())
            .max_by(|&p, &q| vectors[(basis, p)].norm_sqr().total_cmp(&vectors[(basis, q)].norm_sqr()))
            .expect("non-empty spectrum")
    };
    let upper = pick(spin_index(-1, -1));
    let lower = pick(spin_index(-1, 1));
    if upper == lower {
        return Err(Error::Eigen("could not separate the resonance pair".into()));
    }
    Ok(energies[upper] - energies[lower])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NmrPoint {
    pub b_field: f64,
    pub freq_ratio: f64,
    pub ground: GroundStateBranch,
    pub delta_m: f64,
    /// Hz; zero on singlet branches.
    pub a_m: f64,
    /// Closed-form resonance frequency, Hz.
    pub omega_nmr: f64,
    pub omega_nmr_diagonalized: f64,
    pub relative_shift: f64,
    pub ir_active: bool,
}

pub fn nmr_point(b_field: f64, dot: &DotParams, ir_active: bool) -> Result<NmrPoint> {
    if !(b_field > 0.0 && b_field.is_finite()) {
        return Err(invalid("b_field", format!("must be positive, got {b_field}")));
    }
    let ground = ground_state(b_field, dot)?;
    let coupling = delta_coupling(ground.m, b_field, dot, ir_active)?;
    let a_m = if ground.spin_s == 1 { coupling.a_m_hz } else { 0.0 };
    let freq = nmr_frequency(a_m, b_field, dot, ground.spin_s)?;
    let nu_n = dot.gyro_n * b_field / std::f64::consts::TAU;
    let relative_shift = if ground.spin_s == 1 { nmr_excess(a_m, b_field, dot) / nu_n } else { 0.0 };
    Ok(NmrPoint {
        b_field,
        freq_ratio: dot.ratio_at_field(b_field),
        ground,
        delta_m: coupling.delta_m,
        a_m,
        omega_nmr: freq.closed_form,
        omega_nmr_diagonalized: freq.diagonalized,
        relative_shift,
        ir_active,
    })
}

/// `steps` evenly spaced fields on [b_min, b_max].
pub fn sweep_fields(b_min: f64, b_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(b_min > 0.0 && b_max > b_min && b_max.is_finite()) {
        return Err(invalid("b_range", format!("need 0 < b_min < b_max, got [{b_min}, {b_max}]")));
    }
    if steps < 2 {
        return Err(invalid("steps", "need at least 2"));
    }
    Ok((0..steps).map(|k| b_min + (b_max - b_min) * k as f64 / (steps - 1) as f64).collect())
}

pub fn nmr_sweep(b_min: f64, b_max: f64, steps: usize, dot: &DotParams, ir_active: bool) -> Result<Vec<NmrPoint>> {
    sweep_fields(b_min, b_max, steps)?.into_iter().map(|b| nmr_point(b, dot, ir_active)).collect()
}

/// Adiabatic lower bound ℏ/ΔE on the gating time, ΔE in meV, result in s.
pub fn gating_time_bound(delta_e_mev: f64) -> Result<f64> {
    if !(delta_e_mev > 0.0 && delta_e_mev.is_finite()) {
        return Err(invalid("delta_e", "must be positive"));
    }
    Ok(HBAR_MEV_S / delta_e_mev)
}

/// In-plane positions of the two electrons of one dot.
pub type DotElectrons = [[f64; 2]; 2];

fn pair_sum(dots: &[DotElectrons], alpha: f64, offset_sq: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(invalid("alpha", "must be non-negative"));
    }
    let mut total = 0.0;
    for pair in dots.windows(2) {
        for r_next in &pair[1] {
            for r_here in &pair[0] {
                let dist_sq = (r_next[0] - r_here[0]).powi(2) + (r_next[1] - r_here[1]).powi(2) + offset_sq;
                if !(dist_sq > 0.0) {
                    return Err(invalid("positions", "coincident electrons in neighbouring dots"));
                }
                total += alpha / dist_sq;
            }
        }
    }
    Ok(total)
}

/// Vertically stacked dots a distance d apart: Σ α/(|Δr|² + d²) over
/// electron pairs in neighbouring dots, Δr the in-plane separation.
pub fn v_inter_stacked(dots: &[DotElectrons], alpha: f64, d: f64) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(invalid("d", "must be non-negative"));
    }
    pair_sum(dots, alpha, d * d)
}

/// Dots side by side in one plane: Σ α/|Δr|² with absolute in-plane positions.
pub fn v_inter_planar(dots: &[DotElectrons], alpha: f64) -> Result<f64> {
    pair_sum(dots, alpha, 0.0)
}
