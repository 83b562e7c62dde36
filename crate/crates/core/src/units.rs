//! Conversion between dimensionless exciton times (units of ℏ/ε) and seconds.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitContext {
    /// Band gap ε in eV.
    pub epsilon_ev: f64,
}

impl UnitContext {
    pub fn new(epsilon_ev: f64) -> Result<Self> {
        if !(epsilon_ev > 0.0 && epsilon_ev.is_finite()) {
            return Err(invalid("epsilon_ev", format!("must be positive, got {epsilon_ev}")));
        }
        Ok(UnitContext { epsilon_ev })
    }

    /// ε/ℏ in s⁻¹.
    pub fn carrier_frequency(&self) -> f64 {
        self.epsilon_ev / HBAR_EV_S
    }

    pub fn to_seconds(&self, t: f64) -> f64 {
        t * HBAR_EV_S / self.epsilon_ev
    }

    pub fn to_dimensionless(&self, seconds: f64) -> f64 {
        seconds * self.epsilon_ev / HBAR_EV_S
    }
}
