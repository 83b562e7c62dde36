use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::hamiltonian::{rotating_frame, Direction};

use super::QuantumState;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<QuantumState>,
    pub observables: BTreeMap<String, Vec<f64>>,
}

impl Trajectory {
    /// Builds a trajectory and fills the standard observables:
    /// `purity` and `pop<i>` for every basis level.
    pub fn new(times: Vec<f64>, states: Vec<QuantumState>) -> Self {
        assert_eq!(times.len(), states.len(), "one state per time");
        let mut observables = BTreeMap::new();
        observables.insert("purity".to_string(), states.iter().map(QuantumState::purity).collect());
        if let Some(first) = states.first() {
            for i in 0..first.subspace().dim() {
                observables.insert(format!("pop{i}"), states.iter().map(|s| s.population(i)).collect());
            }
        }
        Trajectory { times, states, observables }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn observable(&self, name: &str) -> Option<&[f64]> {
        self.observables.get(name).map(Vec::as_slice)
    }

    pub fn insert_observable(&mut self, name: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.len());
        self.observables.insert(name.into(), values);
    }

    /// Every state moved with Λ(t) at its own time.
    pub fn transformed(&self, carrier_freq: f64, direction: Direction) -> Result<Trajectory> {
        let states = self
            .times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| rotating_frame(s, carrier_freq, t, direction))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory::new(self.times.clone(), states))
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(invalid("times", "must be finite"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("times", "must be strictly increasing"));
    }
    Ok(())
}

/// `n` evenly spaced samples from 0 to `t_max` inclusive.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.0];
    }
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

/// Samples 0, dt, 2dt, ... up to and including `t_max` (within rounding).
pub fn time_steps(t_max: f64, dt: f64) -> Vec<f64> {
    let n = (t_max / dt + 1e-9).floor() as usize;
    (0..=n).map(|i| i as f64 * dt).collect()
}
