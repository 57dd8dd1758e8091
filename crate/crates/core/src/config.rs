use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::kinetic_energy;

/// Evanescent-wave mirror: state |1⟩ sees `v1·exp(−2κz)`, state |2⟩ sees
/// `β·v1·exp(−2κz)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialConfig {
    pub v1: f64,
    pub kappa: f64,
    pub beta: f64,
}

impl PotentialConfig {
    pub fn new(v1: f64, kappa: f64, beta: f64) -> Result<Self> {
        let cfg = Self { v1, kappa, beta };
        let violations = cfg.violations();
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::InvalidConfig(violations))
        }
    }

    /// Every violated invariant, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.v1.is_finite() && self.v1 > 0.0) {
            out.push(format!("v1 must be positive and finite (got {})", self.v1));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            out.push(format!("kappa must be positive and finite (got {})", self.kappa));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            out.push(format!("beta must satisfy 0 < beta < 1 (got {})", self.beta));
        }
        out
    }

    /// Peak coefficient of the state-|2⟩ potential.
    #[inline]
    pub fn v2(&self) -> f64 {
        self.beta * self.v1
    }

    /// Potential coefficient for the given internal state.
    #[inline]
    pub fn coefficient(&self, state: InternalState) -> f64 {
        match state {
            InternalState::One => self.v1,
            InternalState::Two => self.v2(),
        }
    }

    /// `coefficient · exp(−2κz)`.
    #[inline]
    pub fn potential(&self, coefficient: f64, z: f64) -> f64 {
        coefficient * (-2.0 * self.kappa * z).exp()
    }

    /// Position where `coefficient · exp(−2κz)` equals `energy`.
    #[inline]
    pub fn position_of_level(&self, coefficient: f64, energy: f64) -> f64 {
        (coefficient / energy).ln() / (2.0 * self.kappa)
    }

    /// Classical turning point of a state-|1⟩ atom with asymptotic momentum `p`.
    #[inline]
    pub fn turning_point(&self, p: f64) -> f64 {
        self.position_of_level(self.v1, kinetic_energy(p))
    }
}

/// Internal (hyperfine) state of the atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InternalState {
    One,
    Two,
}

/// Monochromatic incident state with asymptotic momentum `p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentState {
    pub p0: f64,
}

impl IncidentState {
    pub fn new(p0: f64) -> Result<Self> {
        if p0.is_finite() && p0 > 0.0 {
            Ok(Self { p0 })
        } else {
            Err(Error::InvalidConfig(vec![format!(
                "p0 must be positive and finite (got {p0})"
            )]))
        }
    }

    #[inline]
    pub fn energy(&self) -> f64 {
        kinetic_energy(self.p0)
    }
}
