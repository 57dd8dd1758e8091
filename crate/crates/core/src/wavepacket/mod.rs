//! Time-dependent route: a Gaussian packet bounces off the state-|1⟩
//! potential, jumps to state |2⟩ at time τ with recoil k, and the final
//! momentum densities are summed incoherently over (τ, k) with weight Γ(τ).
//!
//! The wall is at small z; the packet starts at large `z0` moving toward it.

mod propagate;
mod schedule;
mod spectrum;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::PotentialConfig;
use crate::error::{domain, Error, Result};
use crate::units::{kinetic_energy, K0};

pub use propagate::{propagate, EdgeMonitor, Propagator};
pub use schedule::{JumpSchedule, DEFAULT_TAU_NODES, GAMMA_SUPPORT};
pub use spectrum::{final_spectrum, sampled_spectrum, wavepacket_spectrum, WavepacketNumerics, DEFAULT_WAVEPACKET_K_NODES};

/// Mean potential energy of the initial packet relative to its kinetic energy.
pub const START_LEVEL: f64 = 1e-5;
/// Potential level, relative to the incident energy, that marks the lower
/// edge strip of the grid.
pub const LOWER_EDGE_LEVEL: f64 = 1e2;
/// Probability allowed inside the edge strips.
pub const EDGE_THRESHOLD: f64 = 1e-8;
/// Potential level at the lower grid edge.
const LOWER_GRID_LEVEL: f64 = 1e3;

/// Periodic grid `z_j = z_lo + j·dz`, `j < n`, with `dz = (z_hi − z_lo)/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub z_lo: f64,
    pub z_hi: f64,
    pub n: usize,
}

impl SpatialGrid {
    pub fn new(z_lo: f64, z_hi: f64, n: usize) -> Result<Self> {
        let mut v = Vec::new();
        if !(z_lo.is_finite() && z_hi.is_finite() && z_lo < z_hi) {
            v.push(format!("grid needs finite z_lo < z_hi (got {z_lo}, {z_hi})"));
        }
        if !n.is_power_of_two() || n < 16 {
            v.push(format!("grid size must be a power of two of at least 16 (got {n})"));
        }
        if v.is_empty() {
            Ok(Self { z_lo, z_hi, n })
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    pub fn dz(&self) -> f64 {
        (self.z_hi - self.z_lo) / self.n as f64
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_lo + j as f64 * self.dz()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.z(j)).collect()
    }

    /// Largest representable momentum, `π/dz`.
    pub fn nyquist(&self) -> f64 {
        PI / self.dz()
    }

    /// Momenta in FFT order.
    pub fn momenta(&self) -> Vec<f64> {
        let dk = 2.0 * PI / (self.z_hi - self.z_lo);
        let n = self.n as i64;
        (0..n)
            .map(|m| if m < n / 2 { m as f64 * dk } else { (m - n) as f64 * dk })
            .collect()
    }
}

/// Initial Gaussian packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketSpec {
    pub z0: f64,
    pub sigma_z: f64,
    /// Mean momentum; negative moves toward the mirror.
    pub k_z: f64,
    pub grid: SpatialGrid,
}

impl WavePacketSpec {
    pub fn new(z0: f64, sigma_z: f64, k_z: f64, grid: SpatialGrid) -> Result<Self> {
        let spec = Self { z0, sigma_z, k_z, grid };
        let v = spec.violations();
        if v.is_empty() {
            Ok(spec)
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    /// Packet for incident momentum `p0`, started where its mean potential
    /// energy is [`START_LEVEL`] of its kinetic energy, on a grid that holds
    /// the outgoing packet until `t_end`.
    pub fn incident(p0: f64, sigma_z: f64, config: &PotentialConfig, t_end: f64) -> Result<Self> {
        if !(p0 > 0.0 && sigma_z > 0.0 && t_end > 0.0) {
            return Err(Error::InvalidConfig(vec![format!(
                "p0, sigma_z and t_end must be positive (got {p0}, {sigma_z}, {t_end})"
            )]));
        }
        let e = kinetic_energy(p0);
        let kappa = config.kappa;
        // ⟨exp(−2κz)⟩ over the Gaussian is exp(−2κz0 + 2κ²σ²).
        let z0 = config.position_of_level(config.v1, START_LEVEL * e) + kappa * sigma_z * sigma_z;
        let z_turn = config.turning_point(p0);
        let t_bounce = (z0 - z_turn) / p0;
        let min_spread = 0.5 / sigma_z;
        // Fastest outgoing component with non-negligible weight.
        let p_out = p0 + K0 + 6.0 * min_spread;
        let reach = p_out * (t_end - t_bounce).max(0.0);
        // Room for the packet body plus the 5σ_z edge strip.
        let z_hi = (z_turn + reach).max(z0) + 12.0 * sigma_z + 10.0;
        let z_lo = config.position_of_level(config.v1, LOWER_GRID_LEVEL * e);
        let dz_max = PI / Self::required_nyquist(p0, sigma_z);
        let n = (((z_hi - z_lo) / dz_max).ceil() as usize).next_power_of_two().max(16);
        Self::new(z0, sigma_z, -p0, SpatialGrid::new(z_lo, z_hi, n)?)
    }

    /// Momentum spread by the `σ_p = ħ/σ_z` convention. The Gaussian itself
    /// has standard deviation `ħ/(2σ_z)` in momentum.
    pub fn sigma_p(&self) -> f64 {
        1.0 / self.sigma_z
    }

    fn required_nyquist(k_z: f64, sigma_z: f64) -> f64 {
        4.0 * (k_z.abs() + K0 + 5.0 / sigma_z)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.sigma_z > 0.0 && self.sigma_z.is_finite()) {
            v.push(format!("sigma_z must be positive (got {})", self.sigma_z));
            return v;
        }
        if !self.k_z.is_finite() || !self.z0.is_finite() {
            v.push("z0 and k_z must be finite".into());
        }
        let need = Self::required_nyquist(self.k_z, self.sigma_z);
        if self.grid.nyquist() < need {
            v.push(format!(
                "grid Nyquist momentum {} below {need} needed for |k_z| = {}, sigma_p = {}",
                self.grid.nyquist(),
                self.k_z.abs(),
                self.sigma_p()
            ));
        }
        let (lo, hi) = (self.z0 - 5.0 * self.sigma_z, self.z0 + 5.0 * self.sigma_z);
        if lo < self.grid.z_lo || hi > self.grid.z_hi {
            v.push(format!(
                "initial packet [{lo}, {hi}] (5 sigma_z) does not fit in the grid [{}, {}]",
                self.grid.z_lo, self.grid.z_hi
            ));
        }
        v
    }

    /// Edge strips: the upper `5σ_z` of the grid and the deep barrier below
    /// the level `LOWER_EDGE_LEVEL · E`, where only wrapped-around
    /// probability can appear.
    pub fn edge_monitor(&self, config: &PotentialConfig) -> EdgeMonitor {
        let e = kinetic_energy(self.k_z);
        EdgeMonitor {
            below: config.position_of_level(config.v1, LOWER_EDGE_LEVEL * e),
            above: self.grid.z_hi - 5.0 * self.sigma_z,
            threshold: self.edge_threshold(),
        }
    }

    /// Largest tolerated edge probability.
    pub fn edge_threshold(&self) -> f64 {
        EDGE_THRESHOLD
    }

    /// `ψ(z, 0) = (2πσ²)^{−1/4} exp(−(z − z0)²/4σ² + i k_z z)`, normalized
    /// on the grid.
    pub fn initial(&self) -> Wavefunction {
        let s2 = self.sigma_z * self.sigma_z;
        let amp = (2.0 * PI * s2).powf(-0.25);
        let values = self
            .grid
            .points()
            .iter()
            .map(|&z| {
                let d = z - self.z0;
                Complex64::from_polar(amp * (-d * d / (4.0 * s2)).exp(), self.k_z * z)
            })
            .collect();
        let mut wf = Wavefunction { grid: self.grid, values };
        let n = wf.norm();
        wf.scale(1.0 / n.sqrt());
        wf
    }
}

/// Wave function sampled on a [`SpatialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
}

impl Wavefunction {
    /// `∫|ψ|² dz`.
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dz()
    }

    fn scale(&mut self, factor: f64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }

    /// `∫ f(z)|ψ|² dz`.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        let g = self.grid;
        self.values
            .iter()
            .enumerate()
            .map(|(j, v)| f(g.z(j)) * v.norm_sqr())
            .sum::<f64>()
            * g.dz()
    }

    pub fn mean_position(&self) -> f64 {
        self.expectation(|z| z) / self.norm()
    }

    pub fn position_variance(&self) -> f64 {
        let m = self.mean_position();
        self.expectation(|z| (z - m) * (z - m)) / self.norm()
    }

    /// `(⟨p⟩, ⟨p²⟩)` from the grid transform.
    pub fn momentum_moments(&self) -> (f64, f64) {
        let mut a = self.values.clone();
        rustfft::FftPlanner::new().plan_fft_forward(a.len()).process(&mut a);
        let (mut w, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (v, k) in a.iter().zip(self.grid.momenta()) {
            let d = v.norm_sqr();
            w += d;
            m1 += k * d;
            m2 += k * k * d;
        }
        (m1 / w, m2 / w)
    }

    /// `φ(p) = (2π)^{−1/2} ∫ ψ(z) e^{−ipz} dz` at arbitrary momenta.
    pub fn momentum_amplitudes(&self, p_grid: &[f64]) -> Vec<Complex64> {
        let g = self.grid;
        let dz = g.dz();
        let scale = dz / (2.0 * PI).sqrt();
        p_grid
            .iter()
            .map(|&p| {
                let step = Complex64::from_polar(1.0, -p * dz);
                let mut phase = Complex64::from_polar(1.0, -p * g.z_lo);
                let mut sum = Complex64::new(0.0, 0.0);
                for (j, v) in self.values.iter().enumerate() {
                    sum += v * phase;
                    phase *= step;
                    // Re-anchor the recurrence to keep the phase exact.
                    if j % 256 == 255 {
                        phase = Complex64::from_polar(1.0, -p * g.z(j + 1));
                    }
                }
                sum * scale
            })
            .collect()
    }

    /// `|φ(p)|²` at arbitrary momenta.
    pub fn momentum_density(&self, p_grid: &[f64]) -> Vec<f64> {
        self.momentum_amplitudes(p_grid).iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Transfer rate `Γ = ∫ V1 e^{−2κz} |ψ|² dz` with unit proportionality.
pub fn transfer_rate(psi: &Wavefunction, config: &PotentialConfig) -> f64 {
    psi.expectation(|z| config.potential(config.v1, z))
}

/// Quantum jump: `ψ ← 𝒩 ψ e^{−κz} e^{−ikz}`.
pub fn apply_jump(psi: &Wavefunction, config: &PotentialConfig, k: f64) -> Result<Wavefunction> {
    if !k.is_finite() {
        return Err(domain("apply_jump", format!("recoil must be finite (got {k})")));
    }
    let g = psi.grid;
    let values: Vec<Complex64> = psi
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let z = g.z(j);
            v * Complex64::from_polar((-config.kappa * z).exp(), -k * z)
        })
        .collect();
    let mut out = Wavefunction { grid: g, values };
    let norm = out.norm();
    if !(norm >= 1e-300) || !norm.is_finite() {
        return Err(Error::DegenerateNorm { norm });
    }
    out.scale(1.0 / norm.sqrt());
    Ok(out)
}
