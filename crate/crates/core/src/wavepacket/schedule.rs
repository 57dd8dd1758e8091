//! Jump times and transfer-rate weights.

use serde::Serialize;

use super::{transfer_rate, Propagator, WavePacketSpec, Wavefunction};
use crate::config::PotentialConfig;
use crate::error::{domain, Error, Result};
use crate::quadrature::gauss_legendre_on;

/// Default number of Gauss–Legendre jump times.
pub const DEFAULT_TAU_NODES: usize = 64;
/// The τ-grid covers the times where Γ exceeds this fraction of its maximum.
pub const GAMMA_SUPPORT: f64 = 1e-6;
/// Γ(t_end) must have fallen below this fraction of its maximum.
const GAMMA_END: f64 = 1e-5;

/// Quadrature over jump times: `∫ Γ(τ) f(τ) dτ ≈ Σ weights_i Γ_i f(τ_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpSchedule {
    pub tau_nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub gamma: Vec<f64>,
    pub t_end: f64,
    /// Largest Γ seen on the survey pass.
    pub gamma_max: f64,
    /// Γ(t_end) relative to `gamma_max`.
    pub gamma_tail: f64,
}

/// Γ sampled on a uniform time grid during one pass over `[0, t_end]`.
pub(super) struct Survey {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
}

pub(super) fn survey(spec: &WavePacketSpec, config: &PotentialConfig, t_end: f64, dt: f64) -> Result<Survey> {
    let mut prop = Propagator::new(spec.grid, config, config.v1, dt)?.with_monitor(spec.edge_monitor(config));
    let n = prop.steps_for(t_end);
    let h = t_end / n as f64;
    let mut psi = spec.initial();
    let mut times = vec![0.0];
    let mut gamma = vec![transfer_rate(&psi, config)];
    for i in 0..n {
        prop.advance(&mut psi, h, i as f64 * h)?;
        times.push((i + 1) as f64 * h);
        gamma.push(transfer_rate(&psi, config));
    }
    Ok(Survey { times, gamma })
}

impl JumpSchedule {
    /// Gauss–Legendre times over the support of Γ, with Γ evaluated exactly
    /// at the nodes by a second pass.
    pub fn build(spec: &WavePacketSpec, config: &PotentialConfig, t_end: f64, dt: f64, n_nodes: usize) -> Result<Self> {
        if n_nodes == 0 {
            return Err(domain("jump_schedule", "need at least one jump time"));
        }
        let s = survey(spec, config, t_end, dt)?;
        let gamma_max = s.gamma.iter().cloned().fold(0.0, f64::max);
        let gamma_tail = *s.gamma.last().unwrap() / gamma_max;
        if gamma_tail > GAMMA_END {
            return Err(Error::StaleSpectrum {
                detail: format!(
                    "transfer rate at t_end is {:.3e} of its maximum (need below {GAMMA_END:e}); raise t_end",
                    gamma_tail
                ),
            });
        }
        let above = |g: &f64| *g > GAMMA_SUPPORT * gamma_max;
        let first = s.gamma.iter().position(above).unwrap_or(0);
        let end = s.gamma.iter().rposition(above).unwrap_or(s.gamma.len() - 1);
        let lo = s.times[first.saturating_sub(1)];
        let hi = s.times[(end + 1).min(s.times.len() - 1)];
        let (tau_nodes, weights) = gauss_legendre_on(n_nodes, lo, hi);
        let snaps = snapshots(spec, config, &tau_nodes, dt)?;
        let gamma = snaps.iter().map(|psi| transfer_rate(psi, config)).collect();
        Ok(Self {
            tau_nodes,
            weights,
            gamma,
            t_end,
            gamma_max,
            gamma_tail,
        })
    }

    /// Effective weight of each node.
    pub fn node_weights(&self) -> Vec<f64> {
        self.weights.iter().zip(&self.gamma).map(|(w, g)| w * g).collect()
    }
}

/// State-|1⟩ wave functions at the increasing times `taus`, from one pass.
pub(super) fn snapshots(spec: &WavePacketSpec, config: &PotentialConfig, taus: &[f64], dt: f64) -> Result<Vec<Wavefunction>> {
    if !taus.windows(2).all(|w| w[1] >= w[0]) || taus.first().is_some_and(|t| *t < 0.0) {
        return Err(domain("snapshots", "jump times must be non-negative and increasing"));
    }
    let mut prop = Propagator::new(spec.grid, config, config.v1, dt)?.with_monitor(spec.edge_monitor(config));
    let mut psi = spec.initial();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        prop.advance(&mut psi, tau - t, t)?;
        t = tau;
        out.push(psi.clone());
    }
    Ok(out)
}
