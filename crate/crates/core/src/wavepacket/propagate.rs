//! Strang split-operator propagation `e^{−iVh/2} e^{−iTh} e^{−iVh/2}`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{SpatialGrid, Wavefunction};
use crate::config::PotentialConfig;
use crate::error::{domain, Error, Result};

/// Grid strips that the packet must not reach.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeMonitor {
    /// Probability below this position counts as edge contact.
    pub below: f64,
    /// Probability above this position counts as edge contact.
    pub above: f64,
    pub threshold: f64,
}

impl EdgeMonitor {
    /// Probability inside the edge strips.
    pub fn probability(&self, grid: &SpatialGrid, values: &[Complex64]) -> f64 {
        values
            .iter()
            .enumerate()
            .filter(|&(j, _)| {
                let z = grid.z(j);
                z < self.below || z > self.above
            })
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            * grid.dz()
    }

    pub fn check(&self, psi: &Wavefunction, time: f64) -> Result<()> {
        self.check_values(&psi.grid, &psi.values, time)
    }

    fn check_values(&self, grid: &SpatialGrid, values: &[Complex64], time: f64) -> Result<()> {
        let probability = self.probability(grid, values);
        if probability > self.threshold {
            return Err(Error::EdgeContact { time, probability });
        }
        Ok(())
    }
}

/// Steps between edge checks.
const CHECK_EVERY: usize = 64;

/// Split-operator propagator for one potential coefficient.
pub struct Propagator {
    grid: SpatialGrid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    k2: Vec<f64>,
    potential: Vec<f64>,
    max_step: f64,
    monitor: Option<EdgeMonitor>,
    // Record edge probability without failing.
    watch_only: bool,
    edge_peak: f64,
    scratch: Vec<Complex64>,
    // Phase tables for the most recent sub-step.
    step: f64,
    half_v: Vec<Complex64>,
    full_v: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

impl Propagator {
    /// Propagator for `coefficient · e^{−2κz}` with steps no longer than `max_step`.
    pub fn new(grid: SpatialGrid, config: &PotentialConfig, coefficient: f64, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0 && max_step.is_finite()) {
            return Err(domain("propagate", format!("time step must be positive (got {max_step})")));
        }
        if !(coefficient >= 0.0 && coefficient.is_finite()) {
            return Err(domain("propagate", format!("potential coefficient must be non-negative (got {coefficient})")));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n);
        let inverse = planner.plan_fft_inverse(grid.n);
        let scratch = vec![Complex64::new(0.0, 0.0); forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len())];
        Ok(Self {
            grid,
            forward,
            inverse,
            k2: grid.momenta().iter().map(|k| k * k).collect(),
            potential: grid.points().iter().map(|&z| config.potential(coefficient, z)).collect(),
            max_step,
            monitor: None,
            watch_only: false,
            edge_peak: 0.0,
            scratch,
            step: f64::NAN,
            half_v: Vec::new(),
            full_v: Vec::new(),
            kinetic: Vec::new(),
        })
    }

    pub fn with_monitor(mut self, monitor: EdgeMonitor) -> Self {
        self.monitor = Some(monitor);
        self
    }

    /// Like [`Self::with_monitor`] but only records the largest edge
    /// probability, read back with [`Self::take_edge_peak`].
    pub fn with_watch(mut self, monitor: EdgeMonitor) -> Self {
        self.monitor = Some(monitor);
        self.watch_only = true;
        self
    }

    /// Largest edge probability seen since the last call.
    pub fn take_edge_peak(&mut self) -> f64 {
        std::mem::take(&mut self.edge_peak)
    }

    pub fn max_step(&self) -> f64 {
        self.max_step
    }

    fn prepare(&mut self, h: f64) {
        if h == self.step {
            return;
        }
        let inv_n = 1.0 / self.grid.n as f64;
        self.half_v = self.potential.iter().map(|v| Complex64::from_polar(1.0, -0.5 * v * h)).collect();
        self.full_v = self.potential.iter().map(|v| Complex64::from_polar(1.0, -v * h)).collect();
        // The 1/N of the inverse transform is folded in here.
        self.kinetic = self.k2.iter().map(|k2| Complex64::from_polar(inv_n, -0.5 * k2 * h)).collect();
        self.step = h;
    }

    /// Sub-steps used to cover `t`: the fewest of length at most `max_step`.
    pub fn steps_for(&self, t: f64) -> usize {
        ((t / self.max_step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    /// Evolves `psi` in place by `t ≥ 0`; `t0` only labels edge errors.
    pub fn advance(&mut self, psi: &mut Wavefunction, t: f64, t0: f64) -> Result<()> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(domain("propagate", format!("duration must be non-negative (got {t})")));
        }
        if psi.grid != self.grid {
            return Err(domain("propagate", "wave function lives on another grid"));
        }
        if t == 0.0 {
            return Ok(());
        }
        let n = self.steps_for(t);
        let h = t / n as f64;
        self.prepare(h);
        let values = &mut psi.values;
        mul(values, &self.half_v);
        for i in 0..n {
            self.forward.process_with_scratch(values, &mut self.scratch);
            mul(values, &self.kinetic);
            self.inverse.process_with_scratch(values, &mut self.scratch);
            let last = i + 1 == n;
            mul(values, if last { &self.half_v } else { &self.full_v });
            if let Some(m) = &self.monitor {
                if last || (i + 1) % CHECK_EVERY == 0 {
                    if self.watch_only {
                        self.edge_peak = self.edge_peak.max(m.probability(&self.grid, values));
                    } else {
                        m.check_values(&self.grid, values, t0 + (i + 1) as f64 * h)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// `⟨V⟩` for this propagator's potential.
    pub fn mean_potential(&self, psi: &Wavefunction) -> f64 {
        self.potential.iter().zip(&psi.values).map(|(v, a)| v * a.norm_sqr()).sum::<f64>() * self.grid.dz()
    }

    /// `d⟨p²⟩/dt = ⟨pF + Fp⟩` with force `F = 2κV`.
    pub fn momentum_square_rate(&mut self, psi: &Wavefunction, kappa: f64) -> f64 {
        let mut p_psi = psi.values.clone();
        self.forward.process_with_scratch(&mut p_psi, &mut self.scratch);
        let inv_n = 1.0 / self.grid.n as f64;
        for (a, k) in p_psi.iter_mut().zip(self.grid.momenta()) {
            *a *= k * inv_n;
        }
        self.inverse.process_with_scratch(&mut p_psi, &mut self.scratch);
        let s: f64 = p_psi
            .iter()
            .zip(&psi.values)
            .zip(&self.potential)
            .map(|((pa, a), v)| (pa.conj() * a).re * 2.0 * kappa * v)
            .sum();
        2.0 * s * self.grid.dz()
    }
}

fn mul(values: &mut [Complex64], phase: &[Complex64]) {
    for (v, p) in values.iter_mut().zip(phase) {
        *v *= p;
    }
}

/// Evolves `psi` by `t` under `coefficient · e^{−2κz}`.
pub fn propagate(
    psi: &Wavefunction,
    coefficient: f64,
    config: &PotentialConfig,
    t: f64,
    max_step: f64,
    monitor: Option<EdgeMonitor>,
) -> Result<Wavefunction> {
    let mut prop = Propagator::new(psi.grid, config, coefficient, max_step)?;
    if let Some(m) = monitor {
        prop = prop.with_monitor(m);
    }
    let mut out = psi.clone();
    prop.advance(&mut out, t, 0.0)?;
    Ok(out)
}
