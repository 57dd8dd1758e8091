//! Incoherent accumulation of the transferred momentum densities.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::schedule::{snapshots, survey};
use super::{apply_jump, JumpSchedule, Propagator, WavePacketSpec, Wavefunction};
use crate::config::PotentialConfig;
use crate::distribution::{MomentumDistribution, Route, SpectrumMeta};
use crate::error::{domain, Error, Result};
use crate::recoil::{recoil_nodes, sample_recoil, RecoilModel};
use crate::stationary::OverlapConfig;
use crate::units::K0;

/// Default number of recoil nodes for the time-dependent route.
pub const DEFAULT_WAVEPACKET_K_NODES: usize = 17;
/// Weighted `d⟨p²⟩/dt / p0²` of the transferred packets allowed at `t_end`.
const STALE_RATE: f64 = 1e-4;

/// Discretization of the time-dependent route.
#[derive(Debug, Clone, PartialEq)]
pub struct WavepacketNumerics {
    /// Largest time step.
    pub dt: f64,
    pub tau_nodes: usize,
    pub k_nodes: usize,
    /// Output momenta.
    pub p_grid: Vec<f64>,
}

impl WavepacketNumerics {
    /// Time step `0.02·2π/E_band` with `E_band` the kinetic energy at
    /// `|k_z| + k0 + 5σ_p`, the highest momentum the packets populate.
    pub fn defaults(spec: &WavePacketSpec, beta: f64) -> Self {
        let p_band = spec.k_z.abs() + K0 + 5.0 * spec.sigma_p();
        Self {
            dt: 0.02 * 2.0 * PI / (0.5 * p_band * p_band),
            tau_nodes: super::DEFAULT_TAU_NODES,
            k_nodes: DEFAULT_WAVEPACKET_K_NODES,
            p_grid: OverlapConfig::default_p_grid(spec.k_z.abs(), beta),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            v.push(format!("dt must be positive (got {})", self.dt));
        }
        if self.tau_nodes == 0 {
            v.push("tau_nodes must be positive".into());
        }
        if self.k_nodes == 0 {
            v.push("k_nodes must be positive".into());
        }
        if self.p_grid.len() < 2 || !self.p_grid.windows(2).all(|w| w[1] > w[0]) {
            v.push("p_grid must hold at least two strictly increasing momenta".into());
        }
        v
    }
}

/// One transferred packet at `t_end`.
struct Branch {
    density: Vec<f64>,
    mean_potential: f64,
    rate: f64,
    edge: f64,
}

fn run_branch(
    prop: &mut Propagator,
    snapshot: &Wavefunction,
    tau: f64,
    k: f64,
    config: &PotentialConfig,
    t_end: f64,
    p_grid: &[f64],
) -> Result<Branch> {
    let mut psi = apply_jump(snapshot, config, k)?;
    prop.take_edge_peak();
    prop.advance(&mut psi, t_end - tau, tau)?;
    Ok(Branch {
        edge: prop.take_edge_peak(),
        density: psi.momentum_density(p_grid),
        mean_potential: prop.mean_potential(&psi),
        rate: prop.momentum_square_rate(&psi, config.kappa),
    })
}

/// Runs every `(snapshot, k)` branch, in parallel, returned in task order.
fn run_branches(
    spec: &WavePacketSpec,
    config: &PotentialConfig,
    snaps: &[Wavefunction],
    tasks: &[(usize, f64, f64)],
    taus: &[f64],
    t_end: f64,
    numerics: &WavepacketNumerics,
) -> Result<Vec<Branch>> {
    let monitor = spec.edge_monitor(config);
    tasks
        .par_iter()
        .map_init(
            || Propagator::new(spec.grid, config, config.v2(), numerics.dt).map(|p| p.with_watch(monitor)),
            |prop, &(i, k, _)| {
                let prop = prop.as_mut().map_err(|e| e.clone())?;
                run_branch(prop, &snaps[i], taus[i], k, config, t_end, &numerics.p_grid)
            },
        )
        .collect()
}

/// Weighted residuals of the transferred mixture at `t_end`.
struct Residuals {
    rate: f64,
    potential: f64,
}

/// Sums branch densities with the task weights in task order. Edge contact
/// and staleness are judged on the weighted mixture: a branch of tiny
/// weight may be dominated by deep-barrier content without affecting the
/// spectrum.
fn accumulate(
    branches: &[Branch],
    tasks: &[(usize, f64, f64)],
    n_p: usize,
    spec: &WavePacketSpec,
    t_end: f64,
) -> Result<(Vec<f64>, Residuals)> {
    let mut density = vec![0.0; n_p];
    let (mut total, mut rate, mut potential, mut edge) = (0.0, 0.0, 0.0, 0.0);
    for (b, &(_, _, w)) in branches.iter().zip(tasks) {
        for (d, x) in density.iter_mut().zip(&b.density) {
            *d += w * x;
        }
        total += w;
        rate += w * b.rate;
        potential += w * b.mean_potential;
        edge += w * b.edge;
    }
    let edge = edge / total;
    let threshold = spec.edge_threshold();
    if edge > threshold {
        return Err(Error::EdgeContact { time: t_end, probability: edge });
    }
    let rate = rate / total / (spec.k_z * spec.k_z);
    if rate.abs() > STALE_RATE {
        return Err(Error::StaleSpectrum {
            detail: format!("mean d<p^2>/dt / p0^2 = {rate:.3e} at t_end (need below {STALE_RATE:e}); raise t_end"),
        });
    }
    Ok((density, Residuals { rate, potential: potential / total }))
}

fn meta(
    spec: &WavePacketSpec,
    config: &PotentialConfig,
    recoil: &RecoilModel,
    t_end: f64,
    numerics: &WavepacketNumerics,
) -> SpectrumMeta {
    let mut settings = BTreeMap::new();
    for (key, value) in [
        ("t_end", t_end),
        ("z0", spec.z0),
        ("sigma_z", spec.sigma_z),
        ("sigma_p", spec.sigma_p()),
        ("k_z", spec.k_z),
        ("z_lo", spec.grid.z_lo),
        ("z_hi", spec.grid.z_hi),
        ("n_z", spec.grid.n as f64),
        ("dt", numerics.dt),
        ("k_nodes", numerics.k_nodes as f64),
    ] {
        settings.insert(key.to_string(), value);
    }
    SpectrumMeta {
        route: Route::Wavepacket,
        potential: Some(*config),
        p0: Some(spec.k_z.abs()),
        recoil: Some(*recoil),
        k: None,
        settings,
    }
}

fn validate(spec: &WavePacketSpec, numerics: &WavepacketNumerics) -> Result<()> {
    let mut v = spec.violations();
    v.extend(numerics.violations());
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(v))
    }
}

/// `Σ_τ Σ_k w_τ Γ(τ) w_k |φ_{τ,k}(p)|²` at `t_end`, normalized to unit
/// integral. Each branch jumps at `τ` and then evolves on `β V1`.
pub fn final_spectrum(
    spec: &WavePacketSpec,
    config: &PotentialConfig,
    schedule: &JumpSchedule,
    recoil: &RecoilModel,
    numerics: &WavepacketNumerics,
) -> Result<MomentumDistribution> {
    validate(spec, numerics)?;
    let t_end = schedule.t_end;
    if schedule.tau_nodes.iter().any(|&t| t > t_end) {
        return Err(domain("final_spectrum", "jump times beyond t_end"));
    }
    let snaps = snapshots(spec, config, &schedule.tau_nodes, numerics.dt)?;
    let k_nodes = recoil_nodes(recoil, numerics.k_nodes)?;
    let node_weights = schedule.node_weights();
    let tasks: Vec<(usize, f64, f64)> = (0..snaps.len())
        .flat_map(|i| k_nodes.iter().map(move |&(k, wk)| (i, k, wk)))
        .map(|(i, k, wk)| (i, k, wk * node_weights[i]))
        .collect();
    let branches = run_branches(spec, config, &snaps, &tasks, &schedule.tau_nodes, t_end, numerics)?;
    let (density, res) = accumulate(&branches, &tasks, numerics.p_grid.len(), spec, t_end)?;
    let mut m = meta(spec, config, recoil, t_end, numerics);
    m.settings.insert("tau_nodes".into(), schedule.tau_nodes.len() as f64);
    m.settings.insert("residual_p2_rate".into(), res.rate);
    m.settings.insert("residual_potential".into(), res.potential);
    MomentumDistribution::new(numerics.p_grid.clone(), density, m)?.normalized()
}

/// Builds the jump schedule and evaluates [`final_spectrum`].
pub fn wavepacket_spectrum(
    spec: &WavePacketSpec,
    config: &PotentialConfig,
    recoil: &RecoilModel,
    t_end: f64,
    numerics: &WavepacketNumerics,
) -> Result<MomentumDistribution> {
    validate(spec, numerics)?;
    let schedule = JumpSchedule::build(spec, config, t_end, numerics.dt, numerics.tau_nodes)?;
    final_spectrum(spec, config, &schedule, recoil, numerics)
}

/// Monte-Carlo estimate: jump times drawn from Γ(τ) and recoils from the
/// recoil density with a seeded generator, each sample weighted equally.
pub fn sampled_spectrum(
    spec: &WavePacketSpec,
    config: &PotentialConfig,
    recoil: &RecoilModel,
    t_end: f64,
    numerics: &WavepacketNumerics,
    samples: usize,
    seed: u64,
) -> Result<MomentumDistribution> {
    validate(spec, numerics)?;
    if samples == 0 {
        return Err(domain("sampled_spectrum", "need at least one sample"));
    }
    let s = survey(spec, config, t_end, numerics.dt)?;
    let mut cdf = vec![0.0];
    for i in 1..s.times.len() {
        let area = 0.5 * (s.gamma[i] + s.gamma[i - 1]) * (s.times[i] - s.times[i - 1]);
        cdf.push(cdf[i - 1] + area);
    }
    let total = *cdf.last().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<(f64, f64)> = (0..samples)
        .map(|_| {
            let target = rng.random::<f64>() * total;
            let i = cdf.partition_point(|&c| c < target).clamp(1, cdf.len() - 1);
            let frac = (target - cdf[i - 1]) / (cdf[i] - cdf[i - 1]).max(f64::MIN_POSITIVE);
            let tau = s.times[i - 1] + frac.clamp(0.0, 1.0) * (s.times[i] - s.times[i - 1]);
            (tau, sample_recoil(recoil, rng.random::<f64>()))
        })
        .collect();
    draws.sort_by(|a, b| a.0.total_cmp(&b.0));
    let taus: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let snaps = snapshots(spec, config, &taus, numerics.dt)?;
    let tasks: Vec<(usize, f64, f64)> = draws.iter().enumerate().map(|(i, d)| (i, d.1, 1.0)).collect();
    let branches = run_branches(spec, config, &snaps, &tasks, &taus, t_end, numerics)?;
    let (density, res) = accumulate(&branches, &tasks, numerics.p_grid.len(), spec, t_end)?;
    let mut m = meta(spec, config, recoil, t_end, numerics);
    m.settings.insert("samples".into(), samples as f64);
    m.settings.insert("seed".into(), seed as f64);
    m.settings.insert("residual_p2_rate".into(), res.rate);
    m.settings.insert("residual_potential".into(), res.potential);
    MomentumDistribution::new(numerics.p_grid.clone(), density, m)?.normalized()
}
