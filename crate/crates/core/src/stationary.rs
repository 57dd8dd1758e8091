//! Time-independent route: exact eigenfunctions of the exponential mirror and
//! the recoil-dressed overlap between the incident and transferred states.
//!
//! The eigenfunction with asymptotic momentum `p` on `V·exp(−2κz)` is
//! `ψ(z) = N·K_{ip/κ}(√(2V)/κ · e^{−κz})`, normalized to a standing wave of
//! amplitude 2 far from the mirror. The transfer amplitude is
//!
//! `φ_k(p) = ∫ ψ1(z) e^{−κz} e^{−ikz} ψ2,p(z) dz`,
//!
//! evaluated on a uniform z-grid (trapezoid rule with Euler–Maclaurin end
//! corrections) plus the exact integral of the tail beyond `z_max`, where both
//! eigenfunctions are finite sums of exponentials.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::PotentialConfig;
use crate::distribution::{linspace, MomentumDistribution, Route, SpectrumMeta};
use crate::error::{domain, Error, Result};
use crate::recoil::{recoil_nodes, RecoilModel};
use crate::semiclassical::lowest_final_speed;
use crate::specfun::gamma::arg_gamma_one_plus_i;
use crate::specfun::series::pochhammer_sum;
use crate::specfun::{besselk_imag_scaled, ln_stationary_norm, log_envelope, SERIES_MAX_ARG};
use crate::units::{kinetic_energy, K0};

/// Energy eigenstate of one internal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryState {
    pub asymptotic_momentum: f64,
    pub potential_coefficient: f64,
    pub kappa: f64,
}

impl StationaryState {
    pub fn new(asymptotic_momentum: f64, potential_coefficient: f64, kappa: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(asymptotic_momentum) && ok(potential_coefficient) && ok(kappa)) {
            return Err(domain(
                "StationaryState::new",
                format!("momentum, coefficient and kappa must be positive (got {asymptotic_momentum}, {potential_coefficient}, {kappa})"),
            ));
        }
        Ok(Self {
            asymptotic_momentum,
            potential_coefficient,
            kappa,
        })
    }

    /// State |1⟩ with incident momentum `p0`.
    pub fn incident(p0: f64, config: &PotentialConfig) -> Result<Self> {
        Self::new(p0, config.v1, config.kappa)
    }

    /// State |2⟩ with final momentum `p`.
    pub fn transferred(p: f64, config: &PotentialConfig) -> Result<Self> {
        Self::new(p, config.v2(), config.kappa)
    }

    /// Bessel order `ν = p/κ`.
    pub fn order(&self) -> f64 {
        self.asymptotic_momentum / self.kappa
    }

    /// Bessel argument at height `z`.
    pub fn argument(&self, z: f64) -> f64 {
        (2.0 * self.potential_coefficient).sqrt() / self.kappa * (-self.kappa * z).exp()
    }
}

/// `−2 Im[e^{iΘ} Σ_j (x/2)^{2j} / (j! (1+iν)_j)]` with
/// `Θ = ν ln(x/2) − arg Γ(1+iν)`: the normalized eigenfunction for small `x`.
fn standing_wave_series(nu: f64, x: f64) -> f64 {
    let half = 0.5 * x;
    let sum = pochhammer_sum(half * half, nu);
    let theta = nu * half.ln() - arg_gamma_one_plus_i(nu);
    -2.0 * (Complex64::from_polar(1.0, theta) * sum).im
}

/// Normalized eigenfunction `ψ(z)`; real, tends to zero inside the barrier
/// and to a standing wave of amplitude 2 outside it.
pub fn eigenfunction(state: &StationaryState, z: f64) -> Result<f64> {
    let nu = state.order();
    let x = state.argument(z);
    if !x.is_finite() {
        return Ok(0.0);
    }
    if x <= SERIES_MAX_ARG {
        return Ok(standing_wave_series(nu, x));
    }
    let ln_norm = ln_stationary_norm(nu, state.asymptotic_momentum, state.kappa)?;
    if ln_norm + log_envelope(nu, x) < -750.0 {
        return Ok(0.0);
    }
    let k = besselk_imag_scaled(nu, x)?;
    let ln = ln_norm + k.log_scale;
    if ln > 709.0 {
        return Err(Error::Overflow {
            op: "eigenfunction",
            log_magnitude: ln,
        });
    }
    Ok(k.mantissa * ln.exp())
}

/// Eigenfunction beyond a point `Z`: `ψ(Z+s) = −2 Im[e^{iΘ} Σ_j α_j e^{−(2κj + ip)s}]`.
#[derive(Debug, Clone)]
struct SeriesTail {
    theta: f64,
    coeffs: Vec<Complex64>,
}

impl SeriesTail {
    fn new(state: &StationaryState, z: f64) -> Self {
        let nu = state.order();
        let half = 0.5 * state.argument(z);
        let q = half * half;
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        let mut j = 1.0;
        loop {
            let next = coeffs[coeffs.len() - 1] * q / (Complex64::new(j, nu) * j);
            if next.norm() < 1e-18 {
                break;
            }
            coeffs.push(next);
            j += 1.0;
        }
        Self {
            theta: nu * half.ln() - arg_gamma_one_plus_i(nu),
            coeffs,
        }
    }
}

/// Terms `(G, λ)` with `f(Z+s) = Σ G e^{λs}` for the overlap integrand.
fn tail_terms(t1: &SeriesTail, t2: &SeriesTail, p0: f64, p: f64, k: f64, kappa: f64, z: f64) -> Vec<(Complex64, Complex64)> {
    let prefactor = Complex64::from_polar((-kappa * z).exp(), -k * z);
    let sum_phase = Complex64::from_polar(1.0, t1.theta + t2.theta);
    let diff_phase = Complex64::from_polar(1.0, t1.theta - t2.theta);
    let (s, d) = (p0 + p, p0 - p);
    let m_max = t1.coeffs.len() + t2.coeffs.len() - 1;
    let mut out = Vec::with_capacity(4 * m_max);
    for m in 0..m_max {
        let mut c = Complex64::new(0.0, 0.0);
        let mut dd = Complex64::new(0.0, 0.0);
        for (j, a) in t1.coeffs.iter().enumerate() {
            if m >= j && m - j < t2.coeffs.len() {
                let b = t2.coeffs[m - j];
                c += a * b;
                dd += a * b.conj();
            }
        }
        let base = Complex64::new(-(2.0 * m as f64 + 1.0) * kappa, -k);
        let i = Complex64::i();
        out.push((-prefactor * sum_phase * c, base - i * s));
        out.push((-prefactor * (sum_phase * c).conj(), base + i * s));
        out.push((prefactor * diff_phase * dd, base - i * d));
        out.push((prefactor * (diff_phase * dd).conj(), base + i * d));
    }
    out
}

// B_{2m} / (2m)!
const EULER_MACLAURIN: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1_209_600.0];

/// Discretization of the overlap integral.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapConfig {
    pub z_min: f64,
    pub z_max: f64,
    /// Grid points, including both ends; `n_z − 1` must be even.
    pub n_z: usize,
    pub p_grid: Vec<f64>,
    pub recoil: RecoilModel,
    pub k_nodes: usize,
}

/// Default number of recoil quadrature nodes.
pub const DEFAULT_K_NODES: usize = 41;
/// Default number of output momenta.
pub const DEFAULT_P_POINTS: usize = 600;

impl OverlapConfig {
    /// Default configuration: isotropic recoil and the default momentum grid.
    pub fn defaults(p0: f64, config: &PotentialConfig) -> Self {
        Self::for_grid(p0, config, Self::default_p_grid(p0, config.beta))
    }

    /// `DEFAULT_P_POINTS` momenta over `[0.9·√β·p0, 1.1·(p0 + k0)]`.
    pub fn default_p_grid(p0: f64, beta: f64) -> Vec<f64> {
        linspace(0.9 * beta.sqrt() * p0, 1.1 * (p0 + K0), DEFAULT_P_POINTS)
    }

    /// Smallest window and grid satisfying the invariants for `p_grid`.
    pub fn for_grid(p0: f64, config: &PotentialConfig, p_grid: Vec<f64>) -> Self {
        let p_max = p_grid.iter().cloned().fold(p0, f64::max);
        let e0 = kinetic_energy(p0);
        let e_max = kinetic_energy(p_max);
        let deep = 1e3 * (e0 / config.v1).max(e_max / config.v2()) * 1.01;
        let z_min = -deep.ln() / (2.0 * config.kappa);
        let z_max = (config.v1 / (1e-6 * e0) * 1.01).ln() / (2.0 * config.kappa);
        let n_z = Self::points_for(z_min, z_max, Self::max_step(p0, p_max));
        Self {
            z_min,
            z_max,
            n_z,
            p_grid,
            recoil: RecoilModel::ISOTROPIC,
            k_nodes: DEFAULT_K_NODES,
        }
    }

    /// Largest z-step that resolves the fastest oscillation.
    pub fn max_step(p0: f64, p_max: f64) -> f64 {
        2.0 * PI / (20.0 * (p0 + p_max + K0))
    }

    fn points_for(z_min: f64, z_max: f64, step: f64) -> usize {
        let mut intervals = ((z_max - z_min) / step).ceil() as usize;
        intervals += intervals % 2;
        intervals + 1
    }

    pub fn step(&self) -> f64 {
        (self.z_max - self.z_min) / (self.n_z - 1) as f64
    }

    /// Same window with the z-step halved.
    pub fn refined(&self) -> Self {
        Self {
            n_z: 2 * (self.n_z - 1) + 1,
            ..self.clone()
        }
    }

    /// Window enlarged by `fraction` of its width, split evenly between the
    /// two ends, at no larger step.
    pub fn widened(&self, fraction: f64) -> Self {
        let extra = 0.5 * fraction * (self.z_max - self.z_min);
        let (z_min, z_max) = (self.z_min - extra, self.z_max + extra);
        Self {
            z_min,
            z_max,
            n_z: Self::points_for(z_min, z_max, self.step()),
            ..self.clone()
        }
    }

    /// Every violated invariant for incident momentum `p0`.
    pub fn violations(&self, p0: f64, config: &PotentialConfig) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.z_min.is_finite() && self.z_max.is_finite() && self.z_min < self.z_max) {
            out.push(format!("need finite z_min < z_max (got {}, {})", self.z_min, self.z_max));
            return out;
        }
        if self.p_grid.len() < 2 {
            out.push("p_grid needs at least two points".into());
        }
        if !self.p_grid.iter().all(|p| *p > 0.0 && p.is_finite()) {
            out.push("p_grid values must be positive and finite".into());
        }
        if !self.p_grid.windows(2).all(|w| w[1] > w[0]) {
            out.push("p_grid must be strictly increasing".into());
        }
        if self.n_z < 3 || (self.n_z - 1) % 2 != 0 {
            out.push(format!("n_z must be odd and at least 3 (got {})", self.n_z));
        }
        if self.k_nodes == 0 || self.k_nodes % 2 == 0 {
            out.push(format!("k_nodes must be odd and positive (got {})", self.k_nodes));
        }
        if !out.is_empty() {
            return out;
        }
        let p_max = self.p_grid.iter().cloned().fold(p0, f64::max);
        let e0 = kinetic_energy(p0);
        let e_max = kinetic_energy(p_max);
        let v1_min = config.potential(config.v1, self.z_min);
        let v2_min = config.potential(config.v2(), self.z_min);
        if v1_min < 1e3 * e0 || v2_min < 1e3 * e_max {
            out.push(format!(
                "z_min = {} is not deep enough inside the barrier (V/E = {:.3e} for state 1, {:.3e} for state 2 at the largest momentum; need 1e3)",
                self.z_min,
                v1_min / e0,
                v2_min / e_max
            ));
        }
        let v1_max = config.potential(config.v1, self.z_max);
        if v1_max > 1e-6 * e0 {
            out.push(format!(
                "z_max = {} is not in the asymptotic region (V/E = {:.3e}; need at most 1e-6)",
                self.z_max,
                v1_max / e0
            ));
        }
        let x_max = (2.0 * v1_max).sqrt() / config.kappa;
        if x_max > SERIES_MAX_ARG {
            out.push(format!("z_max = {} too small for the analytic tail (argument {x_max})", self.z_max));
        }
        let limit = Self::max_step(p0, p_max);
        if self.step() > limit {
            out.push(format!(
                "z-step {} exceeds {limit} needed to resolve momenta up to {p_max}; raise n_z",
                self.step()
            ));
        }
        out
    }

    pub fn validate(&self, p0: f64, config: &PotentialConfig) -> Result<()> {
        let v = self.violations(p0, config);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }
}

/// Lower classical bound and the two straight lines bounding the
/// single-trajectory triangles for recoil `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalBoundaries {
    pub p_min: f64,
    pub p_line_lo: f64,
    pub p_line_hi: f64,
}

pub fn classical_boundaries(p0: f64, config: &PotentialConfig, k: f64) -> Result<ClassicalBoundaries> {
    Ok(ClassicalBoundaries {
        p_min: lowest_final_speed(p0, config.beta, k)?,
        p_line_lo: p0 - k.abs(),
        p_line_hi: p0 + k.abs(),
    })
}

const NEGLIGIBLE_SOURCE: f64 = 1e-40;

/// Eigenfunction tables on the z-grid, shared by every recoil value.
#[derive(Debug, Clone)]
pub struct OverlapCache {
    p0: f64,
    config: PotentialConfig,
    oc: OverlapConfig,
    z: Vec<f64>,
    /// `ψ1(z) e^{−κz}`
    source: Vec<f64>,
    /// `ψ2,p(z)` per output momentum.
    targets: Vec<Vec<f64>>,
    tail1: SeriesTail,
    tails2: Vec<SeriesTail>,
}

/// Overlap amplitude with its discretization error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Amplitude {
    pub value: Complex64,
    pub error: f64,
}

impl OverlapCache {
    pub fn build(p0: f64, config: &PotentialConfig, oc: &OverlapConfig) -> Result<Self> {
        oc.validate(p0, config)?;
        let z = linspace(oc.z_min, oc.z_max, oc.n_z);
        let incident = StationaryState::incident(p0, config)?;
        let source = z
            .iter()
            .map(|&zz| Ok(eigenfunction(&incident, zz)? * (-config.kappa * zz).exp()))
            .collect::<Result<Vec<f64>>>()?;
        let source_max = source.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let targets = oc
            .p_grid
            .par_iter()
            .map(|&p| {
                let state = StationaryState::transferred(p, config)?;
                z.iter()
                    .zip(&source)
                    .enumerate()
                    .map(|(j, (&zz, &src))| {
                        // Deep in the barrier the product vanishes regardless of ψ₂.
                        if j > 0 && src.abs() < NEGLIGIBLE_SOURCE * source_max {
                            Ok(0.0)
                        } else {
                            eigenfunction(&state, zz)
                        }
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let tails2 = oc
            .p_grid
            .iter()
            .map(|&p| StationaryState::transferred(p, config).map(|s| SeriesTail::new(&s, oc.z_max)))
            .collect::<Result<Vec<_>>>()?;
        let cache = Self {
            p0,
            config: *config,
            oc: oc.clone(),
            tail1: SeriesTail::new(&incident, oc.z_max),
            z,
            source,
            targets,
            tails2,
        };
        cache.check_left_boundary()?;
        Ok(cache)
    }

    /// The integrand must have decayed at `z_min`; its size there times the
    /// decay length bounds the neglected part.
    fn check_left_boundary(&self) -> Result<()> {
        let edge = self
            .targets
            .iter()
            .map(|t| (self.source[0] * t[0]).abs())
            .fold(0.0, f64::max)
            / self.config.kappa;
        let phases = self.phases(0.0);
        let scale = (0..self.targets.len())
            .map(|i| self.amplitude(i, 0.0, &phases, 1).norm())
            .fold(0.0, f64::max);
        let ratio = edge / scale;
        if ratio > 1e-6 {
            return Err(Error::WindowTooSmall { ratio });
        }
        Ok(())
    }

    pub fn p_grid(&self) -> &[f64] {
        &self.oc.p_grid
    }

    pub fn overlap_config(&self) -> &OverlapConfig {
        &self.oc
    }

    pub fn z_grid(&self) -> &[f64] {
        &self.z
    }

    /// `e^{−ikz}` on the z-grid.
    fn phases(&self, k: f64) -> Vec<Complex64> {
        self.z.iter().map(|&z| Complex64::from_polar(1.0, -k * z)).collect()
    }

    /// `φ_k(p_i)` using every `stride`-th grid point.
    fn amplitude(&self, i: usize, k: f64, phases: &[Complex64], stride: usize) -> Complex64 {
        let h = self.oc.step() * stride as f64;
        let target = &self.targets[i];
        let last = self.z.len() - 1;
        let mut sum = Complex64::new(0.0, 0.0);
        for j in (0..=last).step_by(stride) {
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            sum += phases[j] * (self.source[j] * target[j] * w);
        }
        let mut value = sum * h;
        let terms = tail_terms(
            &self.tail1,
            &self.tails2[i],
            self.p0,
            self.oc.p_grid[i],
            k,
            self.config.kappa,
            self.oc.z_max,
        );
        for (g, lambda) in terms {
            value -= g / lambda;
            // Euler–Maclaurin correction at z_max with derivatives g·λ^(2m−1).
            let mut hp = h * h;
            let mut lp = lambda;
            for c in EULER_MACLAURIN {
                value -= g * lp * (c * hp);
                hp *= h * h;
                lp *= lambda * lambda;
            }
        }
        value
    }

    /// `φ_k(p)` over the momentum grid with Richardson-style error estimates
    /// from the half-resolution grid.
    pub fn amplitudes(&self, k: f64) -> Vec<Amplitude> {
        let phases = self.phases(k);
        (0..self.targets.len())
            .into_par_iter()
            .map(|i| {
                let fine = self.amplitude(i, k, &phases, 1);
                let coarse = self.amplitude(i, k, &phases, 2);
                Amplitude {
                    value: fine,
                    error: (fine - coarse).norm(),
                }
            })
            .collect()
    }

    fn meta(&self, k: Option<f64>, recoil: Option<RecoilModel>) -> SpectrumMeta {
        let mut settings = BTreeMap::new();
        settings.insert("z_min".to_string(), self.oc.z_min);
        settings.insert("z_max".to_string(), self.oc.z_max);
        settings.insert("n_z".to_string(), self.oc.n_z as f64);
        if recoil.is_some() {
            settings.insert("k_nodes".to_string(), self.oc.k_nodes as f64);
        }
        SpectrumMeta {
            route: Route::Stationary,
            potential: Some(self.config),
            p0: Some(self.p0),
            recoil,
            k,
            settings,
        }
    }

    /// `|φ_k(p)|²` on the momentum grid (raw scale).
    pub fn spectrum(&self, k: f64) -> Result<MomentumDistribution> {
        let amps = self.amplitudes(k);
        let peak = amps.iter().map(|a| a.value.norm()).fold(0.0, f64::max);
        let err = amps.iter().map(|a| a.error).fold(0.0, f64::max) / peak;
        let density = amps.iter().map(|a| a.value.norm_sqr()).collect();
        let mut meta = self.meta(Some(k), None);
        meta.settings.insert("estimated_relative_error".to_string(), err);
        MomentumDistribution::new(self.oc.p_grid.clone(), density, meta)
    }

    /// Recoil-weighted sum of `|φ_k(p)|²` over the configured recoil nodes,
    /// normalized to unit integral. Nodes are summed in a fixed order.
    pub fn averaged(&self) -> Result<MomentumDistribution> {
        self.averaged_with(&self.oc.recoil, self.oc.k_nodes)
    }

    /// As [`averaged`](Self::averaged) with another recoil model or node count.
    pub fn averaged_with(&self, recoil: &RecoilModel, k_nodes: usize) -> Result<MomentumDistribution> {
        let nodes = recoil_nodes(recoil, k_nodes)?;
        let mut density = vec![0.0; self.targets.len()];
        let mut err: f64 = 0.0;
        for (k, w) in nodes {
            let amps = self.amplitudes(k);
            let peak = amps.iter().map(|a| a.value.norm()).fold(0.0, f64::max);
            err = err.max(amps.iter().map(|a| a.error).fold(0.0, f64::max) / peak);
            for (d, a) in density.iter_mut().zip(&amps) {
                *d += w * a.value.norm_sqr();
            }
        }
        let mut meta = self.meta(None, Some(*recoil));
        meta.settings.insert("k_nodes".to_string(), k_nodes as f64);
        meta.settings.insert("estimated_relative_error".to_string(), err);
        MomentumDistribution::new(self.oc.p_grid.clone(), density, meta)?.normalized()
    }
}

/// `|φ_k(p)|²` for a single recoil value (raw scale).
pub fn overlap_spectrum(p0: f64, config: &PotentialConfig, k: f64, oc: &OverlapConfig) -> Result<MomentumDistribution> {
    OverlapCache::build(p0, config, oc)?.spectrum(k)
}

/// Recoil-averaged final momentum distribution, normalized to unit integral.
pub fn averaged_spectrum(p0: f64, config: &PotentialConfig, oc: &OverlapConfig) -> Result<MomentumDistribution> {
    OverlapCache::build(p0, config, oc)?.averaged()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> PotentialConfig {
        PotentialConfig::new(50.0, 0.125, 0.2).unwrap()
    }

    #[test]
    fn eigenfunction_methods_agree_at_switch() {
        let cfg = baseline();
        let s = StationaryState::incident(2.0, &cfg).unwrap();
        // Argument 2 at this height.
        let z = ((2.0 * cfg.v1).sqrt() / cfg.kappa / 2.0).ln() / cfg.kappa;
        let series = standing_wave_series(s.order(), s.argument(z));
        let nu = s.order();
        let k = besselk_imag_scaled(nu, s.argument(z)).unwrap();
        let contour = k.mantissa * (ln_stationary_norm(nu, 2.0, cfg.kappa).unwrap() + k.log_scale).exp();
        assert!((series - contour).abs() < 1e-11, "{series} vs {contour}");
    }

    #[test]
    fn asymptotic_standing_wave() {
        let cfg = baseline();
        for p in [0.5, 2.0, 3.3] {
            let s = StationaryState::transferred(p, &cfg).unwrap();
            let z0 = 80.0;
            // Amplitude 2: ψ² + (ψ'/p)² = 4 far out.
            let dz = 1e-5;
            let a = eigenfunction(&s, z0).unwrap();
            let d = (eigenfunction(&s, z0 + dz).unwrap() - eigenfunction(&s, z0 - dz).unwrap()) / (2.0 * dz);
            assert!((a * a + (d / p).powi(2) - 4.0).abs() < 1e-6, "p={p}");
        }
    }

    #[test]
    fn tail_terms_reproduce_integrand() {
        let cfg = baseline();
        let z = 60.0;
        let (p0, p, k) = (2.0, 1.3, 0.4);
        let s1 = StationaryState::incident(p0, &cfg).unwrap();
        let s2 = StationaryState::transferred(p, &cfg).unwrap();
        let terms = tail_terms(&SeriesTail::new(&s1, z), &SeriesTail::new(&s2, z), p0, p, k, cfg.kappa, z);
        for s in [0.0, 1.7] {
            let series: Complex64 = terms.iter().map(|(g, l)| g * (l * s).exp()).sum();
            let zz = z + s;
            let direct = Complex64::from_polar(
                eigenfunction(&s1, zz).unwrap() * eigenfunction(&s2, zz).unwrap() * (-cfg.kappa * zz).exp(),
                -k * zz,
            );
            assert!((series - direct).norm() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn boundaries() {
        let cfg = baseline();
        let b = classical_boundaries(2.0, &cfg, 0.0).unwrap();
        assert!((b.p_min - 0.894_427_191).abs() < 1e-9);
        assert_eq!((b.p_line_lo, b.p_line_hi), (2.0, 2.0));
        let b = classical_boundaries(2.0, &cfg, 1.0).unwrap();
        assert!((b.p_min - 0.741_619_848_7).abs() < 1e-9);
        assert_eq!((b.p_line_lo, b.p_line_hi), (1.0, 3.0));
        let m = classical_boundaries(2.0, &cfg, -1.0).unwrap();
        assert_eq!(m.p_min, b.p_min);
        assert!(classical_boundaries(0.5, &cfg, 1.0).is_err());
    }

    #[test]
    fn default_config_is_valid_and_violations_are_listed() {
        let cfg = baseline();
        let oc = OverlapConfig::defaults(2.0, &cfg);
        assert!(oc.violations(2.0, &cfg).is_empty(), "{:?}", oc.violations(2.0, &cfg));
        let bad = OverlapConfig {
            z_min: 0.0,
            z_max: 10.0,
            n_z: 11,
            ..oc
        };
        let v = bad.violations(2.0, &cfg);
        assert_eq!(v.len(), 4, "{v:?}");
    }
}
