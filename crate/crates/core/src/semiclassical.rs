//! Classical phase-space picture of the two-path interferometer.
//!
//! An atom entering on the state-|1⟩ potential with speed `v_i` that is
//! transferred at velocity `v_t` leaves on the state-|2⟩ potential with speed
//! `v_f`, where `v_f² = v_t² + β(v_i² − v_t²)`. Transfers at `+v_t` and `−v_t`
//! give the same `v_f`, and the phase difference of the two paths is the
//! phase-space area enclosed by the trajectories between them.
//!
//! Velocities equal momenta in the crate's units, so these functions accept
//! either.

use crate::config::{InternalState, PotentialConfig};
use crate::error::{domain, Result};
use crate::quadrature::integrate_adaptive;

/// Phase-space curve `z(v)` of an atom with fixed energy on one potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trajectory {
    pub state: InternalState,
    pub asymptotic_momentum: f64,
    pub config: PotentialConfig,
}

impl Trajectory {
    pub fn new(state: InternalState, asymptotic_momentum: f64, config: PotentialConfig) -> Result<Self> {
        if !(asymptotic_momentum > 0.0 && asymptotic_momentum.is_finite()) {
            return Err(domain(
                "Trajectory::new",
                format!("asymptotic momentum must be positive (got {asymptotic_momentum})"),
            ));
        }
        Ok(Self {
            state,
            asymptotic_momentum,
            config,
        })
    }

    /// Height at which the atom moves with velocity `v`; the turning point is
    /// at `v = 0`.
    pub fn position(&self, v: f64) -> Result<f64> {
        let a = self.asymptotic_momentum;
        if v.abs() >= a {
            return Err(domain(
                "Trajectory::position",
                format!("|v| = {} not below asymptotic speed {a}", v.abs()),
            ));
        }
        let coef = self.config.coefficient(self.state);
        Ok(-((a * a - v * v) / (2.0 * coef)).ln() / (2.0 * self.config.kappa))
    }
}

/// Speeds of a single transfer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferGeometry {
    pub v_i: f64,
    pub v_t: f64,
    pub v_f: f64,
    pub beta: f64,
}

impl TransferGeometry {
    pub fn from_final(v_i: f64, v_f: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            v_i,
            v_t: transfer_speed(v_i, v_f, beta)?,
            v_f,
            beta,
        })
    }

    /// `v_f` implied by `v_i` and `v_t`.
    pub fn final_speed(&self) -> f64 {
        (self.v_t * self.v_t + self.beta * (self.v_i * self.v_i - self.v_t * self.v_t)).sqrt()
    }
}

/// Speed at which the transfer must happen to end with speed `v_f`.
pub fn transfer_speed(v_i: f64, v_f: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(domain("transfer_speed", format!("beta must lie in (0, 1) (got {beta})")));
    }
    let lo = beta.sqrt() * v_i;
    if !(v_f >= lo && v_f <= v_i) {
        return Err(domain(
            "transfer_speed",
            format!("v_f = {v_f} outside the classical band [{lo}, {v_i}]"),
        ));
    }
    let t2 = (v_f * v_f - beta * v_i * v_i) / (1.0 - beta);
    Ok(t2.max(0.0).sqrt().min(v_i))
}

/// Lowest final speed reachable with a recoil `k` along z:
/// `√β·v_i·√(1 − (k/v_i)²/(1 − β))`.
pub fn lowest_final_speed(v_i: f64, beta: f64, k: f64) -> Result<f64> {
    let arg = 1.0 - (k / v_i).powi(2) / (1.0 - beta);
    if !(arg >= 0.0) {
        return Err(domain(
            "lowest_final_speed",
            format!("recoil {k} too large for v_i = {v_i}, beta = {beta}"),
        ));
    }
    Ok(beta.sqrt() * v_i * arg.sqrt())
}

/// Final speeds reachable along two distinct paths, `(lo, hi)`; `None` when
/// no such speed exists.
pub fn two_path_band(v_i: f64, beta: f64, k: f64) -> Option<(f64, f64)> {
    let lo = lowest_final_speed(v_i, beta, k).ok()?;
    let hi = v_i - k.abs();
    (hi > lo).then_some((lo, hi))
}

/// Velocities on the state-|1⟩ curve at which a transfer with momentum change
/// `q = −k` lands on the state-|2⟩ curve of speed `v_f` at the same height.
fn transfer_points(v_i: f64, v_f: f64, beta: f64, q: f64) -> Option<(f64, f64)> {
    // (1−β)u² + 2qu + q² + βv_i² − v_f² = 0
    let a = 1.0 - beta;
    let disc = beta * q * q + a * (v_f * v_f - beta * v_i * v_i);
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    let (ua, ub) = ((-q - root) / a, (-q + root) / a);
    (ua > -v_i && ub < v_i).then_some((ua, ub))
}

/// Enclosed-area phase `∫(z1 − z2) dv` between the transfer points `±v_t`.
///
/// Requires `√β·v_i < v_f < v_i`; the result is positive and tends to zero at
/// the lower band edge.
pub fn phase_difference(v_i: f64, v_f: f64, config: &PotentialConfig) -> Result<f64> {
    recoil_phase_difference(v_i, v_f, config, 0.0)
}

/// Phase difference of the two paths when the transfer also imparts a
/// momentum change `−k`.
///
/// The transfer points are re-solved on the kicked geometry: path A jumps at
/// `u_a` from the state-|1⟩ curve to the state-|2⟩ curve at `u_a − k`, path B
/// at `u_b`. The jump factor `exp(−ikz)` cancels the horizontal legs of the
/// enclosed loop, leaving `∫_{u_a}^{u_b} z1(u) du − ∫_{u_a−k}^{u_b−k} z2(w) dw`.
pub fn recoil_phase_difference(v_i: f64, v_f: f64, config: &PotentialConfig, k: f64) -> Result<f64> {
    let beta = config.beta;
    let (ua, ub) = match two_path_band(v_i, beta, k) {
        Some((lo, hi)) if v_f > lo && v_f < hi => transfer_points(v_i, v_f, beta, -k),
        _ => None,
    }
    .ok_or_else(|| {
        domain(
            "phase_difference",
            format!("v_f = {v_f} not strictly inside the two-path band for v_i = {v_i}, k = {k}"),
        )
    })?;
    let scale = (1.0 - beta) / beta;
    // z1(u) − z2(u + q) = (1/2κ)·ln(1 + (1−β)(u − u_a)(u_b − u)/(β(v_i² − u²)))
    let integrand = |u: f64| {
        let excess = scale * (u - ua) * (ub - u) / ((v_i - u) * (v_i + u));
        excess.max(0.0).ln_1p()
    };
    let centre = 0.5 * (ua + ub);
    let half = 0.5 * (ub - ua);
    let integral = integrate_adaptive(
        |theta: f64| integrand(centre + half * theta.sin()) * half * theta.cos(),
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        4,
        1e-11,
        1e-13,
        2000,
    );
    Ok(integral.value / (2.0 * config.kappa))
}

/// Final momenta `p_f` with `Δφ(p_f) = 2πn`, `n = 1, 2, …`, in increasing
/// order. Empty if the two-path band is empty or holds no whole fringe.
pub fn predicted_fringe_momenta(v_i: f64, config: &PotentialConfig, recoil_k: f64) -> Vec<f64> {
    const SAMPLES: usize = 400;
    let Some((lo, hi)) = two_path_band(v_i, config.beta, recoil_k) else {
        return Vec::new();
    };
    let phase = |p: f64| recoil_phase_difference(v_i, p, config, recoil_k).ok();
    let width = hi - lo;
    let mut grid = Vec::with_capacity(SAMPLES + 1);
    grid.push((lo, 0.0));
    for j in 0..SAMPLES {
        let p = lo + width * (j as f64 + 0.5) / SAMPLES as f64;
        if let Some(v) = phase(p) {
            grid.push((p, v));
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (p0, f0) = w[0];
        let (p1, f1) = w[1];
        let (n0, n1) = ((f0 / two_pi).floor(), (f1 / two_pi).floor());
        let (lo_n, hi_n) = if n1 >= n0 { (n0 + 1.0, n1) } else { (n1 + 1.0, n0) };
        let mut n = lo_n.max(1.0);
        while n <= hi_n {
            let target = two_pi * n;
            if let Some(p) = bisect(|p| phase(p).map(|v| v - target), p0, p1) {
                roots.push(p);
            }
            n += 1.0;
        }
    }
    roots.sort_by(f64::total_cmp);
    roots
}

fn bisect(f: impl Fn(f64) -> Option<f64>, mut a: f64, mut b: f64) -> Option<f64> {
    let mut fa = f(a).unwrap_or(f64::NEG_INFINITY);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Frequency of the spontaneously emitted photon fixed by energy
/// conservation: `½(v_i² − v_f²) + ω_EW − Δ12`.
pub fn emitted_photon_frequency(v_i: f64, v_f: f64, omega_ew: f64, delta12: f64) -> f64 {
    0.5 * (v_i * v_i - v_f * v_f) + omega_ew - delta12
}
