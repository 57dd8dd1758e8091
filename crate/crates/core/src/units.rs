//! Natural unit system shared by every route.
//!
//! All quantities are expressed with `ħ = m = k0 = 1`, where `ħk0` is the
//! momentum of the spontaneously emitted photon:
//!
//! | quantity | unit        |
//! |----------|-------------|
//! | momentum | `ħ k0`      |
//! | length   | `1 / k0`    |
//! | time     | `m / ħk0²`  |
//! | energy   | `ħ²k0² / m` |
//!
//! Since `m = 1`, velocities and momenta coincide numerically. No function in
//! this crate accepts SI values.

/// Reduced Planck constant.
pub const HBAR: f64 = 1.0;
/// Atomic mass.
pub const MASS: f64 = 1.0;
/// Magnitude of the spontaneous recoil wave vector.
pub const K0: f64 = 1.0;

/// Kinetic energy `p²/2m` of a momentum.
#[inline]
pub fn kinetic_energy(p: f64) -> f64 {
    p * p / (2.0 * MASS)
}

/// Velocity corresponding to a momentum (identity in these units).
#[inline]
pub fn velocity(p: f64) -> f64 {
    p / MASS
}
