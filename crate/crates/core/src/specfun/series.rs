//! Ascending series `K_{iν}(x) = −(π / sinh πν) · Im I_{iν}(x)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::gamma::arg_gamma_one_plus_i;
use super::Scaled;

/// `Σ_j q^j / (j! (1+iν)_j)`.
pub(crate) fn pochhammer_sum(q: f64, nu: f64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut j = 1.0;
    loop {
        term = term * q / (Complex64::new(j, nu) * j);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            return sum;
        }
        j += 1.0;
    }
}

/// Scaled `K_{iν}(x)` for small `x`; requires `ν` away from zero.
pub(super) fn small_argument(nu: f64, x: f64) -> Scaled {
    let half = 0.5 * x;
    let sum = pochhammer_sum(half * half, nu);
    let phase = nu * half.ln() - arg_gamma_one_plus_i(nu);
    let rotated = Complex64::from_polar(1.0, phase) * sum;
    let prefactor = (2.0 * PI / (nu * -(-2.0 * PI * nu).exp_m1())).sqrt();
    Scaled {
        mantissa: -prefactor * rotated.im,
        log_scale: -nu * FRAC_PI_2,
    }
}
