//! Steepest-descent contours for `K_{iν}(x) = ½∫ exp(−x cosh t + iνt) dt`.
//!
//! With `t = s + iθ(s)` the phase is held constant, so the integrand along
//! the path is a decaying real exponential times a fixed unimodular factor.
//!
//! * `ν ≤ x`: one saddle on the imaginary axis at `sin θ₀ = ν/x`. The path is
//!   symmetric and the integral is `∫₀^∞ exp(g(s)) ds`.
//! * `ν > x`: saddles at `±a + iπ/2` with `cosh a = ν/x`. The path runs along
//!   `Im t = π/2` between them and descends to the real axis beyond.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::quadrature::integrate_adaptive;

use super::Scaled;

const CUTOFF: f64 = 60.0;
const REL_TOL: f64 = 1e-12;
const ABS_TOL: f64 = 1e-14;
const MAX_PANELS: usize = 4000;

/// `sinh s − s` without cancellation.
fn sinh_minus_arg(s: f64) -> f64 {
    if s.abs() < 1.0 {
        let s2 = s * s;
        let mut term = s * s2 / 6.0;
        let mut sum = term;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            term *= s2 / ((k + 1.0) * (k + 2.0));
            sum += term;
            k += 2.0;
        }
        sum
    } else {
        s.sinh() - s
    }
}

/// `ν ≤ x`: returns the mantissa relative to `exp(g(0))`.
pub(super) fn below_transition(nu: f64, x: f64) -> Scaled {
    let ratio = nu / x;
    let theta0 = ratio.asin();
    let g0 = -x * theta0.cos() - nu * theta0;
    let g = |s: f64| -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        let sh = s.sinh();
        let one_minus_r = (sinh_minus_arg(s) + (1.0 - ratio) * s) / sh;
        let r = 1.0 - one_minus_r;
        let cos_t = (one_minus_r * (1.0 + r)).sqrt();
        let theta = r.atan2(cos_t);
        // g(s) − g(0), grouped so that each bracket is small near s = 0.
        -x * (s.cosh() * cos_t - theta0.cos()) - nu * (theta - theta0)
    };
    let upper = descent_end(&g, 0.0);
    let integral = integrate_adaptive(|s| g(s).exp(), 0.0, upper, 2, ABS_TOL, REL_TOL, MAX_PANELS);
    Scaled {
        mantissa: integral.value,
        log_scale: g0,
    }
}

/// `ν > x`: returns the mantissa relative to `exp(−νπ/2)`.
pub(super) fn above_transition(nu: f64, x: f64) -> Scaled {
    let a = (nu / x).acosh();
    let (sinh_a, cosh_a) = (a.sinh(), a.cosh());
    let big_phi = nu * a - x * sinh_a;

    // Along Im t = π/2 between the saddles.
    let panels = ((big_phi / (2.0 * std::f64::consts::PI)).ceil() as usize).clamp(1, 2000);
    let horizontal = if a > 0.0 {
        integrate_adaptive(
            |s: f64| (nu * s - x * s.sinh()).cos(),
            0.0,
            a,
            panels,
            ABS_TOL,
            REL_TOL,
            MAX_PANELS.max(4 * panels),
        )
        .value
    } else {
        0.0
    };

    // Descent from a + iπ/2; returns (g + νπ/2, θ').
    let path = |s: f64| -> (f64, f64) {
        let sigma = s - a;
        if sigma == 0.0 {
            return (0.0, -1.0);
        }
        let sh = s.sinh();
        let half = (0.5 * sigma).sinh();
        let one_minus_r = (cosh_a * sinh_minus_arg(sigma) + sinh_a * 2.0 * half * half) / sh;
        let r = 1.0 - one_minus_r;
        let cos_t = (one_minus_r * (1.0 + r)).sqrt();
        let co_theta = cos_t.atan2(r);
        let h = nu * co_theta - x * s.cosh() * cos_t;
        let dtheta = (sigma.sinh() - sigma * cosh_a * s.cosh()) / (sh * sh * cos_t);
        (h, dtheta)
    };
    let g = |s: f64| path(s).0;
    let upper = descent_end(&g, a);
    let descent = integrate_adaptive(
        |s: f64| {
            let (h, dtheta) = path(s);
            Complex64::new(1.0, dtheta) * h.exp()
        },
        a,
        upper,
        2,
        ABS_TOL,
        REL_TOL,
        MAX_PANELS,
    )
    .value;
    let rotated = Complex64::from_polar(1.0, big_phi) * descent;
    Scaled {
        mantissa: horizontal + rotated.re,
        log_scale: -nu * FRAC_PI_2,
    }
}

/// Point beyond which the path integrand is below `exp(−CUTOFF)` relative to
/// its saddle value; `g` decreases monotonically along a descent path.
fn descent_end(g: &impl Fn(f64) -> f64, start: f64) -> f64 {
    let mut width = 1.0;
    while g(start + width) > -CUTOFF && width < 1e3 {
        width *= 2.0;
    }
    start + width
}
