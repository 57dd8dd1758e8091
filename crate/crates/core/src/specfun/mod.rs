//! Modified Bessel function of the second kind with imaginary order,
//! `K_{iν}(x) = ∫₀^∞ exp(−x cosh t) cos(νt) dt`.
//!
//! For `ν > x` the function oscillates with amplitude `~exp(−πν/2)`, so the
//! real-axis integral cancels catastrophically. Evaluation instead follows
//! steepest-descent contours (every term positive or of fixed phase) or, for
//! small `x`, the ascending series. Results carry an explicit log-scale.

mod contour;
pub mod gamma;
pub(crate) mod series;

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};

/// `mantissa · exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    /// The represented value; may underflow to zero.
    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }
}

/// Below this argument the ascending series is used when `ν ≥ SERIES_MIN_ORDER`.
pub(crate) const SERIES_MAX_ARG: f64 = 2.0;
const SERIES_MIN_ORDER: f64 = 1.0;

// ln of the smallest positive normal f64.
const LN_MIN_NORMAL: f64 = -708.396_418_532_264_1;

fn check_args(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(domain("besselk_imag", format!("argument must be positive and finite (got {x})")));
    }
    if !nu.is_finite() {
        return Err(domain("besselk_imag", format!("order must be finite (got {nu})")));
    }
    // K_{iν} = K_{−iν}
    Ok(nu.abs())
}

/// `K_{iν}(x)` as mantissa and log-scale, free of under/overflow.
pub fn besselk_imag_scaled(nu: f64, x: f64) -> Result<Scaled> {
    let nu = check_args(nu, x)?;
    Ok(if x <= SERIES_MAX_ARG && nu >= SERIES_MIN_ORDER {
        series::small_argument(nu, x)
    } else if nu <= x {
        contour::below_transition(nu, x)
    } else {
        contour::above_transition(nu, x)
    })
}

/// Log of the magnitude scale `besselk_imag_scaled` would report, without
/// evaluating the integral. The mantissa is at most `O(√(2π/x))`.
pub(crate) fn log_envelope(nu: f64, x: f64) -> f64 {
    let nu = nu.abs();
    if nu < x {
        let theta0 = (nu / x).asin();
        -x * theta0.cos() - nu * theta0
    } else {
        -nu * std::f64::consts::FRAC_PI_2
    }
}

/// `K_{iν}(x)`. Fails with [`Error::Overflow`] when the magnitude scale is
/// below the normal `f64` range; use [`besselk_imag_scaled`] there.
pub fn besselk_imag(nu: f64, x: f64) -> Result<f64> {
    let s = besselk_imag_scaled(nu, x)?;
    if s.log_scale < LN_MIN_NORMAL {
        return Err(Error::Overflow {
            op: "besselk_imag",
            log_magnitude: s.log_scale,
        });
    }
    Ok(s.value())
}

/// `ln sqrt((4 p0 / (π κ)) · sinh(πν))`.
pub fn ln_stationary_norm(nu: f64, p0: f64, kappa: f64) -> Result<f64> {
    if !(nu > 0.0 && p0 > 0.0 && kappa > 0.0) {
        return Err(domain(
            "stationary_norm",
            format!("nu, p0 and kappa must be positive (got {nu}, {p0}, {kappa})"),
        ));
    }
    let x = PI * nu;
    // ln sinh x = x − ln 2 + ln(1 − e^{−2x}), or ln sinh x directly for small x.
    let ln_sinh = if x < 1.0 { x.sinh().ln() } else { x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p() };
    Ok(0.5 * ((4.0 * p0 / (PI * kappa)).ln() + ln_sinh))
}

/// Normalization of the stationary eigenfunction, fixing the asymptotic
/// standing-wave amplitude to 2 independently of `p0`.
pub fn stationary_norm(nu: f64, p0: f64, kappa: f64) -> Result<f64> {
    let ln = ln_stationary_norm(nu, p0, kappa)?;
    if ln > 709.0 {
        return Err(Error::Overflow {
            op: "stationary_norm",
            log_magnitude: ln,
        });
    }
    Ok(ln.exp())
}
