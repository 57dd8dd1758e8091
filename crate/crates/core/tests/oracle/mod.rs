//! Extended-precision reference values for `K_{iν}(x)`.
//!
//! The real-axis integral `∫₀^∞ exp(−x cosh t) cos(νt) dt` is summed with the
//! trapezoid rule, whose error for this even analytic integrand decays like
//! `exp(−2πd/h)`. The working precision covers the `exp(−πν/2)` cancellation.

use astro_float::{BigFloat, Consts, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;
// Strip half-width used to bound the trapezoid error.
const STRIP: f64 = 1.5;
// Target error margin, in e-folds below exp(−πν/2).
const MARGIN: f64 = 40.0;

pub fn bessel_k_imag(nu: f64, x: f64) -> f64 {
    let decay = nu * std::f64::consts::FRAC_PI_2;
    let bits = 128 + (decay / std::f64::consts::LN_2).ceil() as usize;
    let p = bits.div_ceil(64) * 64;
    let mut cc = Consts::new().expect("constants cache");

    // In the strip |Im t| < STRIP the integrand grows by at most
    // exp(ν·STRIP + x(1 − cos STRIP)) over its real-axis size.
    let growth = nu * (STRIP + std::f64::consts::FRAC_PI_2) + x * (1.0 - STRIP.cos());
    let h = 2.0 * std::f64::consts::PI * STRIP / (growth + MARGIN);
    // Integrand below exp(−x − πν/2 − MARGIN − 10) beyond t_max.
    let t_max = (1.0 + (decay + MARGIN + 10.0) / x).acosh();
    let n = (t_max / h).ceil() as usize + 1;

    let bh = BigFloat::from_f64(h, p);
    let bx = BigFloat::from_f64(x, p);
    let bnu = BigFloat::from_f64(nu, p);
    let mut sum = BigFloat::from_f64(0.0, p);
    for j in 0..=n {
        // Nodes in full precision: cos(νt) is evaluated far outside its
        // f64-accurate range once the sum has cancelled.
        let t = bh.mul(&BigFloat::from_u64(j as u64, p), p, RM);
        let e = bx.mul(&t.cosh(p, RM, &mut cc), p, RM).neg().exp(p, RM, &mut cc);
        let c = bnu.mul(&t, p, RM).cos(p, RM, &mut cc);
        let mut term = e.mul(&c, p, RM);
        if j == 0 {
            term = term.div(&BigFloat::from_f64(2.0, p), p, RM);
        }
        sum = sum.add(&term, p, RM);
    }
    let value = sum.mul(&bh, p, RM);
    format!("{value}").parse().expect("BigFloat formats as a decimal float")
}

/// Magnitude used to measure relative error: the value itself, or in the
/// oscillatory region the local amplitude `√(2π) (ν² − x²)^{−1/4} e^{−πν/2}`
/// so that zeros of `K_{iν}` do not inflate the measure.
pub fn error_scale(nu: f64, x: f64, reference: f64) -> f64 {
    if nu <= x + 1.0 {
        return reference.abs();
    }
    let amplitude = (2.0 * std::f64::consts::PI).sqrt()
        * (nu * nu - x * x).powf(-0.25)
        * (-nu * std::f64::consts::FRAC_PI_2).exp();
    reference.abs().max(amplitude)
}
