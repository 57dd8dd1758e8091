use num_complex::Complex64;

// B_{2k} / (2k (2k − 1)) for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const SHIFT: f64 = 16.0;

/// Principal-sheet-continuous `ln Γ(z)` for `Re z > 0`.
///
/// The imaginary part is the continuous argument, not reduced to `(−π, π]`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    debug_assert!(z.re > 0.0);
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(w: Complex64) -> Complex64 {
    let half_ln_2pi = 0.918_938_533_204_672_8;
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + half_ln_2pi + series
}

/// `arg Γ(1 + iν)`, continuous in `ν`.
pub fn arg_gamma_one_plus_i(nu: f64) -> f64 {
    // Only the imaginary parts of the shift logs are needed.
    let mut shift = 0.0;
    let mut re = 1.0;
    while re < SHIFT {
        shift += nu.atan2(re);
        re += 1.0;
    }
    stirling(Complex64::new(re, nu)).im - shift
}
