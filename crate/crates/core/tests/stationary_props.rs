use std::sync::OnceLock;

use ewi_core::analysis::{default_region, extract_fringes, find_extrema, PROMINENCE};
use ewi_core::distribution::linspace;
use ewi_core::semiclassical::predicted_fringe_momenta;
use ewi_core::stationary::*;
use ewi_core::{MomentumDistribution, PotentialConfig, RecoilModel};

const P0: f64 = 2.0;

fn baseline() -> PotentialConfig {
    PotentialConfig::new(50.0, 0.125, 0.2).unwrap()
}

fn cache() -> &'static OverlapCache {
    static CACHE: OnceLock<OverlapCache> = OnceLock::new();
    CACHE.get_or_init(|| OverlapCache::build(P0, &baseline(), &OverlapConfig::defaults(P0, &baseline())).unwrap())
}

fn sup_diff(a: &MomentumDistribution, b: &MomentumDistribution) -> f64 {
    a.density()
        .iter()
        .zip(b.density())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn eigenfunction_decays_into_barrier() {
    let cfg = baseline();
    let state = StationaryState::incident(P0, &cfg).unwrap();
    let z_turn = cfg.turning_point(P0);
    let mut last = f64::INFINITY;
    for z in linspace(z_turn - 1.0, z_turn - 30.0, 300) {
        let psi = eigenfunction(&state, z).unwrap().abs();
        assert!(psi < last || psi == 0.0, "z={z}");
        last = psi;
    }
    assert!(last < 1e-100);
}

#[test]
fn eigenfunction_is_a_standing_wave_far_out() {
    let cfg = baseline();
    let state = StationaryState::incident(P0, &cfg).unwrap();
    let z = linspace(60.0, 90.0, 6001);
    let psi: Vec<f64> = z.iter().map(|&x| eigenfunction(&state, x).unwrap()).collect();
    let zeros: Vec<f64> = (1..z.len())
        .filter(|&i| psi[i - 1] * psi[i] < 0.0)
        .map(|i| z[i - 1] - psi[i - 1] * (z[i] - z[i - 1]) / (psi[i] - psi[i - 1]))
        .collect();
    let spacing = (zeros[zeros.len() - 1] - zeros[0]) / (zeros.len() - 1) as f64;
    let expected = std::f64::consts::PI / P0;
    assert!((spacing / expected - 1.0).abs() < 1e-4, "{spacing} vs {expected}");
    let amplitude = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!((amplitude - 2.0).abs() < 1e-3, "{amplitude}");
}

#[test]
fn recoil_sign_symmetry() {
    for k in linspace(0.0, 1.0, 5) {
        let a = cache().spectrum(k).unwrap();
        let b = cache().spectrum(-k).unwrap();
        for (x, y) in a.density().iter().zip(b.density()) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1e-300), "k={k}");
        }
    }
}

#[test]
fn fringes_span_the_classical_band() {
    let s = cache().spectrum(0.0).unwrap();
    let b = classical_boundaries(P0, &baseline(), 0.0).unwrap();
    let r = extract_fringes(&s, (b.p_min, b.p_line_hi)).unwrap();
    assert!(r.minima.len() >= 3);
    let (argmax, _) = s
        .density()
        .iter()
        .enumerate()
        .fold((0, 0.0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
    let p_peak = s.p_grid()[argmax];
    assert!(p_peak > b.p_min && p_peak < r.minima[0], "peak at {p_peak}");
}

#[test]
fn forbidden_region_is_empty() {
    let s = cache().spectrum(0.0).unwrap();
    assert!(s.value_at(3.0) <= 1e-6 * s.peak());
}

#[test]
fn mass_stays_near_the_classical_band() {
    let kappa = baseline().kappa;
    for k in linspace(-1.0, 1.0, 9) {
        let s = cache().spectrum(k).unwrap().normalized().unwrap();
        let b = classical_boundaries(P0, &baseline(), k).unwrap();
        let inside = s.integral_between(b.p_min - 3.0 * kappa, b.p_line_hi + 3.0 * kappa);
        assert!(inside >= 0.99, "k={k}: {inside}");
    }
}

#[test]
fn single_trajectory_triangles_carry_no_fringes() {
    // Edge ripples decay over a few decay constants, as the evanescent tails do.
    let margin = 3.0 * baseline().kappa;
    for k in [0.5, 0.75, 1.0] {
        let s = cache().spectrum(k).unwrap();
        let b = classical_boundaries(P0, &baseline(), k).unwrap();
        let lo = b.p_line_lo.max(b.p_min) + margin;
        let hi = b.p_line_hi.min(*s.p_grid().last().unwrap()) - margin;
        // A single broad hump is the one-path envelope; a fringe needs a
        // minimum next to a maximum.
        let extrema = find_extrema(&s, (lo, hi), PROMINENCE);
        assert!(extrema.len() < 2, "k={k}: {extrema:?}");
    }
}

#[test]
fn fringe_count_matches_semiclassical() {
    let s = cache().spectrum(0.0).unwrap();
    let region = default_region(P0, &baseline()).unwrap();
    let quantum = extract_fringes(&s, region).unwrap().minima.len() as i64;
    let classical = predicted_fringe_momenta(P0, &baseline(), 0.0).len() as i64;
    assert!((quantum - classical).abs() <= 1, "{quantum} vs {classical}");
}

#[test]
fn no_recoil_reduces_to_k_zero() {
    let mut oc = cache().overlap_config().clone();
    oc.recoil = RecoilModel::NONE;
    let avg = averaged_spectrum(P0, &baseline(), &oc).unwrap();
    let direct = cache().spectrum(0.0).unwrap().normalized().unwrap();
    assert!(sup_diff(&avg, &direct) <= 1e-12 * direct.peak());
}

#[test]
fn averaging_keeps_minima_in_place() {
    let region = default_region(P0, &baseline()).unwrap();
    let bare = extract_fringes(&cache().spectrum(0.0).unwrap(), region).unwrap();
    let avg = extract_fringes(&cache().averaged().unwrap(), region).unwrap();
    let half = 0.5 * bare.mean_spacing.unwrap();
    assert_eq!(bare.minima.len(), avg.minima.len());
    for (a, b) in bare.minima.iter().zip(&avg.minima) {
        assert!((a - b).abs() < half, "{a} vs {b}");
    }
}

#[test]
fn recoil_quadrature_converges() {
    let oc = cache().overlap_config();
    let coarse = cache().averaged().unwrap();
    let fine = cache().averaged_with(&oc.recoil, 2 * oc.k_nodes - 1).unwrap();
    let d = sup_diff(&coarse, &fine);
    assert!(d < 1e-4, "{d}");
}

#[test]
fn window_robustness() {
    let base = cache().averaged().unwrap();
    let wide = averaged_spectrum(P0, &baseline(), &cache().overlap_config().widened(0.5)).unwrap();
    let d = sup_diff(&base, &wide);
    assert!(d < 1e-5, "{d}");
}

#[test]
fn quadrature_error_estimate_is_small() {
    let s = cache().spectrum(0.5).unwrap();
    assert!(s.meta.settings["estimated_relative_error"] < 1e-6);
}

#[test]
fn undersized_window_is_rejected() {
    let mut oc = OverlapConfig::defaults(P0, &baseline());
    oc.z_min += 10.0;
    assert!(matches!(
        OverlapCache::build(P0, &baseline(), &oc),
        Err(ewi_core::Error::InvalidConfig(_))
    ));
}
