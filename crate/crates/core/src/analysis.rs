//! Fringe extraction and cross-route comparison of momentum distributions.

use serde::Serialize;

use crate::config::PotentialConfig;
use crate::distribution::{trapezoid, MomentumDistribution, NormConvention};
use crate::error::{domain, Error, Result};
use crate::stationary::classical_boundaries;

/// Extrema shallower than this fraction of the global peak are noise.
pub const PROMINENCE: f64 = 1e-3;
/// Half-width, in grid points, of the quadratic fit around an extremum.
const FIT_HALF_WIDTH: usize = 2;
/// Smallest fraction of the first grid that the second must cover.
const MIN_OVERLAP: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extremum {
    pub p: f64,
    pub density: f64,
    pub is_max: bool,
}

/// Visibility of one adjacent maximum/minimum pair, located at the midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairVisibility {
    pub p: f64,
    pub visibility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeReport {
    pub minima: Vec<f64>,
    pub maxima: Vec<f64>,
    /// Mean distance between consecutive minima, or maxima when fewer than
    /// two minima were found.
    pub mean_spacing: Option<f64>,
    /// Mean of the per-pair visibilities; zero for an empty report.
    pub visibility: f64,
    pub pairs: Vec<PairVisibility>,
    pub region: (f64, f64),
    /// Alternating extrema in increasing `p`.
    pub extrema: Vec<Extremum>,
}

impl FringeReport {
    fn empty(region: (f64, f64)) -> Self {
        Self {
            minima: Vec::new(),
            maxima: Vec::new(),
            mean_spacing: None,
            visibility: 0.0,
            pairs: Vec::new(),
            region,
            extrema: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.extrema.is_empty()
    }

    /// Distances between consecutive minima, in increasing `p`.
    pub fn spacings(&self) -> Vec<f64> {
        self.minima.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

/// Analysis window excluding the single-trajectory triangles at `k = 0`.
pub fn default_region(p0: f64, config: &PotentialConfig) -> Result<(f64, f64)> {
    Ok((classical_boundaries(p0, config, 0.0)?.p_min, p0))
}

fn grid_range(dist: &MomentumDistribution) -> (f64, f64) {
    let p = dist.p_grid();
    (p[0], p[p.len() - 1])
}

/// Locates fringe extrema in `region` and summarizes spacing and visibility.
pub fn extract_fringes(dist: &MomentumDistribution, region: (f64, f64)) -> Result<FringeReport> {
    let (lo, hi) = region;
    let (g_lo, g_hi) = grid_range(dist);
    if !(lo < hi && lo >= g_lo && hi <= g_hi) {
        return Err(domain(
            "extract_fringes",
            format!("region [{lo}, {hi}] must be a non-empty interval inside the grid [{g_lo}, {g_hi}]"),
        ));
    }
    let extrema = find_extrema(dist, region, PROMINENCE);
    if extrema.len() < 2 {
        return Ok(FringeReport::empty(region));
    }
    let minima: Vec<f64> = extrema.iter().filter(|e| !e.is_max).map(|e| e.p).collect();
    let maxima: Vec<f64> = extrema.iter().filter(|e| e.is_max).map(|e| e.p).collect();
    let mean_spacing = mean_gap(&minima).or_else(|| mean_gap(&maxima));
    let pairs: Vec<PairVisibility> = extrema
        .windows(2)
        .map(|w| {
            let (top, bottom) = if w[0].is_max { (w[0], w[1]) } else { (w[1], w[0]) };
            let sum = top.density + bottom.density;
            let visibility = if sum > 0.0 { ((top.density - bottom.density) / sum).clamp(0.0, 1.0) } else { 0.0 };
            PairVisibility {
                p: 0.5 * (w[0].p + w[1].p),
                visibility,
            }
        })
        .collect();
    let visibility = pairs.iter().map(|v| v.visibility).sum::<f64>() / pairs.len() as f64;
    Ok(FringeReport {
        minima,
        maxima,
        mean_spacing,
        visibility,
        pairs,
        region,
        extrema,
    })
}

/// Alternating extrema strictly inside `region` whose rise and fall both
/// exceed `prominence` times the global peak, refined by a local parabola.
pub fn find_extrema(dist: &MomentumDistribution, region: (f64, f64), prominence: f64) -> Vec<Extremum> {
    let p = dist.p_grid();
    let d = dist.density();
    let start = p.partition_point(|&x| x < region.0);
    let end = p.partition_point(|&x| x <= region.1);
    if end < start + 3 {
        return Vec::new();
    }
    zigzag(&d[start..end], prominence * dist.peak())
        .into_iter()
        .map(|(i, is_max)| refine(p, d, start + i, is_max))
        .collect()
}

fn mean_gap(x: &[f64]) -> Option<f64> {
    (x.len() >= 2).then(|| (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64)
}

/// Alternating extrema whose rise and fall both exceed `threshold`.
/// Returns `(index, is_max)`; the ends of the slice are never reported.
fn zigzag(d: &[f64], threshold: f64) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    let (mut lo, mut hi) = (0, 0);
    let mut rising: Option<bool> = None;
    let mut cand = 0;
    for i in 1..d.len() {
        match rising {
            None => {
                if d[i] > d[hi] {
                    hi = i;
                }
                if d[i] < d[lo] {
                    lo = i;
                }
                if d[i] > d[lo] + threshold {
                    if lo > 0 {
                        out.push((lo, false));
                    }
                    rising = Some(true);
                    cand = i;
                } else if d[i] < d[hi] - threshold {
                    if hi > 0 {
                        out.push((hi, true));
                    }
                    rising = Some(false);
                    cand = i;
                }
            }
            Some(true) => {
                if d[i] >= d[cand] {
                    cand = i;
                } else if d[cand] - d[i] > threshold {
                    out.push((cand, true));
                    rising = Some(false);
                    cand = i;
                }
            }
            Some(false) => {
                if d[i] <= d[cand] {
                    cand = i;
                } else if d[i] - d[cand] > threshold {
                    out.push((cand, false));
                    rising = Some(true);
                    cand = i;
                }
            }
        }
    }
    out
}

/// Least-squares parabola through the points around `i`; the vertex is kept
/// only if it stays within the fit window.
fn refine(p: &[f64], d: &[f64], i: usize, is_max: bool) -> Extremum {
    let fallback = Extremum {
        p: p[i],
        density: d[i],
        is_max,
    };
    let a = i.saturating_sub(FIT_HALF_WIDTH);
    let b = (i + FIT_HALF_WIDTH).min(p.len() - 1);
    if b - a < 2 {
        return fallback;
    }
    // Moments in local coordinates x = p − p_i.
    let mut s = [0.0; 5];
    let mut t = [0.0; 3];
    for j in a..=b {
        let x = p[j] - p[i];
        let mut xp = 1.0;
        for (k, sk) in s.iter_mut().enumerate() {
            *sk += xp;
            if k < 3 {
                t[k] += xp * d[j];
            }
            xp *= x;
        }
    }
    // Normal equations for d ≈ c0 + c1 x + c2 x².
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let Some([c0, c1, c2]) = solve3(m, t) else {
        return fallback;
    };
    if c2 == 0.0 || (c2 < 0.0) != is_max {
        return fallback;
    }
    let x = -c1 / (2.0 * c2);
    if x < p[a] - p[i] || x > p[b] - p[i] {
        return fallback;
    }
    Extremum {
        p: p[i] + x,
        density: (c0 + x * (c1 + x * c2)).max(0.0),
        is_max,
    }
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cramer's rule; `None` for a singular system.
fn solve3(m: [[f64; 3]; 3], rhs: [f64; 3]) -> Option<[f64; 3]> {
    let det = det3(&m);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *o = det3(&mc) / det;
    }
    Some(out)
}

/// Convolution with a Gaussian of standard deviation `width_steps` grid
/// steps, truncated at four deviations and renormalized at the ends.
pub fn smooth(dist: &MomentumDistribution, width_steps: f64) -> Result<MomentumDistribution> {
    if !(width_steps > 0.0 && width_steps.is_finite()) {
        return Err(domain("smooth", format!("width must be positive (got {width_steps})")));
    }
    let d = dist.density();
    let reach = (4.0 * width_steps).ceil() as usize;
    let kernel: Vec<f64> = (0..=reach)
        .map(|j| (-0.5 * (j as f64 / width_steps).powi(2)).exp())
        .collect();
    let n = d.len();
    let out = (0..n)
        .map(|i| {
            let (mut acc, mut norm) = (0.0, 0.0);
            for j in i.saturating_sub(reach)..=(i + reach).min(n - 1) {
                let w = kernel[i.abs_diff(j)];
                acc += w * d[j];
                norm += w;
            }
            acc / norm
        })
        .collect();
    let smoothed = MomentumDistribution::new(dist.p_grid().to_vec(), out, dist.meta.clone())?;
    match dist.norm_convention() {
        NormConvention::UnitIntegral => smoothed.normalized(),
        NormConvention::Raw => Ok(smoothed),
    }
}

/// Four-point Lagrange interpolation of `dist` at `x`; zero outside its grid.
pub fn resample_at(dist: &MomentumDistribution, x: f64) -> f64 {
    let p = dist.p_grid();
    let d = dist.density();
    let n = p.len();
    if x < p[0] || x > p[n - 1] {
        return 0.0;
    }
    let i = p.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
    if p[i] == x {
        return d[i];
    }
    if n < 4 {
        return dist.value_at(x);
    }
    let a = i.saturating_sub(1).min(n - 4);
    let mut sum = 0.0;
    for j in a..a + 4 {
        let mut w = 1.0;
        for m in a..a + 4 {
            if m != j {
                w *= (x - p[m]) / (p[j] - p[m]);
            }
        }
        sum += w * d[j];
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteComparison {
    /// `∫|a − b| dp` over the grid of `a`, in `[0, 2]`.
    pub l1: f64,
    /// Mean absolute displacement of mutually nearest minima; `None` when
    /// no pair matches.
    pub minima_shift: Option<f64>,
    pub matched: usize,
    pub region: (f64, f64),
}

/// Compares two unit-integral spectra on the grid of `a`, matching fringe
/// minima over the common grid range.
pub fn compare_routes(a: &MomentumDistribution, b: &MomentumDistribution) -> Result<RouteComparison> {
    let (a_lo, a_hi) = grid_range(a);
    let (b_lo, b_hi) = grid_range(b);
    compare_routes_in(a, b, (a_lo.max(b_lo), a_hi.min(b_hi)))
}

/// As [`compare_routes`], with fringe minima taken from `region` only.
pub fn compare_routes_in(
    a: &MomentumDistribution,
    b: &MomentumDistribution,
    region: (f64, f64),
) -> Result<RouteComparison> {
    for (name, dist) in [("a", a), ("b", b)] {
        if dist.norm_convention() != NormConvention::UnitIntegral {
            return Err(Error::Distribution(format!("spectrum {name} must be normalized to unit integral")));
        }
    }
    let (a_lo, a_hi) = grid_range(a);
    let (b_lo, b_hi) = grid_range(b);
    let overlap = ((a_hi.min(b_hi) - a_lo.max(b_lo)) / (a_hi - a_lo)).max(0.0);
    if overlap < MIN_OVERLAP {
        return Err(Error::GridMismatch { overlap });
    }
    let diff: Vec<f64> = a
        .p_grid()
        .iter()
        .zip(a.density())
        .map(|(&p, &da)| (da - resample_at(b, p)).abs())
        .collect();
    let l1 = trapezoid(a.p_grid(), &diff);

    let fa = extract_fringes(a, region)?;
    let fb = extract_fringes(b, region)?;
    let pairs = mutual_nearest(&fa.minima, &fb.minima);
    let minima_shift =
        (!pairs.is_empty()).then(|| pairs.iter().map(|&(x, y)| (x - y).abs()).sum::<f64>() / pairs.len() as f64);
    Ok(RouteComparison {
        l1,
        minima_shift,
        matched: pairs.len(),
        region,
    })
}

fn nearest(x: f64, ys: &[f64]) -> Option<usize> {
    (0..ys.len()).min_by(|&i, &j| (ys[i] - x).abs().total_cmp(&(ys[j] - x).abs()))
}

/// Pairs `(x, y)` where each is the other's nearest neighbour.
pub fn mutual_nearest(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter()
        .enumerate()
        .filter_map(|(i, &x)| {
            let j = nearest(x, ys)?;
            (nearest(ys[j], xs) == Some(i)).then_some((x, ys[j]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::distribution::{linspace, SpectrumMeta};

    fn dist(p: Vec<f64>, d: Vec<f64>) -> MomentumDistribution {
        MomentumDistribution::new(p, d, SpectrumMeta::synthetic()).unwrap()
    }

    fn cosine(period: f64, shift: f64) -> MomentumDistribution {
        let p = linspace(0.0, 3.0, 601);
        let d = p.iter().map(|x| 1.0 + 0.8 * (2.0 * PI * (x - shift) / period).cos()).collect();
        dist(p, d)
    }

    #[test]
    fn cosine_spacing_and_visibility() {
        let r = extract_fringes(&cosine(0.37, 0.0), (0.1, 2.9)).unwrap();
        assert!((r.mean_spacing.unwrap() - 0.37).abs() < 0.005);
        assert!((r.visibility - 0.8).abs() < 1e-3, "{}", r.visibility);
        for w in r.extrema.windows(2) {
            assert_ne!(w[0].is_max, w[1].is_max);
        }
        for m in &r.minima {
            let n = (m - 0.185) / 0.37;
            assert!((n - n.round()).abs() < 1e-3, "{m}");
        }
    }

    #[test]
    fn monotone_density_is_empty() {
        let p = linspace(0.0, 1.0, 101);
        let d = p.iter().map(|x| x * x).collect();
        let r = extract_fringes(&dist(p, d), (0.0, 1.0)).unwrap();
        assert!(r.is_empty() && r.minima.is_empty() && r.maxima.is_empty());
        assert_eq!(r.mean_spacing, None);
    }

    #[test]
    fn shallow_ripples_are_ignored() {
        let p = linspace(0.0, 1.0, 401);
        let d = p.iter().map(|x| 1.0 + x + 1e-5 * (60.0 * x).sin()).collect();
        assert!(extract_fringes(&dist(p, d), (0.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn rescaling_invariance() {
        let a = cosine(0.5, 0.1);
        let b = dist(a.p_grid().to_vec(), a.density().iter().map(|d| d * 1e7).collect());
        let ra = extract_fringes(&a, (0.2, 2.8)).unwrap();
        let rb = extract_fringes(&b, (0.2, 2.8)).unwrap();
        assert_eq!(ra.minima, rb.minima);
        assert!((ra.visibility - rb.visibility).abs() < 1e-12);
    }

    #[test]
    fn region_must_lie_in_grid() {
        assert!(extract_fringes(&cosine(0.5, 0.0), (-0.1, 1.0)).is_err());
        assert!(extract_fringes(&cosine(0.5, 0.0), (1.0, 1.0)).is_err());
    }

    #[test]
    fn smoothing_keeps_minima() {
        let a = cosine(0.4, 0.03);
        let s = smooth(&a, 1.0).unwrap();
        let ra = extract_fringes(&a, (0.1, 2.9)).unwrap();
        let rs = extract_fringes(&s, (0.1, 2.9)).unwrap();
        assert_eq!(ra.minima.len(), rs.minima.len());
        let step = a.p_grid()[1] - a.p_grid()[0];
        for (x, y) in ra.minima.iter().zip(&rs.minima) {
            assert!((x - y).abs() < 0.1 * step);
        }
    }

    #[test]
    fn identical_spectra_compare_to_zero() {
        let a = cosine(0.3, 0.0).normalized().unwrap();
        let c = compare_routes(&a, &a).unwrap();
        assert_eq!(c.l1, 0.0);
        assert_eq!(c.minima_shift, Some(0.0));
    }

    #[test]
    fn one_step_shift_is_detected() {
        let step = 3.0 / 600.0;
        let a = cosine(0.3, 0.0).normalized().unwrap();
        let b = cosine(0.3, step).normalized().unwrap();
        let c = compare_routes_in(&a, &b, (0.2, 2.8)).unwrap();
        assert!((c.minima_shift.unwrap() - step).abs() < 0.05 * step);
        assert!(c.l1 > 0.0 && c.l1 <= 2.0);
    }

    #[test]
    fn resampling_is_idempotent_on_aligned_grids() {
        let a = cosine(0.3, 0.1);
        for (p, d) in a.p_grid().iter().zip(a.density()) {
            assert!((resample_at(&a, *p) - d).abs() <= 1e-10 * d.abs());
        }
    }

    #[test]
    fn resampling_is_cubic_exact() {
        let p = linspace(0.0, 2.0, 21);
        let d = p.iter().map(|x| 1.0 + x * x * x).collect();
        let a = dist(p, d);
        for x in [0.013, 0.77, 1.999] {
            assert!((resample_at(&a, x) - (1.0 + x * x * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_grids_are_rejected() {
        let a = cosine(0.3, 0.0).normalized().unwrap();
        let p = linspace(1.0, 4.0, 301);
        let d = p.iter().map(|x| 1.0 + 0.5 * x).collect();
        let b = dist(p, d).normalized().unwrap();
        assert!(matches!(compare_routes(&a, &b), Err(Error::GridMismatch { .. })));
        let raw = cosine(0.3, 0.0);
        assert!(matches!(compare_routes(&raw, &a), Err(Error::Distribution(_))));
    }
}
