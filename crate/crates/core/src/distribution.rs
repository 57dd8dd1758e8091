use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::PotentialConfig;
use crate::error::{Error, Result};
use crate::recoil::RecoilModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormConvention {
    /// Trapezoid integral over the grid equals one.
    UnitIntegral,
    /// Arbitrary overall scale.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Stationary,
    Wavepacket,
    Synthetic,
}

/// Configuration that produced a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    pub route: Route,
    pub potential: Option<PotentialConfig>,
    pub p0: Option<f64>,
    pub recoil: Option<RecoilModel>,
    /// Fixed recoil component for a k-resolved spectrum.
    pub k: Option<f64>,
    /// Resolved numerical settings, by name.
    pub settings: BTreeMap<String, f64>,
}

impl SpectrumMeta {
    pub fn synthetic() -> Self {
        Self {
            route: Route::Synthetic,
            potential: None,
            p0: None,
            recoil: None,
            k: None,
            settings: BTreeMap::new(),
        }
    }
}

/// Sampled momentum density `|φ(p)|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumDistribution {
    p_grid: Vec<f64>,
    density: Vec<f64>,
    norm: NormConvention,
    pub meta: SpectrumMeta,
}

impl MomentumDistribution {
    /// Builds a raw distribution, rejecting negative or non-finite densities and
    /// grids that are not strictly increasing.
    pub fn new(p_grid: Vec<f64>, density: Vec<f64>, meta: SpectrumMeta) -> Result<Self> {
        if p_grid.len() != density.len() {
            return Err(Error::Distribution(format!(
                "grid has {} points but density has {}",
                p_grid.len(),
                density.len()
            )));
        }
        if p_grid.len() < 2 {
            return Err(Error::Distribution("need at least two grid points".into()));
        }
        if let Some(i) = p_grid.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Distribution(format!(
                "grid not strictly increasing at index {}",
                i + 1
            )));
        }
        if let Some(i) = density.iter().position(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::Distribution(format!(
                "density[{i}] = {} is negative or not finite",
                density[i]
            )));
        }
        Ok(Self {
            p_grid,
            density,
            norm: NormConvention::Raw,
            meta,
        })
    }

    pub fn p_grid(&self) -> &[f64] {
        &self.p_grid
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn norm_convention(&self) -> NormConvention {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.p_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_grid.is_empty()
    }

    /// Trapezoid integral of the density over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.p_grid, &self.density)
    }

    /// Trapezoid integral over the grid points inside `[lo, hi]`.
    pub fn integral_between(&self, lo: f64, hi: f64) -> f64 {
        let a = self.p_grid.partition_point(|&x| x < lo);
        let b = self.p_grid.partition_point(|&x| x <= hi);
        if b <= a {
            return 0.0;
        }
        trapezoid(&self.p_grid[a..b], &self.density[a..b])
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }

    /// Rescales to unit trapezoid integral.
    pub fn normalized(mut self) -> Result<Self> {
        let total = self.integral();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Distribution(format!(
                "cannot normalize distribution with integral {total}"
            )));
        }
        for d in &mut self.density {
            *d /= total;
        }
        self.norm = NormConvention::UnitIntegral;
        Ok(self)
    }

    /// Linear interpolation of the density; zero outside the grid.
    pub fn value_at(&self, p: f64) -> f64 {
        let g = &self.p_grid;
        if p < g[0] || p > g[g.len() - 1] {
            return 0.0;
        }
        let i = g.partition_point(|&x| x <= p).min(g.len() - 1).max(1);
        let t = (p - g[i - 1]) / (g[i] - g[i - 1]);
        self.density[i - 1] * (1.0 - t) + self.density[i] * t
    }
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// `n` equally spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
