//! Scenario files: one TOML document per run, unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use ewi_core::{PotentialConfig, RecoilKind, RecoilModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RouteName {
    Semiclassical,
    Stationary,
    Wavepacket,
    Compare,
}

impl RouteName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Semiclassical => "semiclassical",
            Self::Stationary => "stationary",
            Self::Wavepacket => "wavepacket",
            Self::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Route the file was written for; must match the subcommand if given.
    pub route: Option<RouteName>,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub recoil: Recoil,
    #[serde(default)]
    pub momentum: Momentum,
    #[serde(default)]
    pub wavepacket: Wavepacket,
    #[serde(default)]
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub p0: f64,
    pub v1: f64,
    pub kappa: f64,
    pub beta: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            p0: 2.0,
            v1: 50.0,
            kappa: 0.125,
            beta: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Recoil {
    /// `none`, `isotropic` or `dipole`.
    pub kind: String,
    /// Recoil quadrature nodes; the route default when absent.
    pub k_nodes: Option<usize>,
    /// Recoil components for k-resolved output; empty for the average.
    pub sweep: Vec<f64>,
}

impl Default for Recoil {
    fn default() -> Self {
        Self {
            kind: "isotropic".into(),
            k_nodes: None,
            sweep: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Momentum {
    /// Output momenta shared by every route; the default grid when absent.
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub p_points: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Wavepacket {
    pub sigma_z: f64,
    pub t_end: f64,
    pub tau_nodes: Option<usize>,
    pub dt: Option<f64>,
    /// Monte-Carlo samples; zero selects the deterministic quadrature.
    pub samples: usize,
    pub seed: u64,
}

impl Default for Wavepacket {
    fn default() -> Self {
        Self {
            sigma_z: 8.0,
            t_end: 70.0,
            tau_nodes: None,
            dt: None,
            samples: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
    pub plot: bool,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            plot: true,
        }
    }
}

/// Command-line values that replace scenario entries.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub p0: Option<f64>,
    pub kappa: Option<f64>,
    pub beta: Option<f64>,
    pub recoil: Option<String>,
    pub k_nodes: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// Failure to obtain a valid scenario.
#[derive(Debug)]
pub enum ScenarioError {
    Io(String),
    Parse(String),
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.p0 {
            self.physics.p0 = v;
        }
        if let Some(v) = o.kappa {
            self.physics.kappa = v;
        }
        if let Some(v) = o.beta {
            self.physics.beta = v;
        }
        if let Some(v) = &o.recoil {
            self.recoil.kind = v.clone();
        }
        if let Some(v) = o.k_nodes {
            self.recoil.k_nodes = Some(v);
        }
        if let Some(v) = &o.out {
            self.output.dir = v.clone();
        }
        if let Some(v) = o.seed {
            self.wavepacket.seed = v;
        }
    }

    /// Every violated invariant for running `route`.
    pub fn violations(&self, route: RouteName) -> Vec<String> {
        let mut v = Vec::new();
        if let Some(r) = self.route {
            if r != route {
                v.push(format!("scenario is for route {} but {} was requested", r.as_str(), route.as_str()));
            }
        }
        let p = &self.physics;
        if !(p.p0.is_finite() && p.p0 > 0.0) {
            v.push(format!("p0 must be positive and finite (got {})", p.p0));
        }
        v.extend(PotentialConfig { v1: p.v1, kappa: p.kappa, beta: p.beta }.violations());
        if let Err(ewi_core::Error::InvalidConfig(e)) = self.recoil.kind.parse::<RecoilKind>() {
            v.extend(e);
        }
        if self.recoil.k_nodes == Some(0) {
            v.push("recoil.k_nodes must be positive".into());
        }
        for &k in &self.recoil.sweep {
            if !(k.is_finite() && k.abs() <= 1.0) {
                v.push(format!("recoil.sweep entries must lie in [-1, 1] (got {k})"));
            }
        }
        let s = &self.momentum;
        if let (Some(lo), Some(hi)) = (s.p_min, s.p_max) {
            if !(lo > 0.0 && hi > lo) {
                v.push(format!("momentum grid needs 0 < p_min < p_max (got {lo}, {hi})"));
            }
        }
        if matches!(s.p_points, Some(n) if n < 2) {
            v.push("momentum.p_points must be at least 2".into());
        }
        let w = &self.wavepacket;
        if !(w.sigma_z.is_finite() && w.sigma_z > 0.0) {
            v.push(format!("wavepacket.sigma_z must be positive (got {})", w.sigma_z));
        }
        if !(w.t_end.is_finite() && w.t_end > 0.0) {
            v.push(format!("wavepacket.t_end must be positive (got {})", w.t_end));
        }
        if w.tau_nodes == Some(0) {
            v.push("wavepacket.tau_nodes must be positive".into());
        }
        if matches!(w.dt, Some(dt) if !(dt.is_finite() && dt > 0.0)) {
            v.push("wavepacket.dt must be positive".into());
        }
        v
    }

    pub fn potential(&self) -> PotentialConfig {
        PotentialConfig { v1: self.physics.v1, kappa: self.physics.kappa, beta: self.physics.beta }
    }

    pub fn recoil_model(&self) -> RecoilModel {
        RecoilModel::new(self.recoil.kind.parse().unwrap_or(RecoilKind::Isotropic))
    }
}
