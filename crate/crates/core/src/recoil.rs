//! Distribution of the z-component of the spontaneous-emission recoil.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::units::K0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoilKind {
    /// No recoil: a unit mass at `k = 0`.
    None,
    /// Isotropic emission, flat in `k` on `[−k0, k0]`.
    Isotropic,
    /// σ± dipole emission with quantization axis along z.
    Dipole,
}

impl std::str::FromStr for RecoilKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Self::None),
            "isotropic" => Ok(Self::Isotropic),
            "dipole" => Ok(Self::Dipole),
            other => Err(Error::InvalidConfig(vec![format!(
                "recoil must be one of none|isotropic|dipole (got {other:?})"
            )])),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoilModel {
    pub kind: RecoilKind,
    pub k0: f64,
}

impl RecoilModel {
    pub const NONE: Self = Self::new(RecoilKind::None);
    pub const ISOTROPIC: Self = Self::new(RecoilKind::Isotropic);
    pub const DIPOLE: Self = Self::new(RecoilKind::Dipole);

    pub const fn new(kind: RecoilKind) -> Self {
        Self { kind, k0: K0 }
    }

    /// Probability density of the recoil z-component `k`.
    ///
    /// For [`RecoilKind::None`] the distribution is a Dirac mass; the density
    /// is reported as zero everywhere and only [`recoil_nodes`] represents it.
    pub fn weight(&self, k: f64) -> f64 {
        recoil_weight(self, k)
    }
}

/// Density of the recoil z-component, normalized so that `∫ weight dk = 1`.
pub fn recoil_weight(model: &RecoilModel, k: f64) -> f64 {
    let k0 = model.k0;
    if k.abs() > k0 {
        return 0.0;
    }
    match model.kind {
        RecoilKind::None => 0.0,
        RecoilKind::Isotropic => 0.5 / k0,
        RecoilKind::Dipole => {
            let u = k / k0;
            3.0 / (16.0 * k0) * (3.0 - u * u)
        }
    }
}

/// Quadrature nodes `(k, weight)` for averaging over the recoil distribution.
///
/// Gauss–Legendre on `[−k0, k0]` with the recoil density folded into the
/// weights. `n` must be odd so that `k = 0` is a node and the recoil-free
/// spectrum is always a sub-case.
pub fn recoil_nodes(model: &RecoilModel, n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::InvalidConfig(vec![format!(
            "k_nodes must be odd and positive (got {n})"
        )]));
    }
    if model.kind == RecoilKind::None {
        return Ok(vec![(0.0, 1.0)]);
    }
    let (x, w) = gauss_legendre(n);
    let k0 = model.k0;
    let mut nodes: Vec<(f64, f64)> = x
        .iter()
        .zip(&w)
        .map(|(&t, &v)| {
            let k = t * k0;
            (k, v * k0 * recoil_weight(model, k))
        })
        .collect();
    // Exact for n ≥ 3; fixes the single-node dipole rule.
    let total: f64 = nodes.iter().map(|n| n.1).sum();
    for n in &mut nodes {
        n.1 /= total;
    }
    Ok(nodes)
}

/// Inverse cumulative distribution: maps `u ∈ [0, 1]` to a recoil `k`.
pub fn sample_recoil(model: &RecoilModel, u: f64) -> f64 {
    let k0 = model.k0;
    let u = u.clamp(0.0, 1.0);
    match model.kind {
        RecoilKind::None => 0.0,
        RecoilKind::Isotropic => k0 * (2.0 * u - 1.0),
        RecoilKind::Dipole => {
            // F(x) = (3/16)(3x − x³/3) + 1/2 for x = k/k0, monotone on [−1, 1].
            let cdf = |x: f64| 3.0 / 16.0 * (3.0 * x - x * x * x / 3.0) + 0.5;
            let (mut a, mut b) = (-1.0, 1.0);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if cdf(m) < u {
                    a = m;
                } else {
                    b = m;
                }
            }
            k0 * 0.5 * (a + b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frozen_weights() {
        assert_eq!(recoil_weight(&RecoilModel::ISOTROPIC, 0.3), 0.5);
        assert_eq!(recoil_weight(&RecoilModel::DIPOLE, 0.0), 0.5625);
        assert_eq!(recoil_weight(&RecoilModel::DIPOLE, 1.5), 0.0);
    }

    #[test]
    fn dipole_integrates_to_one() {
        // 2-point Gauss is exact for the quadratic density.
        let s: f64 = recoil_nodes(&RecoilModel::DIPOLE, 3).unwrap().iter().map(|n| n.1).sum();
        assert!((s - 1.0).abs() < 1e-14);
        // Analytic: (3/16)(6 − 2/3) = 1.
        assert!((3.0 / 16.0 * (6.0 - 2.0 / 3.0) - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn node_sets() {
        assert_eq!(recoil_nodes(&RecoilModel::NONE, 1).unwrap(), vec![(0.0, 1.0)]);
        let three = recoil_nodes(&RecoilModel::ISOTROPIC, 3).unwrap();
        assert_eq!(three.len(), 3);
        assert_eq!(three[1].0, 0.0);
        assert_eq!(three[0].0, -three[2].0);
        assert_eq!(three[0].1, three[2].1);
        let s: f64 = recoil_nodes(&RecoilModel::ISOTROPIC, 41).unwrap().iter().map(|n| n.1).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!(recoil_nodes(&RecoilModel::ISOTROPIC, 4).is_err());
        assert!(recoil_nodes(&RecoilModel::NONE, 2).is_err());
    }

    #[test]
    fn sampling_inverts_the_distribution() {
        assert_eq!(sample_recoil(&RecoilModel::NONE, 0.3), 0.0);
        assert_eq!(sample_recoil(&RecoilModel::ISOTROPIC, 0.75), 0.5);
        assert!(sample_recoil(&RecoilModel::DIPOLE, 0.5).abs() < 1e-15);
        assert!((sample_recoil(&RecoilModel::DIPOLE, 1.0) - 1.0).abs() < 1e-15);
        // Mass below k = 0.5: (3/16)(1.5 − 1/24) + 1/2.
        let u = 3.0 / 16.0 * (1.5 - 1.0 / 24.0) + 0.5;
        assert!((sample_recoil(&RecoilModel::DIPOLE, u) - 0.5).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn weight_is_even(k in -2.0f64..2.0) {
            for m in [RecoilModel::NONE, RecoilModel::ISOTROPIC, RecoilModel::DIPOLE] {
                prop_assert_eq!(recoil_weight(&m, k), recoil_weight(&m, -k));
                prop_assert!(recoil_weight(&m, k) >= 0.0);
            }
        }

        #[test]
        fn nodes_are_symmetric(half in 0usize..30) {
            let n = 2 * half + 1;
            for m in [RecoilModel::ISOTROPIC, RecoilModel::DIPOLE] {
                let nodes = recoil_nodes(&m, n).unwrap();
                for i in 0..n {
                    let (k, w) = nodes[i];
                    let (km, wm) = nodes[n - 1 - i];
                    prop_assert_eq!(k, -km);
                    prop_assert!((w - wm).abs() <= 1e-15 * w.abs());
                }
                let s: f64 = nodes.iter().map(|p| p.1).sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }
}
