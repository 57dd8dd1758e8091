//! Atom interferometer driven by a spontaneous Raman transition during
//! reflection from an evanescent-wave mirror.
//!
//! Three routes compute the final momentum distribution of the transferred
//! atoms: [`semiclassical`] phase-space areas, [`stationary`] eigenfunction
//! overlaps and [`wavepacket`] time-dependent propagation with quantum jumps.
//! [`analysis`] extracts and compares fringes. All quantities use the natural
//! units of [`units`].

pub mod analysis;
pub mod config;
pub mod distribution;
pub mod error;
pub mod quadrature;
pub mod recoil;
pub mod semiclassical;
pub mod specfun;
pub mod stationary;
pub mod units;
pub mod wavepacket;

pub use config::{IncidentState, InternalState, PotentialConfig};
pub use distribution::{MomentumDistribution, NormConvention, Route, SpectrumMeta};
pub use error::{Error, Result};
pub use recoil::{recoil_nodes, recoil_weight, sample_recoil, RecoilKind, RecoilModel};
pub use specfun::{besselk_imag, besselk_imag_scaled, stationary_norm, Scaled};
