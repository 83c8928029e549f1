//! Line-of-sight coverage of roadside units (RSUs) and vehicle relays on a
//! Poisson road network.
//!
//! Roads are lines of an isotropic Poisson line process, RSUs and vehicles
//! are Poisson points on those lines, and every transmitter sees along its
//! road up to exponential blockage distances on each side. The crate
//! computes the mean area fraction of the resulting LOS coverage three ways:
//!
//! * closed forms ([`analytic::theorem1_area_fraction`] and friends),
//! * deterministic quadrature for RSU-plus-relay coverage
//!   ([`analytic::theorem2_area_fraction`]),
//! * seeded Monte Carlo over sampled scenes ([`montecarlo`]).
//!
//! Lengths are meters and intensities are per meter throughout.

pub mod analytic;
pub mod cli;
pub mod coverage;
pub mod geometry;
pub mod montecarlo;
pub mod sampling;

pub use analytic::{AreaFraction, QuadratureSettings};
pub use coverage::{RelayMode, Scene};
pub use geometry::{CoverageRect, Line, Point};
pub use montecarlo::{CoverageEstimate, SimulationConfig};
pub use sampling::{RandomSeed, ScenarioParams};
