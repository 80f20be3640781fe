//! Scalar Volkov states in plane-wave laser pulses.

pub mod config;
pub mod error;
pub mod kgproduct;
pub mod lightcone;
pub mod oscillatory;
pub mod propsmat;
pub mod pulse;
pub mod quadrature;
pub mod suites;
pub mod volkov;

pub use error::{Error, Result};
pub use lightcone::{FourVector, LightConeCoords, OnShellMomentum, PropagationGeometry, Vec3};
pub use pulse::{Branch, LongitudinalProfile, Particle, PhaseAccumulator, PulseModel, PulseShape};
