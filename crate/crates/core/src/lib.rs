//! Reflected Brownian motion in a half-plane with oblique reflection:
//! transforms, densities, asymptotics, Martin kernel limits and simulation.

pub mod asympt;
pub mod boundary;
pub mod error;
pub mod green;
pub mod martin;
pub mod mc;
pub mod model;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use model::{DriftSign, KernelGeometry, ModelParams, NormalizedModel};
pub use num_complex;
