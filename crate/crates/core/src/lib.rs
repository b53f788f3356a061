//! Numerical toolkit for boundary cocycles of rank-one and `SL(3, ℝ)` spaces.

pub mod certifier;
pub mod cochain;
pub mod error;
pub mod flags;
pub mod hyperbolic_boundary;
pub mod projective;
pub mod reports;
pub mod rng;
pub mod sampling;
pub mod volume;

pub use error::{Error, Result};
