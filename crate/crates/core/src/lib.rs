//! Euler–Maruyama simulation of SDEs whose drift is discontinuous along a
//! hypersurface, together with the transformation that removes the
//! discontinuity and the Monte Carlo studies used to measure strong
//! convergence rates.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
