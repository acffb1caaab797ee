//! Numerical laboratory for random complete intersections in the complex
//! torus: Kostlan and toric polynomial ensembles, coamoeba fiber counting via
//! homotopy continuation, Newton-polytope mixed volumes, amoeba rasters and
//! Monte Carlo estimators for expected multivolumes.

pub mod amoeba;
pub mod error;
pub mod experiments;
pub mod fiber;
pub mod jacobian;
pub mod poly;
pub mod polytope;
pub mod rng;
pub mod sampler;
pub mod solve;
pub mod univariate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
