//! Periodized q-Whittaker particle dynamics on the discrete torus.
//!
//! The crate builds interlaced particle configurations on an `L x N` torus,
//! evaluates their q-Whittaker Gibbs weights, runs the continuous-time
//! dynamics and checks exact stationarity and its supporting identities.

pub mod cli;
pub mod dynamics;
pub mod enumeration;
pub mod error;
pub mod gibbs;
pub mod lattice;
pub mod scalar;
pub mod verification;

pub use error::{Error, Result};
pub use gibbs::GibbsParams;
pub use lattice::{Configuration, ParticleRef, Sector, Torus};
pub use scalar::{ratio, Rational, Scalar};
