//! Spontaneous-emission dynamics of a V-type three-level atom in free space
//! and in an isotropic photonic band gap, with the information-theoretic
//! diagnostics evaluated along the evolution.

pub mod error;
pub mod free;
pub mod metrology;
pub mod numerics;
pub mod oracle;
pub mod pbg;
pub mod propagator;
pub mod quantumness;
pub mod state;

pub use error::{Error, Result};
pub use propagator::{Propagator, PropagatorSource};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
