//! Screening experiments: design construction, analysis and variable
//! selection for deterministic and stochastic simulators.

pub mod bench;
pub mod design;
pub mod ee;
pub mod error;
pub mod factorial;
pub mod gp;
pub mod group;
pub mod rng;
pub mod shrinkage;
pub mod space_filling;
pub mod ssd;

pub use design::{Coding, Design, Provenance};
pub use error::{Error, Result};
