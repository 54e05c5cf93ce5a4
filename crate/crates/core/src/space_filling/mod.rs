//! Latin hypercube samples, space-filling criteria and Morris trajectory
//! plans on the unit cube.

mod criteria;
mod lhs;
mod morris;
mod optimize;

pub use criteria::{maxpro, phi_q};
pub use lhs::{is_latin_hypercube, lhs_oa, lhs_random, Jitter};
pub use morris::{default_delta, morris_plan, MorrisMeta, MorrisPlan};
pub use optimize::{lhs_optimize, Objective, Schedule};
