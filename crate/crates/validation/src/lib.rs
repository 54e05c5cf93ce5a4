//! Reference tables, property suites and modified-function regressions used
//! to validate screenkit. Every suite returns `Err` with a description on
//! the first violation so it can be run from tests or from the acceptance
//! harness alike.

pub mod golden;
pub mod properties;
pub mod regressions;

/// Outcome of a suite: `Ok` or the first violation found.
pub type Check = Result<(), String>;

/// Turns a boolean into a [`Check`].
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
