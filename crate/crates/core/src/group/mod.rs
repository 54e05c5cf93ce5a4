//! Group screening: two-stage factorial group screening, sequential
//! bifurcation and iterated fractional factorial designs, all driven by an
//! [`Oracle`].

mod bifurcation;
pub mod designs;
mod iffd;
mod oracle;
mod two_stage;

pub use bifurcation::{sequential_bifurcation, SbOptions, SbResult, SbStep};
pub use iffd::{iffd, IffdOptions, IffdResult};
pub use oracle::Oracle;
pub use two_stage::{group_screen, DecisionRule, EffectDecision, GsRun, StageOneMode};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// A partition of d variables into g nonempty groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grouping {
    assignment: Vec<usize>,
    g: usize,
}

impl Grouping {
    /// `assignment[v]` is the group of variable v; groups are 0..g and each
    /// must be used.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let g = assignment.iter().max().map_or(0, |m| m + 1);
        if g == 0 {
            return Err(Error::InvalidArgument("grouping needs at least one variable".into()));
        }
        if let Some(k) = (0..g).find(|k| !assignment.contains(k)) {
            return Err(Error::InvalidArgument(format!("group {} is empty", k + 1)));
        }
        Ok(Self { assignment, g })
    }

    /// Consecutive blocks of near-equal size, larger blocks first.
    pub fn contiguous(d: usize, g: usize) -> Result<Self> {
        if g == 0 || g > d {
            return Err(Error::InvalidArgument(format!("need 1 <= g <= d, got g = {g}, d = {d}")));
        }
        let base = d / g;
        let extra = d % g;
        let mut assignment = Vec::with_capacity(d);
        for k in 0..g {
            let size = base + usize::from(k < extra);
            assignment.extend(std::iter::repeat(k).take(size));
        }
        Self::new(assignment)
    }

    /// Random near-equal partition.
    pub fn random(d: usize, g: usize, rng: &mut Rng) -> Result<Self> {
        let mut base = Self::contiguous(d, g)?.assignment;
        base.shuffle(rng);
        Self::new(base)
    }

    pub fn d(&self) -> usize {
        self.assignment.len()
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn group_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn members(&self, k: usize) -> Vec<usize> {
        (0..self.d()).filter(|&v| self.assignment[v] == k).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        (0..self.g).map(|k| self.members(k).len()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_partition() {
        let g = Grouping::contiguous(10, 3).unwrap();
        assert_eq!(g.sizes(), vec![4, 3, 3]);
        assert_eq!(g.members(0), vec![0, 1, 2, 3]);
    }

    #[test]
    fn empty_group_rejected() {
        assert!(Grouping::new(vec![0, 2, 2]).is_err());
        assert!(Grouping::contiguous(3, 4).is_err());
    }
}
