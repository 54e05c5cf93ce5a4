use crate::design::{Coding, Design, Provenance};
use crate::error::{Error, Result};

use super::two_level;

/// One-factor-at-a-time plan: the all-low run, then each variable raised
/// alone.
pub fn ofaat(d: usize) -> Result<Design> {
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let rows: Vec<Vec<i32>> = (0..=d)
        .map(|r| (0..d).map(|j| if r == j + 1 { 1 } else { -1 }).collect())
        .collect();
    Ok(two_level(&rows, &format!("ofaat d={d}")))
}

/// Systematic fractional replicate design with 2d + 2 runs: all low, each
/// variable high alone, each variable low alone, all high.
pub fn sfrd(d: usize) -> Result<Design> {
    if d < 2 {
        return Err(Error::InvalidArgument("sfrd needs d >= 2".into()));
    }
    let mut rows = vec![vec![-1; d]];
    for i in 0..d {
        rows.push((0..d).map(|j| if j == i { 1 } else { -1 }).collect());
    }
    for i in 0..d {
        rows.push((0..d).map(|j| if j == i { -1 } else { 1 }).collect());
    }
    rows.push(vec![1; d]);
    Ok(two_level(&rows, &format!("sfrd d={d}")))
}

/// Stacks a design on top of its mirror image, [X; −X].
pub fn foldover(design: &Design) -> Result<Design> {
    if !design.coding().is_discrete() {
        return Err(Error::UnsupportedCoding(design.coding().name().into()));
    }
    let x = design.runs();
    let n = x.nrows();
    let runs = nalgebra::DMatrix::from_fn(2 * n, x.ncols(), |i, j| if i < n { x[(i, j)] } else { -x[(i - n, j)] });
    let tag = format!("foldover of {}", design.provenance().construction);
    let provenance = Provenance { construction: tag, seed: design.provenance().seed };
    let coding = if design.coding() == Coding::TwoLevel { Coding::TwoLevel } else { Coding::ThreeLevel };
    Design::with_names(runs, coding, design.names().to_vec(), provenance)
}
