use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::design::{Coding, Design, Provenance};
use crate::error::{Error, Result};
use crate::rng;

/// Plan parameters needed to compute elementary effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorrisMeta {
    pub d: usize,
    pub r: usize,
    pub f: usize,
    pub delta: f64,
    /// First row of each trajectory.
    pub trajectory_starts: Vec<usize>,
}

/// r trajectories of d + 1 grid points in [0,1]^d, each step moving one
/// variable by ±Δ.
#[derive(Debug, Clone, PartialEq)]
pub struct MorrisPlan {
    pub design: Design,
    pub meta: MorrisMeta,
}

impl MorrisPlan {
    pub fn r(&self) -> usize {
        self.meta.r
    }

    pub fn delta(&self) -> f64 {
        self.meta.delta
    }

    /// Rows of trajectory t.
    pub fn trajectory(&self, t: usize) -> std::ops::Range<usize> {
        let s = self.meta.trajectory_starts[t];
        s..s + self.meta.d + 1
    }
}

/// Default step for an f-level grid, f / (2(f − 1)).
pub fn default_delta(f: usize) -> f64 {
    f as f64 / (2.0 * (f as f64 - 1.0))
}

/// Morris sampling plan with r trajectories on the f-level grid.
///
/// Each trajectory is 1·x* + (Δ/2)[(2B − J)D* + J]P* with B strictly lower
/// triangular ones, D* random signs, P* a random column permutation and x*
/// a random grid point with x* + Δ still on the grid. `delta = None` uses
/// f / (2(f − 1)).
pub fn morris_plan(d: usize, r: usize, f: usize, delta: Option<f64>, seed: u64) -> Result<MorrisPlan> {
    if d == 0 || r == 0 {
        return Err(Error::InvalidArgument("morris plan needs d >= 1 and r >= 1".into()));
    }
    if f < 2 || f % 2 == 1 {
        return Err(Error::Domain(format!("grid levels f must be even and >= 2, got {f}")));
    }
    let delta = delta.unwrap_or_else(|| default_delta(f));
    let steps = delta * (f - 1) as f64;
    let k = steps.round() as usize;
    if (steps - k as f64).abs() > 1e-9 || k == 0 || k > f - 1 {
        return Err(Error::Domain(format!("step {delta} is not a positive multiple of 1/{} within [0,1]", f - 1)));
    }
    let level = |l: usize| l as f64 / (f - 1) as f64;
    let base_levels = f - k;

    let n = (d + 1) * r;
    let mut x = DMatrix::zeros(n, d);
    let mut rng = rng::stream(seed, 0);
    for t in 0..r {
        let base: Vec<usize> = (0..d).map(|_| rng.gen_range(0..base_levels)).collect();
        let signs: Vec<bool> = (0..d).map(|_| rng.gen()).collect();
        let mut order: Vec<usize> = (0..d).collect();
        order.shuffle(&mut rng);
        // Column c of B* drives variable order[c]; B has ones below the
        // diagonal, so variable order[c] switches between rows c and c + 1.
        for row in 0..=d {
            for (c, &var) in order.iter().enumerate() {
                let b = row > c;
                let high = b != signs[var];
                let l = base[var] + if high { k } else { 0 };
                x[(t * (d + 1) + row, var)] = level(l);
            }
        }
    }
    let provenance = Provenance::seeded(format!("morris plan r={r} f={f}"), seed);
    let design = Design::new(x, Coding::Unit, provenance)?;
    let meta = MorrisMeta { d, r, f, delta, trajectory_starts: (0..r).map(|t| t * (d + 1)).collect() };
    Ok(MorrisPlan { design, meta })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_per_row() {
        let plan = morris_plan(5, 3, 4, None, 2).unwrap();
        let x = plan.design.runs();
        for t in 0..3 {
            let rows = plan.trajectory(t);
            for i in rows.start..rows.end - 1 {
                let moved: Vec<f64> = (0..5).map(|j| x[(i + 1, j)] - x[(i, j)]).filter(|v| *v != 0.0).collect();
                assert_eq!(moved.len(), 1);
                assert!((moved[0].abs() - 2.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn incompatible_step_rejected() {
        assert!(morris_plan(3, 2, 4, Some(0.5), 0).is_err());
        assert!(morris_plan(3, 2, 3, None, 0).is_err());
    }

    #[test]
    fn default_delta_for_four_levels() {
        assert!((default_delta(4) - 2.0 / 3.0).abs() < 1e-15);
    }
}
