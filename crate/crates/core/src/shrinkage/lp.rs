//! Dense dual simplex for linear programs of the form
//! min cᵀx subject to Ax ≤ b, x ≥ 0 with c ≥ 0, started from the slack
//! basis (which is dual feasible because c ≥ 0).

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

/// A tableau kept between solves so that a new right-hand side can be
/// warm-started from the previous optimal basis.
#[derive(Debug, Clone)]
pub struct DualSimplex {
    m: usize,
    nx: usize,
    /// m rows of [B⁻¹A | B⁻¹ | B⁻¹b], row-major.
    t: Vec<f64>,
    /// Reduced costs of structural and slack columns.
    cost: Vec<f64>,
    c0: Vec<f64>,
    basis: Vec<usize>,
    pub iterations: usize,
    pub max_iterations: usize,
}

/// Solution with optimality diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Largest violation of Ax ≤ b, x ≥ 0.
    pub primal_infeasibility: f64,
    /// Most negative reduced cost (≥ −tolerance at an optimum).
    pub min_reduced_cost: f64,
}

impl DualSimplex {
    /// `a` is m×nx row-major; `c` must be nonnegative.
    pub fn new(a: &[Vec<f64>], c: &[f64]) -> Result<Self> {
        let m = a.len();
        let nx = c.len();
        if a.iter().any(|r| r.len() != nx) {
            return Err(Error::InvalidArgument("constraint rows must match the cost length".into()));
        }
        if c.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(Error::InvalidArgument("costs must be finite and nonnegative".into()));
        }
        let w = nx + m + 1;
        let mut t = vec![0.0; m * w];
        for i in 0..m {
            t[i * w..i * w + nx].copy_from_slice(&a[i]);
            t[i * w + nx + i] = 1.0;
        }
        let mut cost = c.to_vec();
        cost.extend(std::iter::repeat(0.0).take(m));
        let max_iterations = 50 * (m + nx).max(10);
        Ok(Self { m, nx, t, cost, c0: c.to_vec(), basis: (nx..nx + m).collect(), iterations: 0, max_iterations })
    }

    fn width(&self) -> usize {
        self.nx + self.m + 1
    }

    /// Loads a new right-hand side, B⁻¹b, keeping the current basis.
    pub fn set_rhs(&mut self, b: &[f64]) -> Result<()> {
        if b.len() != self.m {
            return Err(Error::Shape { expected: self.m, found: b.len() });
        }
        let (m, nx, w) = (self.m, self.nx, self.width());
        for i in 0..m {
            let row = &self.t[i * w..(i + 1) * w];
            let v: f64 = (0..m).map(|k| row[nx + k] * b[k]).sum();
            self.t[i * w + w - 1] = v;
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width();
        let p = self.t[r * w + col];
        for k in 0..w {
            self.t[r * w + k] /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in (0..self.m).filter(|&i| i != r) {
            let f = self.t[i * w + col];
            if f != 0.0 {
                let row = &mut self.t[i * w..(i + 1) * w];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = self.cost[col];
        if f != 0.0 {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row[..w - 1]) {
                *v -= f * pv;
            }
            self.cost[col] = 0.0;
        }
        self.basis[r] = col;
    }

    /// Runs dual simplex iterations until the basis is primal feasible.
    /// Leaving rows follow the most negative right-hand side; after a run
    /// of non-improving pivots the smallest-index rule takes over to rule
    /// out cycling.
    pub fn solve(&mut self) -> Result<()> {
        let (m, w) = (self.m, self.width());
        let ncols = w - 1;
        let mut stalled = 0usize;
        let mut last_obj = f64::NEG_INFINITY;
        loop {
            let rhs = |i: usize| self.t[i * w + w - 1];
            let leave = if stalled > 2 * m {
                (0..m).filter(|&i| rhs(i) < -TOL).min_by_key(|&i| self.basis[i])
            } else {
                (0..m).filter(|&i| rhs(i) < -TOL).min_by(|&a, &b| rhs(a).total_cmp(&rhs(b)))
            };
            let Some(r) = leave else { return Ok(()) };
            if self.iterations >= self.max_iterations {
                return Err(Error::IterationLimit(self.max_iterations));
            }
            let row = &self.t[r * w..(r + 1) * w];
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..ncols {
                let a = row[j];
                if a < -TOL {
                    let ratio = self.cost[j].max(0.0) / -a;
                    if enter.map_or(true, |(_, best)| ratio < best - 1e-12) {
                        enter = Some((j, ratio));
                    }
                }
            }
            let Some((col, _)) = enter else { return Err(Error::Infeasible) };
            self.pivot(r, col);
            self.iterations += 1;
            let obj = self.dual_objective();
            if obj > last_obj + 1e-12 {
                stalled = 0;
                last_obj = obj;
            } else {
                stalled += 1;
            }
        }
    }

    /// cᵀx at the current basic solution; nondecreasing under dual simplex.
    fn dual_objective(&self) -> f64 {
        let w = self.width();
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| b < self.nx)
            .map(|(i, &b)| self.c0[b] * self.t[i * w + w - 1])
            .sum()
    }

    /// Current basic solution over the structural variables.
    pub fn solution(&self, a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpSolution {
        let w = self.width();
        let mut x = vec![0.0; self.nx];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.nx {
                x[bv] = self.t[i * w + w - 1].max(0.0);
            }
        }
        let mut infeas = 0.0f64;
        for (row, bi) in a.iter().zip(b) {
            let lhs: f64 = row.iter().zip(&x).map(|(u, v)| u * v).sum();
            infeas = infeas.max(lhs - bi);
        }
        let objective = c.iter().zip(&x).map(|(u, v)| u * v).sum();
        let min_reduced_cost = self.cost.iter().copied().fold(f64::INFINITY, f64::min);
        LpSolution { x, objective, primal_infeasibility: infeas.max(0.0), min_reduced_cost }
    }
}
