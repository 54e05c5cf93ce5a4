//! Model-free sensitivity measures: elementary effects from Morris plans
//! and Cotter's contrasts from systematic fractional replicate designs.

mod cotter;

pub use cotter::{cotter_contrasts, cotter_sensitivity, CotterIndices, DEFAULT_COTTER_THRESHOLD};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space_filling::MorrisPlan;

/// Per-variable moments of the elementary effects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EeIndices {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub mu_star: Vec<f64>,
    pub r: usize,
    /// r×d raw elementary effects, one row per trajectory.
    pub effects: Vec<Vec<f64>>,
}

/// Elementary effects (y_after − y_before)/(x_after − x_before) for every
/// step of every trajectory, as an r×d matrix.
pub fn elementary_effects(plan: &MorrisPlan, y: &[f64]) -> Result<DMatrix<f64>> {
    let x = plan.design.runs();
    let (n, d) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(Error::Shape { expected: n, found: y.len() });
    }
    let r = plan.r();
    let mut ee = DMatrix::from_element(r, d, f64::NAN);
    for t in 0..r {
        let rows = plan.trajectory(t);
        if rows.end > n {
            return Err(Error::CorruptPlan(format!("trajectory {} runs past the design", t + 1)));
        }
        for i in rows.start..rows.end - 1 {
            let moved: Vec<usize> = (0..d).filter(|&j| x[(i + 1, j)] != x[(i, j)]).collect();
            let &[j] = moved.as_slice() else {
                return Err(Error::CorruptPlan(format!(
                    "rows {} and {} differ in {} coordinates",
                    i + 1,
                    i + 2,
                    moved.len()
                )));
            };
            let step = x[(i + 1, j)] - x[(i, j)];
            if (step.abs() - plan.delta()).abs() > 1e-9 {
                return Err(Error::CorruptPlan(format!("step {step} between rows {} and {} is not ±Δ", i + 1, i + 2)));
            }
            if !ee[(t, j)].is_nan() {
                return Err(Error::CorruptPlan(format!("x{} moves twice in trajectory {}", j + 1, t + 1)));
            }
            ee[(t, j)] = (y[i + 1] - y[i]) / step;
        }
    }
    Ok(ee)
}

/// μ, σ (divisor r − 1) and μ* of each column of an r×d effects matrix.
pub fn ee_indices(effects: &DMatrix<f64>) -> Result<EeIndices> {
    let r = effects.nrows();
    if r < 2 {
        return Err(Error::Domain("sigma is undefined with a single trajectory".into()));
    }
    if effects.iter().any(|v| !v.is_finite()) {
        return Err(Error::CorruptPlan("missing or non-finite elementary effect".into()));
    }
    let d = effects.ncols();
    let mut mu = Vec::with_capacity(d);
    let mut sigma = Vec::with_capacity(d);
    let mut mu_star = Vec::with_capacity(d);
    for j in 0..d {
        let col = effects.column(j);
        let m = col.mean();
        let var = col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (r - 1) as f64;
        mu.push(m);
        sigma.push(var.sqrt());
        mu_star.push(col.iter().map(|v| v.abs()).sum::<f64>() / r as f64);
    }
    let rows = (0..r).map(|t| effects.row(t).iter().copied().collect()).collect();
    Ok(EeIndices { mu, sigma, mu_star, r, effects: rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_filling::morris_plan;

    #[test]
    fn linear_function_effects_are_coefficients() {
        let plan = morris_plan(4, 5, 4, None, 1).unwrap();
        let beta = [1.5, -2.0, 0.0, 3.0];
        let y = plan.design.evaluate(|x| x.iter().zip(&beta).map(|(a, b)| a * b).sum());
        let idx = ee_indices(&elementary_effects(&plan, &y).unwrap()).unwrap();
        for j in 0..4 {
            assert!((idx.mu[j] - beta[j]).abs() < 1e-12);
            assert!(idx.sigma[j] < 1e-12);
        }
    }

    #[test]
    fn hand_moments() {
        let e = DMatrix::from_row_slice(2, 1, &[-1.0, 1.0]);
        let idx = ee_indices(&e).unwrap();
        assert_eq!((idx.mu[0], idx.mu_star[0]), (0.0, 1.0));
        assert!((idx.sigma[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_trajectory_is_an_error() {
        let e = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        assert!(matches!(ee_indices(&e), Err(Error::Domain(_))));
    }

    #[test]
    fn shuffled_rows_are_corrupt() {
        let mut plan = morris_plan(3, 2, 4, None, 0).unwrap();
        let mut rows = plan.design.rows();
        rows.swap(0, 2);
        plan.design = crate::design::Design::from_rows(&rows, crate::Coding::Unit, crate::Provenance::new("t")).unwrap();
        let y = vec![0.0; 8];
        assert!(matches!(elementary_effects(&plan, &y), Err(Error::CorruptPlan(_))));
    }
}
