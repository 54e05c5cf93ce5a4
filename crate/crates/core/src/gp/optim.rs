use argmin::core::{CostFunction, Executor, State, TerminationReason};
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};

struct Objective<'a, F: Fn(&[f64]) -> f64> {
    f: &'a F,
}

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let v = (self.f)(p);
        Ok(if v.is_finite() { v } else { f64::MAX / 4.0 })
    }
}

pub(crate) struct Minimum {
    pub x: Vec<f64>,
    pub converged: bool,
}

/// Nelder–Mead from `start` with an axis-aligned initial simplex of side
/// `step`.
pub(crate) fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, start: &[f64], step: f64, max_iters: u64) -> Result<Minimum> {
    let mut simplex = vec![start.to_vec()];
    for k in 0..start.len() {
        let mut v = start.to_vec();
        v[k] += step;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-7)
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let res = Executor::new(Objective { f }, solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
        .map_err(|e| Error::Numeric(e.to_string()))?;
    let state = res.state();
    let x = state.get_best_param().cloned().unwrap_or_else(|| start.to_vec());
    let converged = !matches!(state.get_termination_reason(), Some(TerminationReason::MaxItersReached));
    Ok(Minimum { x, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let f = |p: &[f64]| (p[0] - 1.0).powi(2) + 3.0 * (p[1] + 2.0).powi(2);
        let m = nelder_mead(&f, &[0.0, 0.0], 0.5, 1000).unwrap();
        assert!((m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] + 2.0).abs() < 1e-3);
        assert!(m.converged);
    }
}
