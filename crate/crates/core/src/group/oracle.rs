use std::sync::atomic::{AtomicUsize, Ordering};

use crate::design::Design;
use crate::error::{Error, Result};

type OracleFn = dyn Fn(&[f64]) -> std::result::Result<f64, String> + Send + Sync;

/// An output function of d inputs with an audited call counter.
pub struct Oracle {
    d: usize,
    f: Box<OracleFn>,
    calls: AtomicUsize,
    stochastic: bool,
}

impl std::fmt::Debug for Oracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("d", &self.d)
            .field("calls", &self.calls())
            .field("stochastic", &self.stochastic)
            .finish()
    }
}

impl Oracle {
    pub fn new<F>(d: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::fallible(d, move |x| Ok(f(x)))
    }

    pub fn fallible<F>(d: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> std::result::Result<f64, String> + Send + Sync + 'static,
    {
        Self { d, f: Box::new(f), calls: AtomicUsize::new(0), stochastic: false }
    }

    /// Marks the output as noisy, switching default decision rules to
    /// t-tests.
    pub fn stochastic(mut self) -> Self {
        self.stochastic = true;
        self
    }

    pub fn is_stochastic(&self) -> bool {
        self.stochastic
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of evaluations so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::Shape { expected: self.d, found: x.len() });
        }
        let run = self.calls.fetch_add(1, Ordering::SeqCst) + 1;
        match (self.f)(x) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(v) => Err(Error::Oracle { run, message: format!("non-finite output {v}") }),
            Err(message) => Err(Error::Oracle { run, message }),
        }
    }

    /// Evaluates every run of a design in order.
    pub fn eval_design(&self, design: &Design) -> Result<Vec<f64>> {
        (0..design.n()).map(|i| self.eval(&design.row(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_calls_and_reports_run() {
        let o = Oracle::fallible(2, |x| if x[0] > 0.0 { Err("boom".into()) } else { Ok(1.0) });
        assert_eq!(o.eval(&[-1.0, 1.0]).unwrap(), 1.0);
        match o.eval(&[1.0, 1.0]) {
            Err(Error::Oracle { run: 2, message }) => assert_eq!(message, "boom"),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(o.calls(), 2);
    }

    #[test]
    fn wrong_length_rejected() {
        let o = Oracle::new(3, |_| 0.0);
        assert!(o.eval(&[0.0]).is_err());
    }
}
