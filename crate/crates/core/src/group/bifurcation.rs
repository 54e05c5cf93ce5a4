use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::design::ScreeningOutcome;
use crate::error::{Error, Result};

use super::Oracle;

/// Settings for [`sequential_bifurcation`].
#[derive(Debug, Clone, PartialEq)]
pub struct SbOptions {
    /// Split a group when its contrast exceeds δ (single replicate).
    pub delta: f64,
    /// Pair every run with its mirror image so two-factor interactions do
    /// not bias the group contrasts.
    pub foldover: bool,
    /// Replicates per run; with two or more, a one-sided two-sample t-test
    /// at level `alpha` replaces the δ rule.
    pub replicates: usize,
    pub alpha: f64,
    /// Variable order along the bifurcation; identity when `None`.
    pub order: Option<Vec<usize>>,
}

impl Default for SbOptions {
    fn default() -> Self {
        Self { delta: 0.0, foldover: false, replicates: 1, alpha: 0.05, order: None }
    }
}

/// One group assessment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbStep {
    /// Variables (1-based, original labels) in the group.
    pub group: Vec<usize>,
    pub contrast: f64,
    pub p_value: Option<f64>,
    pub important: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbResult {
    pub outcome: ScreeningOutcome,
    pub runs: usize,
    pub trace: Vec<SbStep>,
}

/// Size of the first subgroup when splitting m variables: the largest power
/// of two strictly below m.
pub(crate) fn first_split(m: usize) -> usize {
    debug_assert!(m >= 2);
    let mut p = 1;
    while p * 2 < m {
        p *= 2;
    }
    p
}

struct Points<'a> {
    oracle: &'a Oracle,
    order: Vec<usize>,
    opts: &'a SbOptions,
    cache: HashMap<usize, Vec<f64>>,
}

impl Points<'_> {
    /// Samples at the point with the first j ordered variables high: raw
    /// outputs, or half the difference from the mirror run under foldover.
    fn samples(&mut self, j: usize) -> Result<Vec<f64>> {
        if let Some(v) = self.cache.get(&j) {
            return Ok(v.clone());
        }
        let d = self.order.len();
        let mut x = vec![-1.0; d];
        for &v in &self.order[..j] {
            x[v] = 1.0;
        }
        let mirror: Vec<f64> = x.iter().map(|v| -v).collect();
        let mut out = Vec::with_capacity(self.opts.replicates);
        for _ in 0..self.opts.replicates.max(1) {
            let y = self.oracle.eval(&x)?;
            out.push(if self.opts.foldover { 0.5 * (y - self.oracle.eval(&mirror)?) } else { y });
        }
        self.cache.insert(j, out.clone());
        Ok(out)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// One-sided pooled two-sample t-test of mean(hi) > mean(lo).
fn t_test(hi: &[f64], lo: &[f64]) -> Result<f64> {
    let (n1, n2) = (hi.len() as f64, lo.len() as f64);
    let (m1, m2) = (mean(hi), mean(lo));
    let ss: f64 = hi.iter().map(|v| (v - m1).powi(2)).sum::<f64>() + lo.iter().map(|v| (v - m2).powi(2)).sum::<f64>();
    let df = n1 + n2 - 2.0;
    let se = (ss / df * (1.0 / n1 + 1.0 / n2)).sqrt();
    if se == 0.0 {
        return Ok(if m1 > m2 { 0.0 } else { 1.0 });
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(1.0 - dist.cdf((m1 - m2) / se))
}

/// Sequential bifurcation over d two-level variables, all effects assumed
/// positive.
///
/// Starts from the all-low and all-high runs; a group (lo, hi] of the
/// ordered variables is important when y(hi) − y(lo) > δ, where y(j) has
/// the first j variables high. Important groups split into a first part of
/// the largest power-of-two size below the group size and the remainder,
/// each assessed with one new run.
pub fn sequential_bifurcation(oracle: &Oracle, opts: &SbOptions) -> Result<SbResult> {
    if !(opts.delta >= 0.0) {
        return Err(Error::Domain(format!("delta must be nonnegative, got {}", opts.delta)));
    }
    if opts.replicates >= 2 && !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1)".into()));
    }
    let d = oracle.d();
    let order = match &opts.order {
        Some(o) => {
            let set: BTreeSet<usize> = o.iter().copied().collect();
            if o.len() != d || set.len() != d || set.iter().any(|&v| v >= d) {
                return Err(Error::InvalidArgument("order must be a permutation of the variables".into()));
            }
            o.clone()
        }
        None => (0..d).collect(),
    };
    let start_calls = oracle.calls();
    let mut pts = Points { oracle, order: order.clone(), opts, cache: HashMap::new() };
    let mut trace = Vec::new();
    let mut selected = BTreeSet::new();
    let mut stats = vec![0.0; d];
    let mut stack = vec![(0usize, d)];
    while let Some((lo, hi)) = stack.pop() {
        let a = pts.samples(lo)?;
        let b = pts.samples(hi)?;
        let contrast = mean(&b) - mean(&a);
        let (p_value, important) = if opts.replicates >= 2 {
            let p = t_test(&b, &a)?;
            (Some(p), p < opts.alpha)
        } else {
            (None, contrast > opts.delta)
        };
        trace.push(SbStep { group: order[lo..hi].iter().map(|v| v + 1).collect(), contrast, p_value, important });
        if hi - lo == 1 {
            stats[order[lo]] = contrast;
        }
        if !important {
            continue;
        }
        if hi - lo == 1 {
            selected.insert(order[lo]);
        } else {
            let mid = lo + first_split(hi - lo);
            stack.push((mid, hi));
            stack.push((lo, mid));
        }
    }
    let runs = oracle.calls() - start_calls;
    let details = serde_json::json!({
        "runs": runs,
        "delta": opts.delta,
        "foldover": opts.foldover,
        "replicates": opts.replicates,
        "trace": trace,
    });
    let outcome = ScreeningOutcome::new("sequential-bifurcation", d, selected, stats).with_details(details);
    Ok(SbResult { outcome, runs, trace })
}
