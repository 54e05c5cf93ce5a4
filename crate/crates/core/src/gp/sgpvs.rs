use std::collections::BTreeSet;

use nalgebra::DVector;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{Design, ScreeningOutcome};
use crate::error::{Error, Result};
use crate::rng;

use super::optim::nelder_mead;
use super::{correlation_from_exponent, factor, profiled, PairDistances, DEFAULT_NUGGET};

/// Settings for [`sgpvs`].
#[derive(Debug, Clone, PartialEq)]
pub struct SgpvsOptions {
    /// Critical value a step must exceed to free a variable.
    pub c: f64,
    /// Compare the likelihood-ratio statistic 2(l_j − l₀) with `c` (the
    /// χ² reading of c); when false the raw gain l_j − l₀ is compared.
    pub deviance: bool,
    /// Smoothness exponent shared by all variables.
    pub alpha: f64,
    /// Starts for the fully tied fit.
    pub starts: usize,
    /// Starts per candidate fit, the first warm from the current model.
    pub candidate_starts: usize,
    /// Box for every θ.
    pub theta_bounds: (f64, f64),
    pub max_iters: u64,
    pub seed: u64,
}

impl Default for SgpvsOptions {
    fn default() -> Self {
        Self { c: 6.0, deviance: false, alpha: 2.0, starts: 20, candidate_starts: 3, theta_bounds: (1e-3, 1e2), max_iters: 600, seed: 0 }
    }
}

/// One accepted release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgpvsStep {
    /// Freed variable, 0-based.
    pub variable: usize,
    pub loglik: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgpvsResult {
    pub outcome: ScreeningOutcome,
    /// Released variables in order.
    pub releases: Vec<SgpvsStep>,
    /// l₀ after the tied fit and after each release.
    pub loglik_path: Vec<f64>,
    pub theta_tied: f64,
    /// Final θ̂ per variable; tied variables share `theta_tied`.
    pub theta: Vec<f64>,
    pub warnings: Vec<String>,
}

struct Model<'a> {
    dist: &'a PairDistances,
    y: DVector<f64>,
    lo: f64,
    hi: f64,
}

impl Model<'_> {
    /// Negative profiled log-likelihood with tied exponent sum `tied` and
    /// separately parameterized variables `free`; params are log θ, tied
    /// first. Out-of-box points are evaluated at the projection and
    /// penalized by squared distance.
    fn cost(&self, tied: &[f64], free: &[usize], p: &[f64]) -> f64 {
        let mut penalty = 0.0;
        let theta: Vec<f64> = p
            .iter()
            .map(|&v| {
                let c = v.clamp(self.lo, self.hi);
                penalty += (v - c).powi(2);
                c.exp()
            })
            .collect();
        let mut e: Vec<f64> = tied.iter().map(|s| theta[0] * s).collect();
        for (f, t) in free.iter().zip(&theta[1..]) {
            for (ei, di) in e.iter_mut().zip(self.dist.var(*f)) {
                *ei += t * di;
            }
        }
        let r = correlation_from_exponent(self.dist.n(), &e);
        match factor(r, DEFAULT_NUGGET) {
            Ok((chol, _)) => -profiled(&chol, &self.y).0 + penalty,
            Err(_) => f64::INFINITY,
        }
    }

    /// Best of several Nelder–Mead runs.
    fn fit(&self, tied: &[f64], free: &[usize], starts: &[Vec<f64>], max_iters: u64) -> Result<(Vec<f64>, f64, bool)> {
        let f = |p: &[f64]| self.cost(tied, free, p);
        let mut best: Option<(Vec<f64>, f64, bool)> = None;
        for s in starts {
            let m = nelder_mead(&f, s, 1.0, max_iters)?;
            let x: Vec<f64> = m.x.iter().map(|v| v.clamp(self.lo, self.hi)).collect();
            let ll = -self.cost(tied, free, &x);
            if best.as_ref().map_or(true, |b| ll > b.1) {
                best = Some((x, ll, m.converged));
            }
        }
        best.ok_or_else(|| Error::InvalidArgument("no starting points".into()))
    }
}

/// Stepwise GP variable selection.
///
/// All variables start with a common θ (α fixed). Each step refits the
/// model once per still-tied variable with that variable given its own θ
/// and frees the one with the largest maximized log-likelihood, provided
/// the likelihood-ratio statistic against the current model exceeds `c`. A released variable is
/// declared active when its θ̂ exceeds the final tied θ̂. Inputs are scaled
/// to [0, 1].
pub fn sgpvs(design: &Design, y: &[f64], opts: &SgpvsOptions) -> Result<SgpvsResult> {
    let (n, d) = (design.n(), design.d());
    if y.len() != n {
        return Err(Error::Shape { expected: n, found: y.len() });
    }
    if n < 3 {
        return Err(Error::Domain("need at least three runs".into()));
    }
    if !(opts.c > 0.0) {
        return Err(Error::Domain("c must be positive".into()));
    }
    if !(opts.alpha > 0.0 && opts.alpha <= 2.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 2], got {}", opts.alpha)));
    }
    let (lo, hi) = (opts.theta_bounds.0.ln(), opts.theta_bounds.1.ln());
    if !(lo < hi) {
        return Err(Error::Domain("theta bounds must be increasing and positive".into()));
    }
    let mut warnings = Vec::new();
    let mean = y.iter().sum::<f64>() / n as f64;
    if y.iter().all(|v| (v - mean).abs() <= 1e-12 * mean.abs().max(1.0)) {
        warnings.push("constant response: nothing to select".into());
        let outcome = ScreeningOutcome::new("sgpvs", d, BTreeSet::new(), vec![0.0; d]);
        return Ok(SgpvsResult { outcome, releases: vec![], loglik_path: vec![], theta_tied: 0.0, theta: vec![0.0; d], warnings });
    }
    let x = design.to_unit()?;
    let dist = PairDistances::new(x.runs(), &vec![opts.alpha; d]);
    let model = Model { dist: &dist, y: DVector::from_column_slice(y), lo, hi };
    let sum_over = |vars: &[usize]| {
        let mut s = vec![0.0; dist.num_pairs()];
        for &k in vars {
            for (a, b) in s.iter_mut().zip(dist.var(k)) {
                *a += b;
            }
        }
        s
    };

    let mut rng = rng::stream(opts.seed, 0);
    let starts: Vec<Vec<f64>> = (0..opts.starts.max(1))
        .map(|i| vec![lo + (hi - lo) * (i as f64 + 0.5) / opts.starts.max(1) as f64])
        .collect();
    let all: Vec<usize> = (0..d).collect();
    let (mut params, mut l0, converged) = model.fit(&sum_over(&all), &[], &starts, opts.max_iters)?;
    if !converged {
        warnings.push("tied fit hit the iteration limit".into());
    }
    let mut tied: Vec<usize> = all;
    let mut free: Vec<usize> = Vec::new();
    let mut releases = Vec::new();
    let mut path = vec![l0];

    while !tied.is_empty() {
        let seeds: Vec<u64> = (0..tied.len()).map(|_| rng.gen()).collect();
        let fits: Vec<Result<(usize, Vec<f64>, f64, bool)>> = tied
            .par_iter()
            .zip(seeds)
            .map(|(&j, s)| {
                let rest: Vec<usize> = tied.iter().copied().filter(|&k| k != j).collect();
                let sum = sum_over(&rest);
                let mut fr = free.clone();
                fr.push(j);
                let mut warm = params.clone();
                warm.push(params[0]);
                let mut starts = vec![warm.clone()];
                let mut r = rng::stream(s, 0);
                for k in 1..opts.candidate_starts {
                    let mut p = warm.clone();
                    let last = p.len() - 1;
                    p[last] = if k == 1 { (params[0] + 10f64.ln()).min(hi) } else { r.gen_range(lo..hi) };
                    starts.push(p);
                }
                let (p, ll, conv) = model.fit(&sum, &fr, &starts, opts.max_iters)?;
                Ok((j, p, ll, conv))
            })
            .collect();
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for fit in fits {
            let (j, p, ll, conv) = fit?;
            if !conv {
                warnings.push(format!("fit freeing x{} hit the iteration limit", j + 1));
            }
            if best.as_ref().map_or(true, |b| ll > b.2) {
                best = Some((j, p, ll));
            }
        }
        let Some((j, p, ll)) = best else { break };
        let gain = ll - l0;
        let stat = if opts.deviance { 2.0 * gain } else { gain };
        if stat <= opts.c {
            break;
        }
        tied.retain(|&k| k != j);
        free.push(j);
        params = p;
        l0 = ll;
        path.push(l0);
        releases.push(SgpvsStep { variable: j, loglik: ll, gain });
    }

    let theta_tied = params[0].exp();
    let mut theta = vec![theta_tied; d];
    for (f, p) in free.iter().zip(&params[1..]) {
        theta[*f] = p.exp();
    }
    let selected: BTreeSet<usize> = free.iter().copied().filter(|&f| theta[f] > theta_tied).collect();
    let details = serde_json::json!({
        "c": opts.c,
        "deviance": opts.deviance,
        "alpha": opts.alpha,
        "releases": releases.iter().map(|s| serde_json::json!({"variable": s.variable + 1, "loglik": s.loglik, "gain": s.gain})).collect::<Vec<_>>(),
        "loglik_path": path,
        "theta_tied": theta_tied,
        "warnings": warnings,
    });
    let outcome = ScreeningOutcome::new("sgpvs", d, selected, theta.clone()).with_details(details);
    Ok(SgpvsResult { outcome, releases, loglik_path: path, theta_tied, theta, warnings })
}
