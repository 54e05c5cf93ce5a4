use std::collections::BTreeSet;

use nalgebra::DVector;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::{Design, ScreeningOutcome};
use crate::error::{Error, Result};
use crate::rng;

use super::{correlation_from_exponent, gls, PairDistances};

/// Metropolis-within-Gibbs settings for the RDVS chains.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcSpec {
    pub iterations: usize,
    pub burn_in: usize,
    /// Width of the uniform random-walk step on ρ.
    pub walk_width: f64,
    /// Probability of a point-mass jump move rather than a random walk.
    pub jump_prob: f64,
    /// Fixed nugget added to the correlation matrix.
    pub nugget: f64,
    /// Inverse-gamma shape and scale for σ².
    pub ig_shape: f64,
    pub ig_scale: f64,
}

impl Default for McmcSpec {
    fn default() -> Self {
        Self { iterations: 2000, burn_in: 500, walk_width: 0.1, jump_prob: 0.5, nugget: 1e-6, ig_shape: 0.01, ig_scale: 0.01 }
    }
}

/// Settings for [`rdvs`].
#[derive(Debug, Clone, PartialEq)]
pub struct RdvsOptions {
    /// Number of inert-column replicates.
    pub b: usize,
    pub percentile: f64,
    pub mcmc: McmcSpec,
    pub seed: u64,
}

impl Default for RdvsOptions {
    fn default() -> Self {
        Self { b: 100, percentile: 0.9, mcmc: McmcSpec::default(), seed: 0 }
    }
}

/// Posterior medians of the inert variable's θ over the replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceDistribution {
    pub medians: Vec<f64>,
    pub percentile: f64,
    pub threshold: f64,
}

impl ReferenceDistribution {
    /// Linear-interpolation quantile of the reference medians.
    pub fn quantile(&self, p: f64) -> f64 {
        quantile(&self.medians, p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RdvsResult {
    pub outcome: ScreeningOutcome,
    pub reference: ReferenceDistribution,
    /// Posterior median of θ for each real variable.
    pub variable_medians: Vec<f64>,
    /// Metropolis acceptance rate of each chain.
    pub acceptance: Vec<f64>,
    pub warnings: Vec<String>,
}

pub(crate) fn quantile(v: &[f64], p: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    if s.is_empty() {
        return f64::NAN;
    }
    let h = p * (s.len() - 1) as f64;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

fn theta_of(rho: f64) -> f64 {
    if rho >= 1.0 {
        0.0
    } else {
        -4.0 * rho.ln()
    }
}

/// Log marginal likelihood with β₀ (flat prior) and σ² (inverse gamma)
/// integrated out, up to a constant.
fn log_marginal(n: usize, exponent: &[f64], y: &DVector<f64>, spec: &McmcSpec) -> Option<f64> {
    let mut r = correlation_from_exponent(n, exponent);
    for i in 0..n {
        r[(i, i)] += spec.nugget;
    }
    let chol = r.cholesky()?;
    let g = gls(&chol, y);
    let shape = spec.ig_shape + 0.5 * (n as f64 - 1.0);
    Some(-0.5 * g.log_det - 0.5 * g.ones_quad.ln() - shape * (spec.ig_scale + 0.5 * g.quad).ln())
}

struct Chain {
    medians: Vec<f64>,
    acceptance: f64,
}

/// One chain over ρ_1..ρ_m with prior ½U(0,1) + ½δ₁ on each.
///
/// A jump move proposes 1 from the continuous part or a uniform draw from
/// the point mass; the prior and proposal densities cancel, leaving the
/// likelihood ratio. A walk move shifts a continuous ρ uniformly and is a
/// no-op at the point mass.
fn run_chain(dist: &[&[f64]], n: usize, y: &DVector<f64>, spec: &McmcSpec, rng: &mut rng::Rng) -> Chain {
    let m = dist.len();
    let pairs = n * (n - 1) / 2;
    let mut rho = vec![0.5; m];
    let mut exponent = vec![0.0; pairs];
    for (k, dk) in dist.iter().enumerate() {
        let t = theta_of(rho[k]);
        for (e, v) in exponent.iter_mut().zip(dk.iter()) {
            *e += t * v;
        }
    }
    let mut current = log_marginal(n, &exponent, y, spec).unwrap_or(f64::NEG_INFINITY);
    let keep = spec.iterations.saturating_sub(spec.burn_in);
    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(keep); m];
    let (mut proposed, mut accepted) = (0usize, 0usize);
    let mut trial = vec![0.0; pairs];
    for it in 0..spec.iterations {
        for k in 0..m {
            let new = if rng.gen::<f64>() < spec.jump_prob {
                if rho[k] >= 1.0 {
                    1.0 - rng.gen::<f64>()
                } else {
                    1.0
                }
            } else if rho[k] >= 1.0 {
                continue;
            } else {
                let step = rho[k] + spec.walk_width * (rng.gen::<f64>() - 0.5);
                if !(step > 0.0 && step < 1.0) {
                    proposed += 1;
                    continue;
                }
                step
            };
            let dt = theta_of(new) - theta_of(rho[k]);
            for ((t, e), v) in trial.iter_mut().zip(&exponent).zip(dist[k].iter()) {
                *t = e + dt * v;
            }
            proposed += 1;
            let Some(cand) = log_marginal(n, &trial, y, spec) else { continue };
            if rng.gen::<f64>().ln() < cand - current {
                rho[k] = new;
                std::mem::swap(&mut exponent, &mut trial);
                current = cand;
                accepted += 1;
            }
        }
        if it >= spec.burn_in {
            for k in 0..m {
                samples[k].push(theta_of(rho[k]));
            }
        }
    }
    let medians = samples.iter().map(|s| quantile(s, 0.5)).collect();
    Chain { medians, acceptance: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 } }
}

/// Reference-distribution variable selection.
///
/// Each of `b` replicates appends an inert column of uniform random
/// settings to the [0, 1]-scaled design and samples the posterior of
/// ρ_i = exp(−θ_i/4) (α = 2) by MCMC, recording the posterior median of
/// the inert θ. A real variable is active when its posterior median θ,
/// taken from the first replicate, exceeds the chosen percentile of the
/// inert medians.
pub fn rdvs(design: &Design, y: &[f64], opts: &RdvsOptions) -> Result<RdvsResult> {
    let (n, d) = (design.n(), design.d());
    if y.len() != n {
        return Err(Error::Shape { expected: n, found: y.len() });
    }
    if n < 3 {
        return Err(Error::Domain("need at least three runs".into()));
    }
    if opts.b < 10 {
        return Err(Error::Domain(format!("need b >= 10 reference replicates, got {}", opts.b)));
    }
    if !(opts.percentile > 0.0 && opts.percentile < 1.0) {
        return Err(Error::Domain("percentile must lie in (0, 1)".into()));
    }
    let spec = &opts.mcmc;
    if spec.burn_in >= spec.iterations {
        return Err(Error::InvalidArgument("burn-in must be shorter than the chain".into()));
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let sd = (y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    if !(sd > 0.0) {
        return Err(Error::Domain("response is constant".into()));
    }
    let ys = DVector::from_iterator(n, y.iter().map(|v| (v - mean) / sd));
    let x = design.to_unit()?;
    let real = PairDistances::new(x.runs(), &vec![2.0; d]);

    let chains: Vec<Chain> = (0..opts.b)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(opts.seed, c as u64);
            let inert: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let inert = PairDistances::column(&inert, 2.0);
            let mut dist: Vec<&[f64]> = (0..d).map(|k| real.var(k)).collect();
            dist.push(&inert);
            run_chain(&dist, n, &ys, spec, &mut rng)
        })
        .collect();

    let medians: Vec<f64> = chains.iter().map(|c| c.medians[d]).collect();
    let threshold = quantile(&medians, opts.percentile);
    let variable_medians = chains[0].medians[..d].to_vec();
    let acceptance: Vec<f64> = chains.iter().map(|c| c.acceptance).collect();
    let mut warnings = Vec::new();
    let poor = acceptance.iter().filter(|a| !(0.05..=0.8).contains(*a)).count();
    if poor > 0 {
        warnings.push(format!("{poor} of {} chains have acceptance outside [0.05, 0.8]", opts.b));
    }
    let selected: BTreeSet<usize> = (0..d).filter(|&k| variable_medians[k] > threshold).collect();
    let reference = ReferenceDistribution { medians, percentile: opts.percentile, threshold };
    let details = serde_json::json!({
        "b": opts.b,
        "percentile": opts.percentile,
        "threshold": threshold,
        "iterations": spec.iterations,
        "burn_in": spec.burn_in,
        "reference_medians": reference.medians,
        "warnings": warnings,
    });
    let outcome = ScreeningOutcome::new("rdvs", d, selected, variable_medians.clone()).with_details(details);
    Ok(RdvsResult { outcome, reference, variable_medians, acceptance, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space_filling::{lhs_random, Jitter};

    #[test]
    fn quantile_interpolates() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[0.0, 10.0], 0.9), 9.0);
    }

    #[test]
    fn theta_reparameterization() {
        assert_eq!(theta_of(1.0), 0.0);
        assert!((theta_of((-0.25f64 * 3.0).exp()) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_b() {
        let d = lhs_random(8, 2, Jitter::Midpoint, 0).unwrap();
        let y: Vec<f64> = (0..8).map(|i| i as f64).collect();
        assert!(rdvs(&d, &y, &RdvsOptions { b: 5, ..Default::default() }).is_err());
    }

    #[test]
    fn strong_variable_beats_reference() {
        let d = lhs_random(20, 3, Jitter::Random, 2).unwrap();
        let y = d.evaluate(|x| (5.0 * x[0]).sin());
        let mcmc = McmcSpec { iterations: 400, burn_in: 100, ..Default::default() };
        let r = rdvs(&d, &y, &RdvsOptions { b: 12, mcmc, ..Default::default() }).unwrap();
        assert!(r.outcome.selected.contains(&0));
        assert!(!r.outcome.selected.contains(&2));
    }
}
