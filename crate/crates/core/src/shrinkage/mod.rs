//! Dantzig selector and Gauss–Dantzig selection.

pub mod lp;

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::{least_squares, ModelMatrix, ScreeningOutcome, TermSet};
use crate::error::{Error, Result};

use lp::DualSimplex;

/// Tolerance on ‖Hᵀ(y − Hβ)‖∞ − s accepted at a path point.
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// The Dantzig LP over β = β⁺ − β⁻ for a fixed (H, y), re-solvable for
/// decreasing s from the previous basis.
struct DantzigLp {
    a: Vec<Vec<f64>>,
    c: Vec<f64>,
    corr: Vec<f64>,
    p: usize,
    simplex: DualSimplex,
}

impl DantzigLp {
    fn new(h: &DMatrix<f64>, y: &[f64]) -> Result<Self> {
        let (n, p) = (h.nrows(), h.ncols());
        if y.len() != n {
            return Err(Error::Shape { expected: n, found: y.len() });
        }
        if let Some(j) = (0..p).find(|&j| h.column(j).iter().all(|v| *v == 0.0)) {
            return Err(Error::InvalidArgument(format!("column {} of H is zero", j + 1)));
        }
        let g = h.transpose() * h;
        let corr: Vec<f64> = (h.transpose() * DVector::from_column_slice(y)).iter().copied().collect();
        // Gβ ≤ Hᵀy + s and −Gβ ≤ s − Hᵀy, with β = β⁺ − β⁻.
        let mut a = Vec::with_capacity(2 * p);
        for sign in [1.0, -1.0] {
            for i in 0..p {
                let mut row = Vec::with_capacity(2 * p);
                row.extend((0..p).map(|j| sign * g[(i, j)]));
                row.extend((0..p).map(|j| -sign * g[(i, j)]));
                a.push(row);
            }
        }
        let c = vec![1.0; 2 * p];
        let simplex = DualSimplex::new(&a, &c)?;
        Ok(Self { a, c, corr, p, simplex })
    }

    fn rhs(&self, s: f64) -> Vec<f64> {
        self.corr.iter().map(|v| v + s).chain(self.corr.iter().map(|v| s - v)).collect()
    }

    fn solve(&mut self, s: f64) -> Result<(Vec<f64>, f64)> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::Infeasible);
        }
        let b = self.rhs(s);
        self.simplex.set_rhs(&b)?;
        self.simplex.solve()?;
        let sol = self.simplex.solution(&self.a, &b, &self.c);
        let beta: Vec<f64> = (0..self.p).map(|j| sol.x[j] - sol.x[self.p + j]).collect();
        Ok((beta, sol.primal_infeasibility))
    }
}

/// ‖Hᵀ(y − Hβ)‖∞.
pub fn max_correlation(h: &DMatrix<f64>, y: &[f64], beta: &[f64]) -> f64 {
    let r = DVector::from_column_slice(y) - h * DVector::from_column_slice(beta);
    (h.transpose() * r).amax()
}

/// Dantzig selector: minimizes Σ|β_u| subject to ‖Hᵀ(y − Hβ)‖∞ ≤ s.
pub fn dantzig_solve(h: &DMatrix<f64>, y: &[f64], s: f64) -> Result<Vec<f64>> {
    if !(s >= 0.0) {
        return Err(Error::Infeasible);
    }
    let mut lp = DantzigLp::new(h, y)?;
    Ok(lp.solve(s)?.0)
}

/// How the s values of a path are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PathGrid {
    /// `points` log-spaced values from s_max = ‖Hᵀy‖∞ down to s_max·`ratio`.
    LogSpaced { points: usize, ratio: f64 },
    /// Explicit values, used in decreasing order.
    Values(Vec<f64>),
}

impl Default for PathGrid {
    fn default() -> Self {
        PathGrid::LogSpaced { points: 50, ratio: 1e-3 }
    }
}

/// Solutions along a decreasing grid of s values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DantzigPath {
    pub s: Vec<f64>,
    /// One coefficient vector per grid point.
    pub coefficients: Vec<Vec<f64>>,
    /// ‖Hᵀ(y − Hβ̂)‖∞ − s at each point (≤ 0 up to tolerance).
    pub residuals: Vec<f64>,
}

/// Dantzig selector path, each point warm-started from the previous basis.
pub fn dantzig_path(h: &DMatrix<f64>, y: &[f64], grid: &PathGrid) -> Result<DantzigPath> {
    let mut lp = DantzigLp::new(h, y)?;
    let s_max = lp.corr.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut s_values = match grid {
        PathGrid::LogSpaced { points, ratio } => {
            if *points == 0 || !(*ratio > 0.0 && *ratio < 1.0) {
                return Err(Error::InvalidArgument("grid needs points >= 1 and 0 < ratio < 1".into()));
            }
            if *points == 1 {
                vec![s_max]
            } else {
                let step = ratio.ln() / (*points - 1) as f64;
                (0..*points).map(|k| s_max * (step * k as f64).exp()).collect()
            }
        }
        PathGrid::Values(v) => v.clone(),
    };
    s_values.sort_by(|a, b| b.total_cmp(a));
    let mut path = DantzigPath { s: Vec::new(), coefficients: Vec::new(), residuals: Vec::new() };
    for s in s_values {
        let (beta, _) = lp.solve(s)?;
        let resid = max_correlation(h, y, &beta) - s;
        path.s.push(s);
        path.coefficients.push(beta);
        path.residuals.push(resid);
    }
    Ok(path)
}

/// Settings for [`gauss_dantzig`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussDantzig {
    pub grid: PathGrid,
    /// Refit coefficients with |β̂| above this declare their variables
    /// active.
    pub threshold: f64,
}

impl Default for GaussDantzig {
    fn default() -> Self {
        Self { grid: PathGrid::default(), threshold: 0.0 }
    }
}

/// Gauss–Dantzig result.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussDantzigFit {
    pub outcome: ScreeningOutcome,
    pub path: DantzigPath,
    /// AICc per path point; `None` where the refit was not possible.
    pub aicc: Vec<Option<f64>>,
    /// Index into the path of the chosen s, if any point was scored.
    pub chosen: Option<usize>,
    /// Refit coefficients at the chosen point, aligned with the term set
    /// (intercept included when present).
    pub refit: Vec<f64>,
    /// Set when no path point had a nonempty support.
    pub empty_support_warning: bool,
}

/// AICc = n ln(RSS/n) + 2k + 2k(k + 1)/(n − k − 1); `None` when n − k − 1 ≤ 0.
pub fn aicc(n: usize, k: usize, rss: f64) -> Option<f64> {
    if n <= k + 1 {
        return None;
    }
    let (nf, kf) = (n as f64, k as f64);
    Some(nf * (rss / nf).ln() + 2.0 * kf + 2.0 * kf * (kf + 1.0) / (nf - kf - 1.0))
}

/// Dantzig selector path on the centred non-intercept columns, least-squares
/// refit of each distinct support, s chosen by AICc with k = |support| + 1.
pub fn gauss_dantzig(mm: &ModelMatrix, y: &[f64], opts: &GaussDantzig) -> Result<GaussDantzigFit> {
    let n = mm.nrows();
    if y.len() != n {
        return Err(Error::Shape { expected: n, found: y.len() });
    }
    let terms = mm.terms().terms();
    let cols: Vec<usize> = (0..terms.len()).filter(|&j| !terms[j].is_intercept()).collect();
    let has_intercept = cols.len() < terms.len();
    let h = mm.matrix();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let yc: Vec<f64> = if has_intercept { y.iter().map(|v| v - ybar).collect() } else { y.to_vec() };
    let hc = DMatrix::from_fn(n, cols.len(), |i, j| {
        let c = h.column(cols[j]);
        if has_intercept {
            c[i] - c.mean()
        } else {
            c[i]
        }
    });
    let path = dantzig_path(&hc, &yc, &opts.grid)?;

    let tss: f64 = yc.iter().map(|v| v * v).sum();
    let floor = (1e-10 * tss).max(f64::MIN_POSITIVE);
    let mut aicc_values = Vec::with_capacity(path.s.len());
    let mut best: Option<(usize, f64, Vec<f64>)> = None;
    let mut any_support = false;
    for beta in &path.coefficients {
        let support: Vec<usize> = (0..cols.len()).filter(|&j| beta[j] != 0.0).collect();
        if support.is_empty() {
            aicc_values.push(None);
            continue;
        }
        any_support = true;
        let mut keep: Vec<usize> = support.iter().map(|&j| cols[j]).collect();
        if has_intercept {
            keep.insert(0, (0..terms.len()).find(|&j| terms[j].is_intercept()).expect("intercept"));
        }
        let k = support.len() + 1;
        let score = match refit(mm, &keep, y) {
            Ok((coef, rss)) => aicc(n, k, rss.max(floor)).map(|a| (a, coef, keep)),
            Err(_) => None,
        };
        let Some((a, coef, keep)) = score else {
            aicc_values.push(None);
            continue;
        };
        aicc_values.push(Some(a));
        if best.as_ref().map_or(true, |b| a < b.1) {
            let mut full = vec![0.0; terms.len()];
            for (c, k) in coef.iter().zip(&keep) {
                full[*k] = *c;
            }
            best = Some((aicc_values.len() - 1, a, full));
        }
    }

    let d = variable_count(mm.terms());
    let mut selected = BTreeSet::new();
    let refit_coef = best.as_ref().map(|b| b.2.clone()).unwrap_or_else(|| vec![0.0; terms.len()]);
    for (j, t) in terms.iter().enumerate() {
        if !t.is_intercept() && refit_coef[j].abs() > opts.threshold && refit_coef[j] != 0.0 {
            selected.extend(t.variables());
        }
    }
    let mut stats = vec![0.0; d];
    for (j, t) in terms.iter().enumerate() {
        if t.degree() == 1 {
            let v = t.variables().next().expect("main effect");
            stats[v] = refit_coef[j];
        }
    }
    if !any_support {
        log::warn!("gauss-dantzig: every path point has an empty support");
    }
    let chosen = best.as_ref().map(|b| b.0);
    let details = serde_json::json!({
        "threshold": opts.threshold,
        "chosen_s": chosen.map(|i| path.s[i]),
        "terms": mm.terms().labels(),
        "refit": refit_coef,
        "empty_support_warning": !any_support,
    });
    let outcome = ScreeningOutcome::new("gauss-dantzig", d, selected, stats).with_details(details);
    Ok(GaussDantzigFit {
        outcome,
        path,
        aicc: aicc_values,
        chosen,
        refit: refit_coef,
        empty_support_warning: !any_support,
    })
}

fn columns(h: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(h.nrows(), cols.len(), |i, j| h[(i, cols[j])])
}

fn refit(mm: &ModelMatrix, keep: &[usize], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let terms = TermSet::from_terms(keep.iter().map(|&j| mm.terms().terms()[j].clone()).collect())?;
    let sub = ModelMatrix::from_parts(columns(mm.matrix(), keep), terms)?;
    let fit = least_squares(&sub, y)?;
    Ok((fit.coefficients.clone(), fit.rss))
}

fn variable_count(terms: &TermSet) -> usize {
    terms.terms().iter().filter_map(|t| t.max_variable()).max().map_or(0, |m| m + 1)
}
