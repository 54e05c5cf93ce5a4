use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::ModelMatrix;
use crate::error::{Error, Result};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Least squares estimates with the residual sum of squares.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeastSquaresFit {
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub labels: Vec<String>,
}

struct Pinv {
    svd: SVD<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Pinv {
    fn new(h: &DMatrix<f64>) -> Result<Self> {
        if h.nrows() < h.ncols() {
            return Err(Error::Singular { dependent: dependent_columns(h) });
        }
        let svd = SVD::new(h.clone(), true, true);
        let smax = svd.singular_values.max();
        if smax == 0.0 || svd.singular_values.iter().any(|&s| s <= RANK_TOLERANCE * smax) {
            return Err(Error::Singular { dependent: dependent_columns(h) });
        }
        Ok(Self { svd })
    }

    /// (HᵀH)⁻¹Hᵀ applied to the columns of `b`.
    fn apply(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let u = self.svd.u.as_ref().expect("svd computed with u");
        let vt = self.svd.v_t.as_ref().expect("svd computed with v");
        let mut utb = u.transpose() * b;
        for (i, s) in self.svd.singular_values.iter().enumerate() {
            utb.row_mut(i).scale_mut(1.0 / s);
        }
        vt.transpose() * utb
    }
}

/// Columns that lie (numerically) in the span of earlier columns.
fn dependent_columns(h: &DMatrix<f64>) -> Vec<usize> {
    let scale = h.column_iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for (j, col) in h.column_iter().enumerate() {
        let mut r: DVector<f64> = col.into_owned();
        for q in &basis {
            let c = q.dot(&r);
            r.axpy(-c, q, 1.0);
        }
        let norm = r.norm();
        if norm <= 1e-8 * scale {
            dependent.push(j);
        } else {
            basis.push(r / norm);
        }
    }
    dependent
}

/// Ordinary least squares β̂ = (HᵀH)⁻¹Hᵀy.
pub fn least_squares(h: &ModelMatrix, y: &[f64]) -> Result<LeastSquaresFit> {
    let hm = h.matrix();
    if y.len() != hm.nrows() {
        return Err(Error::Shape { expected: hm.nrows(), found: y.len() });
    }
    let pinv = Pinv::new(hm)?;
    let yv = DMatrix::from_column_slice(y.len(), 1, y);
    let beta = pinv.apply(&yv);
    let resid = &yv - hm * &beta;
    Ok(LeastSquaresFit {
        coefficients: beta.iter().copied().collect(),
        rss: resid.norm_squared(),
        labels: h.terms().labels(),
    })
}

/// Alias matrix A = (HᵀH)⁻¹HᵀH̃.
pub fn alias_matrix(h: &ModelMatrix, h_tilde: &ModelMatrix) -> Result<DMatrix<f64>> {
    if h.nrows() != h_tilde.nrows() {
        return Err(Error::Shape { expected: h.nrows(), found: h_tilde.nrows() });
    }
    Ok(Pinv::new(h.matrix())?.apply(h_tilde.matrix()))
}

/// One row of a coefficient t-test table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TTestRow {
    pub term: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p_value: f64,
}

/// Least squares fit with per-coefficient two-sided t-tests. Requires
/// n > p so a residual variance exists.
pub fn main_effects_t_tests(h: &ModelMatrix, y: &[f64]) -> Result<Vec<TTestRow>> {
    let n = h.nrows();
    let p = h.ncols();
    if n <= p {
        return Err(Error::Domain(format!("t-tests need n > p (n = {n}, p = {p})")));
    }
    let fit = least_squares(h, y)?;
    let df = (n - p) as f64;
    let sigma2 = fit.rss / df;
    let hth = h.matrix().transpose() * h.matrix();
    let inv = hth
        .try_inverse()
        .ok_or_else(|| Error::Singular { dependent: dependent_columns(h.matrix()) })?;
    let tdist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(fit
        .coefficients
        .iter()
        .zip(&fit.labels)
        .enumerate()
        .map(|(j, (&b, label))| {
            let se = (sigma2 * inv[(j, j)]).max(0.0).sqrt();
            let t = if se > 0.0 { b / se } else if b == 0.0 { 0.0 } else { f64::INFINITY };
            let p_value = if t.is_finite() { 2.0 * (1.0 - tdist.cdf(t.abs())) } else { 0.0 };
            TTestRow { term: label.clone(), estimate: b, std_error: se, t, p_value }
        })
        .collect())
}
