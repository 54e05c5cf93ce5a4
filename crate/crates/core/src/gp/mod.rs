//! Gaussian-process screening: the product-exponential correlation, the
//! profiled likelihood, stepwise selection of correlation parameters and
//! selection against a reference distribution from inert variables.

mod optim;
mod rdvs;
mod sgpvs;

pub use rdvs::{rdvs, McmcSpec, RdvsOptions, RdvsResult, ReferenceDistribution};
pub use sgpvs::{sgpvs, SgpvsOptions, SgpvsResult, SgpvsStep};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{Error, Result};

pub const DEFAULT_NUGGET: f64 = 1e-8;
pub const MAX_NUGGET: f64 = 1e-4;

/// Maximum-likelihood summary of a constant-mean GP at fixed correlation
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpFit {
    pub beta0: f64,
    pub sigma2: f64,
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Nugget actually used after any escalation.
    pub nugget: f64,
    pub loglik: f64,
}

/// |x_ik − x_jk|^α for every pair i < j, one vector per variable.
#[derive(Debug, Clone)]
pub(crate) struct PairDistances {
    n: usize,
    per_var: Vec<Vec<f64>>,
}

impl PairDistances {
    pub(crate) fn new(x: &DMatrix<f64>, alpha: &[f64]) -> Self {
        let n = x.nrows();
        let per_var = (0..x.ncols()).map(|k| Self::column(x.column(k).as_slice(), alpha[k])).collect();
        Self { n, per_var }
    }

    pub(crate) fn column(x: &[f64], alpha: f64) -> Vec<f64> {
        let n = x.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                let t = (x[i] - x[j]).abs();
                out.push(if alpha == 2.0 { t * t } else if alpha == 1.0 { t } else { t.powf(alpha) });
            }
        }
        out
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn var(&self, k: usize) -> &[f64] {
        &self.per_var[k]
    }

    pub(crate) fn num_pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }
}

/// Correlation matrix from the exponent Σ_k θ_k D_k over pairs.
pub(crate) fn correlation_from_exponent(n: usize, exponent: &[f64]) -> DMatrix<f64> {
    let mut r = DMatrix::identity(n, n);
    let mut p = 0;
    for i in 0..n {
        for j in i + 1..n {
            let v = (-exponent[p]).exp();
            r[(i, j)] = v;
            r[(j, i)] = v;
            p += 1;
        }
    }
    r
}

/// R_ij = Π_k exp(−θ_k |x_ik − x_jk|^{α_k}).
pub fn correlation_matrix(x: &DMatrix<f64>, theta: &[f64], alpha: &[f64]) -> Result<DMatrix<f64>> {
    check_parameters(x.ncols(), theta, alpha)?;
    let dist = PairDistances::new(x, alpha);
    let mut exponent = vec![0.0; dist.num_pairs()];
    for (k, &t) in theta.iter().enumerate() {
        for (e, v) in exponent.iter_mut().zip(dist.var(k)) {
            *e += t * v;
        }
    }
    Ok(correlation_from_exponent(x.nrows(), &exponent))
}

fn check_parameters(d: usize, theta: &[f64], alpha: &[f64]) -> Result<()> {
    if theta.len() != d {
        return Err(Error::Shape { expected: d, found: theta.len() });
    }
    if alpha.len() != d {
        return Err(Error::Shape { expected: d, found: alpha.len() });
    }
    if let Some(t) = theta.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        return Err(Error::Domain(format!("theta must be finite and nonnegative, got {t}")));
    }
    if let Some(a) = alpha.iter().find(|a| !(**a > 0.0 && **a <= 2.0)) {
        return Err(Error::Domain(format!("alpha must lie in (0, 2], got {a}")));
    }
    Ok(())
}

/// Cholesky factor of R + gI, raising g tenfold from `nugget` up to
/// [`MAX_NUGGET`] until the factorization succeeds.
pub(crate) fn factor(r: DMatrix<f64>, nugget: f64) -> Result<(nalgebra::Cholesky<f64, nalgebra::Dyn>, f64)> {
    let mut g = nugget;
    loop {
        let mut m = r.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += g;
        }
        if let Some(c) = m.cholesky() {
            return Ok((c, g));
        }
        if g >= MAX_NUGGET {
            return Err(Error::Conditioning { nugget: g });
        }
        g = (g * 10.0).min(MAX_NUGGET);
    }
}

/// Generalized least squares pieces from a factored correlation matrix.
pub(crate) struct Gls {
    pub beta0: f64,
    /// (y − β̂₀1)ᵀR⁻¹(y − β̂₀1).
    pub quad: f64,
    pub log_det: f64,
    /// 1ᵀR⁻¹1.
    pub ones_quad: f64,
}

pub(crate) fn gls(chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>, y: &DVector<f64>) -> Gls {
    let n = y.len();
    let ones = DVector::from_element(n, 1.0);
    let ri1 = chol.solve(&ones);
    let riy = chol.solve(y);
    let ones_quad = ri1.sum();
    let one_y = riy.sum();
    let beta0 = one_y / ones_quad;
    let quad = (y.dot(&riy) - beta0 * one_y).max(0.0);
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    Gls { beta0, quad, log_det, ones_quad }
}

/// Profiled log-likelihood −½[n ln(2πσ̂²) + ln|R| + n].
pub(crate) fn profiled(chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>, y: &DVector<f64>) -> (f64, f64, f64) {
    let n = y.len() as f64;
    let g = gls(chol, y);
    let sigma2 = (g.quad / n).max(f64::MIN_POSITIVE);
    let loglik = -0.5 * (n * (2.0 * std::f64::consts::PI * sigma2).ln() + g.log_det + n);
    (loglik, g.beta0, sigma2)
}

/// Log-likelihood of a constant-mean GP with β₀ and σ² at their maximum
/// likelihood values, on the design's own coordinates.
pub fn gp_loglik(design: &Design, y: &[f64], theta: &[f64], alpha: &[f64], nugget: f64) -> Result<GpFit> {
    let n = design.n();
    if n < 2 {
        return Err(Error::Domain("need at least two runs".into()));
    }
    if y.len() != n {
        return Err(Error::Shape { expected: n, found: y.len() });
    }
    if !(nugget > 0.0) {
        return Err(Error::Domain("nugget must be positive".into()));
    }
    let r = correlation_matrix(design.runs(), theta, alpha)?;
    let (chol, nugget) = factor(r, nugget)?;
    let (loglik, beta0, sigma2) = profiled(&chol, &DVector::from_column_slice(y));
    Ok(GpFit { beta0, sigma2, theta: theta.to_vec(), alpha: alpha.to_vec(), nugget, loglik })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Coding, Provenance};

    fn design(rows: &[Vec<f64>]) -> Design {
        Design::from_rows(rows, Coding::Unit, Provenance::new("t")).unwrap()
    }

    #[test]
    fn correlation_has_unit_diagonal_and_decays() {
        let x = DMatrix::from_row_slice(3, 2, &[0.0, 0.0, 0.5, 0.1, 1.0, 1.0]);
        let r1 = correlation_matrix(&x, &[1.0, 2.0], &[2.0, 2.0]).unwrap();
        let r2 = correlation_matrix(&x, &[3.0, 2.0], &[2.0, 2.0]).unwrap();
        for i in 0..3 {
            assert_eq!(r1[(i, i)], 1.0);
            for j in 0..3 {
                assert_eq!(r1[(i, j)], r1[(j, i)]);
                if i != j {
                    assert!(r1[(i, j)] > 0.0 && r1[(i, j)] <= 1.0);
                    assert!(r2[(i, j)] <= r1[(i, j)]);
                }
            }
        }
        assert!((r1[(0, 1)] - (-(0.25 + 2.0 * 0.01f64)).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        let x = DMatrix::from_row_slice(2, 1, &[0.0, 1.0]);
        assert!(correlation_matrix(&x, &[-1.0], &[2.0]).is_err());
        assert!(correlation_matrix(&x, &[1.0], &[2.5]).is_err());
        assert!(correlation_matrix(&x, &[1.0], &[0.0]).is_err());
    }

    #[test]
    fn three_run_instance_matches_direct_formulae() {
        let d = design(&[vec![0.0], vec![0.3], vec![1.0]]);
        let y = [1.0, 2.0, 0.5];
        let fit = gp_loglik(&d, &y, &[2.0], &[2.0], 1e-10).unwrap();
        let a = (-2.0f64 * 0.09).exp();
        let b = (-2.0f64 * 1.0).exp();
        let c = (-2.0f64 * 0.49).exp();
        let r = nalgebra::Matrix3::new(1.0, a, b, a, 1.0, c, b, c, 1.0);
        let ri = r.try_inverse().unwrap();
        let ones = nalgebra::Vector3::new(1.0, 1.0, 1.0);
        let yv = nalgebra::Vector3::new(1.0, 2.0, 0.5);
        let beta = (ones.transpose() * ri * yv)[0] / (ones.transpose() * ri * ones)[0];
        let e = yv - ones * beta;
        let s2 = (e.transpose() * ri * e)[0] / 3.0;
        let ll = -1.5 * (2.0 * std::f64::consts::PI * s2).ln() - 0.5 * r.determinant().ln() - 1.5;
        assert!((fit.beta0 - beta).abs() < 1e-8);
        assert!((fit.sigma2 - s2).abs() < 1e-8);
        assert!((fit.loglik - ll).abs() < 1e-7);
    }

    #[test]
    fn large_roughness_gives_independent_noise_limit() {
        let d = design(&[vec![0.0], vec![0.4], vec![0.7], vec![1.0]]);
        let y = [1.0, 3.0, 2.0, 6.0];
        let fit = gp_loglik(&d, &y, &[1e6], &[2.0], 1e-8).unwrap();
        let mean = y.iter().sum::<f64>() / 4.0;
        let s2 = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 4.0;
        let ll = -2.0 * (2.0 * std::f64::consts::PI * s2).ln() - 2.0;
        assert!((fit.loglik - ll).abs() < 1e-6);
    }

    #[test]
    fn nugget_escalates_on_duplicate_runs() {
        let d = design(&[vec![0.5], vec![0.5], vec![1.0]]);
        let fit = gp_loglik(&d, &[1.0, 1.1, 2.0], &[1.0], &[2.0], 1e-20).unwrap();
        assert!(fit.nugget > 1e-20);
    }
}
