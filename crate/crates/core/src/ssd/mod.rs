//! Supersaturated designs: Lin and Wu constructions, the E(s²) and
//! Bayesian D criteria, and randomized design search.

mod search;

pub use search::{search_ssd, SsdSearch};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::design::{Coding, Design, Provenance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SsdCriterion {
    Es2,
    BayesD,
}

/// Value of a supersaturated-design criterion with diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsdCriterionValue {
    pub criterion: SsdCriterion,
    pub value: f64,
    /// Column pairs with s_ij = 0.
    pub orthogonal_pairs: usize,
    pub total_pairs: usize,
    pub max_abs_s: f64,
    /// E(s²) lower bound for balanced designs with even n.
    pub lower_bound: Option<f64>,
    pub tau2: Option<f64>,
}

fn require_two_level(design: &Design) -> Result<()> {
    if design.coding() != Coding::TwoLevel {
        return Err(Error::UnsupportedCoding(design.coding().name().into()));
    }
    Ok(())
}

fn pair_stats(x: &DMatrix<f64>) -> (f64, usize, usize, f64) {
    let s = x.transpose() * x;
    let d = x.ncols();
    let (mut sum, mut orth, mut max) = (0.0, 0, 0.0f64);
    for i in 0..d {
        for j in i + 1..d {
            let v = s[(i, j)];
            sum += v * v;
            if v == 0.0 {
                orth += 1;
            }
            max = max.max(v.abs());
        }
    }
    (sum, orth, d * (d - 1) / 2, max)
}

/// Lower bound on E(s²) over balanced n-run designs with d two-level
/// columns, or `None` when n is odd.
///
/// Balance makes every row of XXᵀ sum to zero, so the n − 1 off-diagonal
/// entries in a row sum to −d; they all share the parity of d. The least sum
/// of squares under those two constraints, together with s_ij² ≥ 4 when
/// n ≡ 2 (mod 4), bounds Σ s_ij².
pub fn es2_lower_bound(n: usize, d: usize) -> Option<f64> {
    if n < 2 || n % 2 == 1 || d < 2 {
        return None;
    }
    let (ni, di) = (n as i64, d as i64);
    let m = (ni - 1) as f64;
    let mean = -(di as f64) / m;
    // Two admissible neighbours lo < mean <= lo + 2 with the parity of d.
    let mut lo = mean.floor() as i64;
    if (lo - di).rem_euclid(2) != 0 {
        lo -= 1;
    }
    let hi = lo + 2;
    // k entries at lo, (n − 1 − k) at hi, summing to −d.
    let k = (hi * (ni - 1) + di) / 2;
    let row_min = k * lo * lo + (ni - 1 - k) * hi * hi;
    let off_sq = ni * row_min;
    let sum_sq = ni * di * di + off_sq - di * ni * ni;
    let pairs = (di * (di - 1)) as f64;
    let mut bound = sum_sq as f64 / pairs;
    if n % 4 == 2 {
        bound = bound.max(4.0);
    }
    Some(bound.max(0.0))
}

/// E(s²) = 2/(d(d−1)) Σ_{i<j} s_ij² with s_ij the entries of XᵀX.
pub fn es2(design: &Design) -> Result<SsdCriterionValue> {
    require_two_level(design)?;
    let d = design.d();
    if d < 2 {
        return Err(Error::Domain("E(s^2) needs at least two columns".into()));
    }
    let (sum, orth, total, max) = pair_stats(design.runs());
    let balanced = (0..d).all(|j| design.runs().column(j).sum() == 0.0);
    Ok(SsdCriterionValue {
        criterion: SsdCriterion::Es2,
        value: sum / total as f64,
        orthogonal_pairs: orth,
        total_pairs: total,
        max_abs_s: max,
        lower_bound: if balanced { es2_lower_bound(design.n(), d) } else { None },
        tau2: None,
    })
}

/// E(s²) extended to unbalanced designs by treating the intercept column as
/// one more column of the design.
pub fn es2_unbalanced(design: &Design) -> Result<f64> {
    require_two_level(design)?;
    let x = design.runs();
    let h = DMatrix::from_fn(x.nrows(), x.ncols() + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let (sum, _, total, _) = pair_stats(&h);
    Ok(sum / total as f64)
}

/// log |H*ᵀH* + K/τ²| with H* = [1 | X] and K = diag(0, 1, …, 1).
pub(crate) fn bayes_log_det(x: &DMatrix<f64>, tau2: f64) -> Option<f64> {
    let (n, d) = (x.nrows(), x.ncols());
    let h = DMatrix::from_fn(n, d + 1, |i, j| if j == 0 { 1.0 } else { x[(i, j - 1)] });
    let mut m = h.transpose() * &h;
    for j in 1..=d {
        m[(j, j)] += 1.0 / tau2;
    }
    m.cholesky().map(|c| 2.0 * c.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Bayesian D criterion |H*ᵀH* + K/τ²|^{1/(d+1)}.
pub fn bayes_d(design: &Design, tau2: f64) -> Result<SsdCriterionValue> {
    if !(tau2 > 0.0) || !tau2.is_finite() {
        return Err(Error::Domain(format!("tau2 must be positive and finite, got {tau2}")));
    }
    let d = design.d();
    let ld = bayes_log_det(design.runs(), tau2)
        .ok_or_else(|| Error::Numeric("posterior information matrix is not positive definite".into()))?;
    let value = (ld / (d + 1) as f64).exp();
    if !value.is_finite() {
        return Err(Error::Numeric("non-finite determinant".into()));
    }
    let (_, orth, total, max) = pair_stats(design.runs());
    Ok(SsdCriterionValue {
        criterion: SsdCriterion::BayesD,
        value,
        orthogonal_pairs: orth,
        total_pairs: total,
        max_abs_s: max,
        lower_bound: None,
        tau2: Some(tau2),
    })
}

/// Lin's half-fraction: keep the runs of a Plackett–Burman design whose
/// branching column equals `keep` (±1) and drop that column.
pub fn lin_ssd(pb: &Design, branch: usize, keep: i8) -> Result<Design> {
    require_two_level(pb)?;
    if branch >= pb.d() {
        return Err(Error::IndexOutOfRange { index: branch, d: pb.d() });
    }
    if keep.abs() != 1 {
        return Err(Error::InvalidArgument("keep must be +1 or -1".into()));
    }
    let rows: Vec<Vec<f64>> = pb
        .rows()
        .into_iter()
        .filter(|r| r[branch] == keep as f64)
        .map(|mut r| {
            r.remove(branch);
            r
        })
        .collect();
    let tag = format!("lin half-fraction of {} on x{}={keep:+}", pb.provenance().construction, branch + 1);
    Design::from_rows(&rows, Coding::TwoLevel, Provenance::new(tag))
}

/// Wu's augmentation: append the elementwise product of each listed column
/// pair as a new variable.
pub fn wu_ssd(pb: &Design, pairs: &[(usize, usize)]) -> Result<Design> {
    require_two_level(pb)?;
    let d = pb.d();
    if let Some(&(a, b)) = pairs.iter().find(|(a, b)| *a >= d || *b >= d || a == b) {
        return Err(Error::InvalidArgument(format!("invalid column pair ({}, {})", a + 1, b + 1)));
    }
    let x = pb.runs();
    let runs = DMatrix::from_fn(pb.n(), d + pairs.len(), |i, j| {
        if j < d {
            x[(i, j)]
        } else {
            let (a, b) = pairs[j - d];
            x[(i, a)] * x[(i, b)]
        }
    });
    let tag = format!("wu augmentation of {} with {} products", pb.provenance().construction, pairs.len());
    Design::new(runs, Coding::TwoLevel, Provenance::new(tag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorial::plackett_burman;

    #[test]
    fn orthogonal_design_has_zero_es2() {
        let pb = plackett_burman(12).unwrap();
        let v = es2(&pb).unwrap();
        assert_eq!(v.value, 0.0);
        assert_eq!(v.orthogonal_pairs, 55);
    }

    #[test]
    fn bounds_for_classical_sizes() {
        assert_eq!(es2_lower_bound(6, 10), Some(4.0));
        assert!((es2_lower_bound(12, 21).unwrap() - 6.857142857).abs() < 1e-8);
        assert_eq!(es2_lower_bound(7, 10), None);
        // Orthogonal arrays attain zero.
        assert_eq!(es2_lower_bound(12, 11), Some(0.0));
    }

    #[test]
    fn bayes_d_rejects_bad_tau() {
        let pb = plackett_burman(12).unwrap();
        assert!(bayes_d(&pb, 0.0).is_err());
        assert!(bayes_d(&pb, f64::NAN).is_err());
    }

    #[test]
    fn bayes_d_approaches_n_for_orthogonal_designs() {
        let pb = plackett_burman(8).unwrap();
        let v = bayes_d(&pb, 1e12).unwrap().value;
        assert!((v - 8.0).abs() < 1e-6);
    }

    #[test]
    fn es2_needs_two_columns() {
        let d = Design::from_rows(&[vec![1.0], vec![-1.0]], Coding::TwoLevel, Provenance::new("t")).unwrap();
        assert!(matches!(es2(&d), Err(Error::Domain(_))));
    }
}
