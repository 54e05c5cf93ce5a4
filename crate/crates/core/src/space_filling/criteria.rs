use nalgebra::DMatrix;

use crate::design::Design;
use crate::error::{Error, Result};

pub(crate) fn pair_phi_term(x: &DMatrix<f64>, a: usize, b: usize, q: f64) -> f64 {
    let d2: f64 = (0..x.ncols()).map(|l| (x[(a, l)] - x[(b, l)]).powi(2)).sum();
    if d2 == 0.0 {
        f64::INFINITY
    } else {
        d2.powf(-q / 2.0)
    }
}

pub(crate) fn pair_maxpro_term(x: &DMatrix<f64>, a: usize, b: usize) -> f64 {
    (0..x.ncols()).map(|l| (x[(a, l)] - x[(b, l)]).powi(-2)).product()
}

fn check(design: &Design) -> Result<()> {
    if design.n() < 2 {
        return Err(Error::InvalidArgument("criterion needs at least two points".into()));
    }
    Ok(())
}

/// Maximin surrogate φ_q = (Σ_{i<j} dist_ij^{−q})^{1/q}; +∞ if two points
/// coincide.
pub fn phi_q(design: &Design, q: f64) -> Result<f64> {
    check(design)?;
    if !(q > 0.0) {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    let x = design.runs();
    let n = design.n();
    let sum: f64 = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| pair_phi_term(x, a, b, q)).sum();
    Ok(sum.powf(1.0 / q))
}

/// Maximum-projection criterion: mean over pairs of Π_l (x_il − x_jl)^{−2};
/// +∞ if two points share a coordinate.
pub fn maxpro(design: &Design) -> Result<f64> {
    check(design)?;
    let x = design.runs();
    let n = design.n();
    let sum: f64 = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| pair_maxpro_term(x, a, b)).sum();
    Ok(sum / (n * (n - 1) / 2) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Coding, Provenance};

    fn unit(rows: &[Vec<f64>]) -> Design {
        Design::from_rows(rows, Coding::Unit, Provenance::new("t")).unwrap()
    }

    #[test]
    fn unit_distance_gives_one() {
        let d = unit(&[vec![0.0, 0.0], vec![1.0, 0.0]]);
        assert!((phi_q(&d, 15.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_are_infinite() {
        let d = unit(&[vec![0.2, 0.3], vec![0.2, 0.3]]);
        assert_eq!(phi_q(&d, 2.0).unwrap(), f64::INFINITY);
        assert_eq!(maxpro(&d).unwrap(), f64::INFINITY);
    }

    #[test]
    fn maxpro_single_pair() {
        let d = unit(&[vec![0.1, 0.2], vec![0.4, 0.7]]);
        let expected = 1.0 / (0.3f64.powi(2) * 0.5f64.powi(2));
        assert!((maxpro(&d).unwrap() - expected).abs() < 1e-9 * expected);
    }
}
