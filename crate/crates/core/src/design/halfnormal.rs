use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

/// A point of a half-normal plot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfNormalPoint {
    /// Index of the estimate in the input vector.
    pub index: usize,
    pub quantile: f64,
    pub abs_estimate: f64,
}

/// Sorted absolute estimates paired with half-normal quantiles
/// Φ⁻¹(0.5 + 0.5·(i − 0.5)/p).
pub fn half_normal_data(estimates: &[f64]) -> Vec<HalfNormalPoint> {
    let p = estimates.len();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| estimates[a].abs().total_cmp(&estimates[b].abs()).then(a.cmp(&b)));
    order
        .into_iter()
        .enumerate()
        .map(|(rank, index)| {
            let prob = 0.5 + 0.5 * ((rank + 1) as f64 - 0.5) / p as f64;
            HalfNormalPoint { index, quantile: normal.inverse_cdf(prob), abs_estimate: estimates[index].abs() }
        })
        .collect()
}

/// Lenth's pseudo standard error of unreplicated effect estimates and the
/// resulting margin of error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lenth {
    pub pse: f64,
    pub margin: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// s₀ = 1.5·median|c|, PSE = 1.5·median{|c| : |c| < 2.5s₀} and margin
/// t_{1−α/2, m/3}·PSE. `None` for fewer than three estimates.
pub fn lenth(estimates: &[f64], alpha: f64) -> Option<Lenth> {
    let m = estimates.len();
    if m < 3 || !(alpha > 0.0 && alpha < 1.0) {
        return None;
    }
    let mut abs: Vec<f64> = estimates.iter().map(|c| c.abs()).collect();
    let s0 = 1.5 * median(&mut abs);
    let mut trimmed: Vec<f64> = abs.into_iter().filter(|c| *c < 2.5 * s0).collect();
    let pse = if trimmed.is_empty() { 0.0 } else { 1.5 * median(&mut trimmed) };
    let t = StudentsT::new(0.0, 1.0, m as f64 / 3.0).ok()?;
    Some(Lenth { pse, margin: t.inverse_cdf(1.0 - alpha / 2.0) * pse })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lenth_hand_example() {
        let l = lenth(&[1.0, 2.0, 3.0, 4.0, 100.0, -2.0], 0.05).unwrap();
        assert!((l.pse - 3.0).abs() < 1e-12);
        assert!((l.margin - 4.302652729911275 * 3.0).abs() < 1e-6);
        assert!(lenth(&[1.0, 2.0], 0.05).is_none());
    }

    #[test]
    fn zeros_give_zero_heights() {
        let pts = half_normal_data(&[0.0, 0.0, 0.0]);
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| p.abs_estimate == 0.0));
        assert!(pts.windows(2).all(|w| w[0].quantile < w[1].quantile));
    }

    #[test]
    fn heights_are_sorted_absolute_values() {
        let pts = half_normal_data(&[3.0, -1.0, 2.0]);
        let ys: Vec<f64> = pts.iter().map(|p| p.abs_estimate).collect();
        assert_eq!(ys, vec![1.0, 2.0, 3.0]);
        assert_eq!(pts[2].index, 0);
        // middle quantile for p = 3 is Φ⁻¹(0.75)
        assert!((pts[1].quantile - 0.674_489_750_196_081_7).abs() < 1e-6);
    }
}
