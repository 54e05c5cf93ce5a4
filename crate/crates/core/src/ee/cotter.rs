use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::design::ScreeningOutcome;
use crate::error::{Error, Result};

pub const DEFAULT_COTTER_THRESHOLD: f64 = 0.01;

/// Cotter's odd- and even-order contrasts and derived indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CotterIndices {
    pub c_odd: Vec<f64>,
    pub c_even: Vec<f64>,
    /// M(i) = |C_o(i)| + |C_e(i)|.
    pub m: Vec<f64>,
    /// S(i) = M(i) / Σ M; all zero when every contrast vanishes.
    pub s: Vec<f64>,
}

/// Contrasts from the 2d + 2 outputs of an SFRD in construction order.
pub fn cotter_contrasts(y: &[f64], d: usize) -> Result<CotterIndices> {
    if y.len() != 2 * d + 2 {
        return Err(Error::Shape { expected: 2 * d + 2, found: y.len() });
    }
    if d == 0 {
        return Err(Error::InvalidArgument("d must be at least 1".into()));
    }
    let (low, high) = (y[0], y[2 * d + 1]);
    let mut c_odd = Vec::with_capacity(d);
    let mut c_even = Vec::with_capacity(d);
    for i in 1..=d {
        let top = high - y[d + i];
        let bottom = y[i] - low;
        c_odd.push(0.25 * (top + bottom));
        c_even.push(0.25 * (top - bottom));
    }
    let m: Vec<f64> = c_odd.iter().zip(&c_even).map(|(a, b)| a.abs() + b.abs()).collect();
    let total: f64 = m.iter().sum();
    let s = if total > 0.0 { m.iter().map(|v| v / total).collect() } else { vec![0.0; d] };
    Ok(CotterIndices { c_odd, c_even, m, s })
}

/// Selects variables with S(i) above the threshold. The report also carries
/// the elementary effects at the low and high ends of the design; M(i)
/// equals the larger of their absolute values.
pub fn cotter_sensitivity(indices: &CotterIndices, threshold: f64) -> Result<ScreeningOutcome> {
    let total: f64 = indices.m.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Domain("all Cotter contrasts are zero".into()));
    }
    let d = indices.s.len();
    let selected: BTreeSet<usize> = (0..d).filter(|&i| indices.s[i] > threshold).collect();
    let ee_low: Vec<f64> = (0..d).map(|i| indices.c_odd[i] - indices.c_even[i]).collect();
    let ee_high: Vec<f64> = (0..d).map(|i| indices.c_odd[i] + indices.c_even[i]).collect();
    let details = serde_json::json!({
        "threshold": threshold,
        "c_odd": indices.c_odd,
        "c_even": indices.c_even,
        "m": indices.m,
        "ee_low": ee_low,
        "ee_high": ee_high,
    });
    Ok(ScreeningOutcome::new("sfrd", d, selected, indices.s.clone()).with_details(details))
}
