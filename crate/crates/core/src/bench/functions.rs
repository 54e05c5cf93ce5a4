use std::collections::BTreeSet;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::rng;

/// Number of inputs of both benchmark functions.
pub const BENCH_D: usize = 20;

/// Coefficient seed shipped for the second benchmark function.
pub const FROZEN_COEFFICIENT_SEED: u64 = 1;

/// The first benchmark function with w_i = x_i/2 on [−1, 1]^20. The
/// modified version splits 5(w₄ − w₂₀)² into 5w₄² − 5w₂₀².
pub fn welch_function(x: &[f64]) -> f64 {
    welch_impl(x, false)
}

pub fn welch_modified(x: &[f64]) -> f64 {
    welch_impl(x, true)
}

fn welch_impl(x: &[f64], modified: bool) -> f64 {
    debug_assert_eq!(x.len(), BENCH_D);
    let w = |i: usize| 0.5 * x[i - 1];
    let quad = if modified { 5.0 * w(4).powi(2) - 5.0 * w(20).powi(2) } else { 5.0 * (w(4) - w(20)).powi(2) };
    5.0 * w(12) / (1.0 + w(1)) + quad + w(5) + 40.0 * w(19).powi(3) - 5.0 * w(19) + 0.05 * w(2) + 0.08 * w(3)
        - 0.03 * w(6)
        + 0.03 * w(7)
        - 0.09 * w(9)
        - 0.01 * w(10)
        - 0.07 * w(11)
        + 0.25 * w(13).powi(2)
        - 0.04 * w(14)
        + 0.06 * w(15)
        - 0.01 * w(17)
        - 0.03 * w(18)
}

/// Active variables of the first function, 0-based.
pub fn welch_truth() -> BTreeSet<usize> {
    [1, 4, 5, 12, 19, 20].iter().map(|v| v - 1).collect()
}

/// The second benchmark function: a polynomial of up to fourth order in
/// transformed inputs, with fixed large coefficients on x1..x10 and the
/// remaining first- and second-order coefficients drawn once from N(0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorrisFunction {
    pub seed: u64,
    pub modified: bool,
    pub beta0: f64,
    pub beta1: Vec<f64>,
    /// Upper-triangular pair coefficients, `beta2[j][k]` for j < k.
    pub beta2: Vec<Vec<f64>>,
    /// Nonzero third-order coefficients as (j, k, l, β).
    pub beta3: Vec<(usize, usize, usize, f64)>,
    /// Nonzero fourth-order coefficients as (j, k, l, u, β).
    pub beta4: Vec<(usize, usize, usize, usize, f64)>,
}

fn triples(range: std::ops::Range<usize>, beta: f64) -> Vec<(usize, usize, usize, f64)> {
    let mut out = Vec::new();
    for j in range.clone() {
        for k in j + 1..range.end {
            for l in k + 1..range.end {
                out.push((j, k, l, beta));
            }
        }
    }
    out
}

impl MorrisFunction {
    /// Coefficients are drawn in the order β₁₁..β₂₀, then β_jk for j < k
    /// lexicographically, skipping the fixed ones.
    pub fn new(seed: u64) -> Self {
        let d = BENCH_D;
        let mut rng = rng::stream(seed, 0);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let beta1: Vec<f64> = (0..d).map(|j| if j < 10 { 20.0 } else { draw() }).collect();
        let mut beta2 = vec![vec![0.0; d]; d];
        for j in 0..d {
            for k in j + 1..d {
                beta2[j][k] = if k < 6 { -15.0 } else { draw() };
            }
        }
        let beta3 = triples(0..5, -10.0);
        let mut beta4 = Vec::new();
        for j in 0..4 {
            for k in j + 1..4 {
                for l in k + 1..4 {
                    for u in l + 1..4 {
                        beta4.push((j, k, l, u, 5.0));
                    }
                }
            }
        }
        Self { seed, modified: false, beta0: 0.0, beta1, beta2, beta3, beta4 }
    }

    /// The variant whose third-order terms sit on x6..x10 with β = −5 in
    /// place of those on x1..x5.
    pub fn modified(seed: u64) -> Self {
        Self { modified: true, beta3: triples(5..10, -5.0), ..Self::new(seed) }
    }

    pub fn truth() -> BTreeSet<usize> {
        (0..10).collect()
    }

    /// v_i = x_i except v_i = 11(x_i + 1)/(5x_i + 6) − 1 for i = 3, 5, 7.
    pub fn transform(i: usize, x: f64) -> f64 {
        if matches!(i, 2 | 4 | 6) {
            11.0 * (x + 1.0) / (5.0 * x + 6.0) - 1.0
        } else {
            x
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), BENCH_D);
        let v: Vec<f64> = x.iter().enumerate().map(|(i, &xi)| Self::transform(i, xi)).collect();
        let mut y = self.beta0;
        for j in 0..BENCH_D {
            y += self.beta1[j] * v[j];
            for k in j + 1..BENCH_D {
                y += self.beta2[j][k] * v[j] * v[k];
            }
        }
        for &(j, k, l, b) in &self.beta3 {
            y += b * v[j] * v[k] * v[l];
        }
        for &(j, k, l, u, b) in &self.beta4 {
            y += b * v[j] * v[k] * v[l] * v[u];
        }
        y
    }
}

/// A benchmark function with its true active set.
#[derive(Debug, Clone, PartialEq)]
pub enum BenchFunction {
    Welch { modified: bool },
    Morris(MorrisFunction),
}

impl BenchFunction {
    pub fn example(id: u8, coefficient_seed: u64, modified: bool) -> Option<Self> {
        match id {
            1 => Some(BenchFunction::Welch { modified }),
            2 => Some(BenchFunction::Morris(if modified {
                MorrisFunction::modified(coefficient_seed)
            } else {
                MorrisFunction::new(coefficient_seed)
            })),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            BenchFunction::Welch { modified: false } => "example1".into(),
            BenchFunction::Welch { modified: true } => "example1-modified".into(),
            BenchFunction::Morris(m) if m.modified => format!("example2-modified(seed {})", m.seed),
            BenchFunction::Morris(m) => format!("example2(seed {})", m.seed),
        }
    }

    pub fn d(&self) -> usize {
        BENCH_D
    }

    pub fn truth(&self) -> BTreeSet<usize> {
        match self {
            BenchFunction::Welch { .. } => welch_truth(),
            BenchFunction::Morris(_) => MorrisFunction::truth(),
        }
    }

    /// Evaluates at x ∈ [−1, 1]^20.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            BenchFunction::Welch { modified } => welch_impl(x, *modified),
            BenchFunction::Morris(m) => m.eval(x),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            BenchFunction::Welch { modified } => serde_json::json!({"function": "example1", "modified": modified}),
            BenchFunction::Morris(m) => serde_json::json!({"function": "example2", "coefficients": m}),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(i: usize) -> Vec<f64> {
        let mut x = vec![0.0; BENCH_D];
        x[i - 1] = 1.0;
        x
    }

    #[test]
    fn welch_hand_values() {
        assert_eq!(welch_function(&[0.0; 20]), 0.0);
        assert!((welch_function(&unit(5)) - 0.5).abs() < 1e-15);
        assert!((welch_function(&unit(19)) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn morris_transform_keeps_endpoints() {
        for i in [2, 4, 6] {
            assert!((MorrisFunction::transform(i, -1.0) + 1.0).abs() < 1e-15);
            assert!((MorrisFunction::transform(i, 1.0) - 1.0).abs() < 1e-15);
            assert!((MorrisFunction::transform(i, 0.0) - 5.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn morris_at_origin_depends_only_on_transformed_inputs() {
        let f = MorrisFunction::new(3);
        let v = 5.0 / 6.0;
        let (a, b, c) = (2, 4, 6);
        let expected = v * (f.beta1[a] + f.beta1[b] + f.beta1[c])
            + v * v * (f.beta2[a][b] + f.beta2[a][c] + f.beta2[b][c]);
        assert!((f.eval(&[0.0; 20]) - expected).abs() < 1e-9);
    }

    #[test]
    fn morris_coefficients_frozen_by_seed() {
        assert_eq!(MorrisFunction::new(9), MorrisFunction::new(9));
        assert_ne!(MorrisFunction::new(9).beta1, MorrisFunction::new(10).beta1);
        let f = MorrisFunction::new(9);
        assert_eq!(f.beta1[..10], [20.0; 10]);
        assert_eq!(f.beta2[0][5], -15.0);
        assert_eq!(f.beta3.len(), 10);
        assert_eq!(f.beta4.len(), 1);
    }
}
