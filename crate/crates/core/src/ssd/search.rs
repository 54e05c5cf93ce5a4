use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;

use crate::design::{Coding, Design, Provenance};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

use super::{bayes_log_det, SsdCriterion};

/// Settings for [`search_ssd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsdSearch {
    pub criterion: SsdCriterion,
    pub restarts: usize,
    /// Annealing moves per restart (E(s²)) or exchange passes (Bayesian D).
    pub iterations: usize,
    pub tau2: f64,
    pub seed: u64,
}

impl Default for SsdSearch {
    fn default() -> Self {
        Self { criterion: SsdCriterion::Es2, restarts: 20, iterations: 10_000, tau2: 5.0, seed: 0 }
    }
}

/// Searches for an n-run design in d two-level variables.
///
/// E(s²) uses simulated annealing over within-column swaps of a +1 and a −1,
/// which keeps every column balanced; for odd n, where balance is
/// impossible, it uses single-cell flips on the E(s²) that includes the
/// intercept column. Bayesian D uses coordinate exchange over single cells.
/// Returns the best design over all restarts (ties go to the lowest restart).
pub fn search_ssd(n: usize, d: usize, opts: SsdSearch) -> Result<Design> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("search needs n >= 4, got {n}")));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("search needs d >= 2, got {d}")));
    }
    if opts.criterion == SsdCriterion::BayesD && !(opts.tau2 > 0.0) {
        return Err(Error::Domain("tau2 must be positive".into()));
    }
    let restarts = opts.restarts.max(1);
    let (score, _, x) = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(opts.seed, k as u64);
            let (score, x) = match opts.criterion {
                SsdCriterion::Es2 if n % 2 == 0 => anneal_balanced(n, d, opts.iterations, &mut rng),
                SsdCriterion::Es2 => anneal_cells(n, d, opts.iterations, &mut rng),
                SsdCriterion::BayesD => exchange_bayes(n, d, opts.iterations, opts.tau2, &mut rng),
            };
            (score, k, x)
        })
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("at least one restart");
    if !score.is_finite() {
        return Err(Error::ConstructionFailed("no nonsingular design found".into()));
    }
    let tag = match opts.criterion {
        SsdCriterion::Es2 => format!("E(s^2) search n={n} d={d}"),
        SsdCriterion::BayesD => format!("Bayesian D search n={n} d={d} tau2={}", opts.tau2),
    };
    let runs = DMatrix::from_fn(n, d, |i, j| x[i][j] as f64);
    Design::new(runs, Coding::TwoLevel, Provenance::seeded(tag, opts.seed))
}

fn random_balanced(n: usize, d: usize, rng: &mut Rng) -> Vec<Vec<i32>> {
    let mut x = vec![vec![0; d]; n];
    let mut col: Vec<i32> = (0..n).map(|i| if i < n / 2 { 1 } else { -1 }).collect();
    for j in 0..d {
        col.shuffle(rng);
        for i in 0..n {
            x[i][j] = col[i];
        }
    }
    x
}

fn gram(x: &[Vec<i32>], d: usize) -> Vec<Vec<i64>> {
    let mut s = vec![vec![0i64; d]; d];
    for row in x {
        for a in 0..d {
            for b in 0..d {
                s[a][b] += (row[a] * row[b]) as i64;
            }
        }
    }
    s
}

fn off_diag_sq(s: &[Vec<i64>]) -> i64 {
    let d = s.len();
    (0..d).flat_map(|a| (a + 1..d).map(move |b| (a, b))).map(|(a, b)| s[a][b] * s[a][b]).sum()
}

struct Schedule {
    temp: f64,
    every: usize,
}

impl Schedule {
    fn new(t0: f64, iterations: usize) -> Self {
        Self { temp: t0.max(1e-9), every: (iterations / 100).max(1) }
    }

    fn accept(&self, delta: f64, rng: &mut Rng) -> bool {
        delta <= 0.0 || rng.gen::<f64>() < (-delta / self.temp).exp()
    }

    fn step(&mut self, it: usize) {
        if (it + 1) % self.every == 0 {
            self.temp *= 0.95;
        }
    }
}

/// Change of Σ_{a<b} s_ab² when x[r1][c] and x[r2][c] both flip sign.
fn swap_delta(x: &[Vec<i32>], s: &[Vec<i64>], c: usize, r1: usize, r2: usize) -> (i64, Vec<i64>) {
    let d = s.len();
    let mut ds = vec![0i64; d];
    let mut delta = 0;
    for j in (0..d).filter(|&j| j != c) {
        let v = -2 * (x[r1][c] * x[r1][j]) as i64 - 2 * (x[r2][c] * x[r2][j]) as i64;
        ds[j] = v;
        let new = s[c][j] + v;
        delta += new * new - s[c][j] * s[c][j];
    }
    (delta, ds)
}

fn random_swap(x: &[Vec<i32>], n: usize, d: usize, rng: &mut Rng) -> (usize, usize, usize) {
    let c = rng.gen_range(0..d);
    loop {
        let r1 = rng.gen_range(0..n);
        let r2 = rng.gen_range(0..n);
        if x[r1][c] != x[r2][c] {
            return (c, r1, r2);
        }
    }
}

fn anneal_balanced(n: usize, d: usize, iterations: usize, rng: &mut Rng) -> (f64, Vec<Vec<i32>>) {
    let mut x = random_balanced(n, d, rng);
    let mut s = gram(&x, d);
    let mut cur = off_diag_sq(&s);
    let mut best = (cur, x.clone());
    let t0 = (0..100)
        .map(|_| {
            let (c, r1, r2) = random_swap(&x, n, d, rng);
            swap_delta(&x, &s, c, r1, r2).0.abs() as f64
        })
        .sum::<f64>()
        / 100.0;
    let mut sched = Schedule::new(t0, iterations);
    let floor = super::es2_lower_bound(n, d).map(|b| b * (d * (d - 1)) as f64 / 2.0);
    for it in 0..iterations {
        let (c, r1, r2) = random_swap(&x, n, d, rng);
        let (delta, ds) = swap_delta(&x, &s, c, r1, r2);
        if sched.accept(delta as f64, rng) {
            x[r1][c] = -x[r1][c];
            x[r2][c] = -x[r2][c];
            for j in (0..d).filter(|&j| j != c) {
                s[c][j] += ds[j];
                s[j][c] += ds[j];
            }
            cur += delta;
            if cur < best.0 {
                best = (cur, x.clone());
                if floor.is_some_and(|f| cur as f64 <= f + 1e-9) {
                    break;
                }
            }
        }
        sched.step(it);
    }
    debug_assert_eq!(off_diag_sq(&gram(&best.1, d)), best.0);
    (2.0 * best.0 as f64 / (d * (d - 1)) as f64, best.1)
}

/// Single-cell flips with the intercept as an extra fixed column.
fn anneal_cells(n: usize, d: usize, iterations: usize, rng: &mut Rng) -> (f64, Vec<Vec<i32>>) {
    let with_ones = |x: &[Vec<i32>]| -> Vec<Vec<i32>> {
        x.iter().map(|r| std::iter::once(1).chain(r.iter().copied()).collect()).collect()
    };
    let mut x: Vec<Vec<i32>> = (0..n).map(|_| (0..d).map(|_| if rng.gen() { 1 } else { -1 }).collect()).collect();
    let score = |x: &[Vec<i32>]| off_diag_sq(&gram(&with_ones(x), d + 1));
    let mut cur = score(&x);
    let mut best = (cur, x.clone());
    let t0 = (0..100)
        .map(|_| {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..d));
            x[i][j] = -x[i][j];
            let v = (score(&x) - cur).abs() as f64;
            x[i][j] = -x[i][j];
            v
        })
        .sum::<f64>()
        / 100.0;
    let mut sched = Schedule::new(t0, iterations);
    for it in 0..iterations {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..d));
        x[i][j] = -x[i][j];
        let new = score(&x);
        if sched.accept((new - cur) as f64, rng) {
            cur = new;
            if cur < best.0 {
                best = (cur, x.clone());
            }
        } else {
            x[i][j] = -x[i][j];
        }
        sched.step(it);
    }
    (2.0 * best.0 as f64 / ((d + 1) * d) as f64, best.1)
}

/// Coordinate exchange maximizing the Bayesian D log-determinant; the
/// returned score is its negation so smaller is better.
fn exchange_bayes(n: usize, d: usize, passes: usize, tau2: f64, rng: &mut Rng) -> (f64, Vec<Vec<i32>>) {
    let mut x: Vec<Vec<i32>> = (0..n).map(|_| (0..d).map(|_| if rng.gen() { 1 } else { -1 }).collect()).collect();
    let eval = |x: &[Vec<i32>]| {
        let m = DMatrix::from_fn(n, d, |i, j| x[i][j] as f64);
        bayes_log_det(&m, tau2).unwrap_or(f64::NEG_INFINITY)
    };
    let mut cur = eval(&x);
    for _ in 0..passes.max(1) {
        let mut improved = false;
        for i in 0..n {
            for j in 0..d {
                x[i][j] = -x[i][j];
                let v = eval(&x);
                if v > cur + 1e-10 {
                    cur = v;
                    improved = true;
                } else {
                    x[i][j] = -x[i][j];
                }
            }
        }
        if !improved {
            break;
        }
    }
    (-cur, x)
}
