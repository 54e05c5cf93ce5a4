use nalgebra::DMatrix;
use rand::Rng as _;

use crate::design::{Coding, Design, Provenance};
use crate::error::{Error, Result};
use crate::rng;

use super::criteria::{pair_maxpro_term, pair_phi_term};
use super::lhs::{is_latin_hypercube, random_lhs_matrix, Jitter};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Minimize φ_q with the given q.
    PhiQ(f64),
    /// Minimize the maximum-projection criterion.
    MaxPro,
}

/// Simulated-annealing settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub iterations: usize,
    /// Geometric cooling factor applied 100 times over the run.
    pub cooling: f64,
    /// Random swaps used to set the initial temperature.
    pub calibration_swaps: usize,
    pub jitter: Jitter,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { iterations: 10_000, cooling: 0.95, calibration_swaps: 100, jitter: Jitter::Random }
    }
}

struct PairSums {
    terms: DMatrix<f64>,
    total: f64,
}

fn term(x: &DMatrix<f64>, a: usize, b: usize, obj: Objective) -> f64 {
    match obj {
        Objective::PhiQ(q) => pair_phi_term(x, a, b, q),
        Objective::MaxPro => pair_maxpro_term(x, a, b),
    }
}

impl PairSums {
    fn new(x: &DMatrix<f64>, obj: Objective) -> Self {
        let n = x.nrows();
        let mut terms = DMatrix::zeros(n, n);
        let mut total = 0.0;
        for a in 0..n {
            for b in a + 1..n {
                let t = term(x, a, b, obj);
                terms[(a, b)] = t;
                terms[(b, a)] = t;
                total += t;
            }
        }
        Self { terms, total }
    }

    /// Change in the pair sum if rows `a` and `b` exchange their value in
    /// column `j`; `x` is modified in place and restored.
    fn swap_delta(&self, x: &mut DMatrix<f64>, a: usize, b: usize, j: usize, obj: Objective) -> (f64, Vec<(usize, usize, f64)>) {
        swap(x, a, b, j);
        let n = x.nrows();
        let mut changes = Vec::with_capacity(2 * n);
        let mut delta = 0.0;
        for &r in &[a, b] {
            for c in (0..n).filter(|&c| c != a && c != b) {
                let t = term(x, r, c, obj);
                delta += t - self.terms[(r, c)];
                changes.push((r, c, t));
            }
        }
        swap(x, a, b, j);
        (delta, changes)
    }

    fn apply(&mut self, delta: f64, changes: &[(usize, usize, f64)]) {
        for &(r, c, t) in changes {
            self.terms[(r, c)] = t;
            self.terms[(c, r)] = t;
        }
        self.total += delta;
    }
}

fn swap(x: &mut DMatrix<f64>, a: usize, b: usize, j: usize) {
    let t = x[(a, j)];
    x[(a, j)] = x[(b, j)];
    x[(b, j)] = t;
}

fn criterion(total: f64, n: usize, obj: Objective) -> f64 {
    match obj {
        Objective::PhiQ(q) => total.powf(1.0 / q),
        Objective::MaxPro => total / (n * (n - 1) / 2) as f64,
    }
}

/// Optimizes a random Latin hypercube by simulated annealing over swaps of
/// two entries within a column, which keep the Latin property. Returns the
/// best design seen, so the criterion is never worse than the start.
pub fn lhs_optimize(n: usize, d: usize, objective: Objective, schedule: Schedule, seed: u64) -> Result<Design> {
    if n < 3 || d == 0 {
        return Err(Error::InvalidArgument(format!("optimization needs n >= 3 and d >= 1, got n={n}, d={d}")));
    }
    if let Objective::PhiQ(q) = objective {
        if !(q > 0.0) {
            return Err(Error::Domain(format!("q must be positive, got {q}")));
        }
    }
    let mut rng = rng::stream(seed, 0);
    let mut x = random_lhs_matrix(n, d, schedule.jitter, &mut rng);
    let mut sums = PairSums::new(&x, objective);
    let mut best = (sums.total, x.clone());

    let pick = |rng: &mut rng::Rng| {
        let j = rng.gen_range(0..d);
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        (a, b, j)
    };
    let calib = schedule.calibration_swaps.max(1);
    let mut t0 = 0.0;
    for _ in 0..calib {
        let (a, b, j) = pick(&mut rng);
        t0 += sums.swap_delta(&mut x, a, b, j, objective).0.abs();
    }
    let mut temp = (t0 / calib as f64).max(f64::MIN_POSITIVE);
    let every = (schedule.iterations / 100).max(1);

    for it in 0..schedule.iterations {
        let (a, b, j) = pick(&mut rng);
        let (delta, changes) = sums.swap_delta(&mut x, a, b, j, objective);
        let accept = delta <= 0.0 || (delta.is_finite() && rng.gen::<f64>() < (-delta / temp).exp());
        if accept {
            swap(&mut x, a, b, j);
            sums.apply(delta, &changes);
            debug_assert!(is_latin_hypercube(&x));
            if sums.total < best.0 {
                best = (sums.total, x.clone());
            }
        }
        if (it + 1) % every == 0 {
            temp *= schedule.cooling;
        }
    }
    let name = match objective {
        Objective::PhiQ(q) => format!("maximin lhs n={n} q={q}"),
        Objective::MaxPro => format!("maxpro lhs n={n}"),
    };
    log::debug!("{name}: criterion {}", criterion(best.0, n, objective));
    Design::new(best.1, Coding::Unit, Provenance::seeded(name, seed))
}
