use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::design::{Coding, Design, Provenance};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Position of a point inside its bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Jitter {
    /// Uniform within the bin.
    #[default]
    Random,
    /// Bin centre.
    Midpoint,
}

impl Jitter {
    pub(crate) fn offset(self, rng: &mut Rng) -> f64 {
        match self {
            Jitter::Random => rng.gen::<f64>(),
            Jitter::Midpoint => 0.5,
        }
    }
}

pub(crate) fn random_lhs_matrix(n: usize, d: usize, jitter: Jitter, rng: &mut Rng) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, d);
    let mut perm: Vec<usize> = (0..n).collect();
    for j in 0..d {
        perm.shuffle(rng);
        for i in 0..n {
            x[(i, j)] = (perm[i] as f64 + jitter.offset(rng)) / n as f64;
        }
    }
    x
}

/// Random Latin hypercube of n points in [0,1]^d: in every variable each of
/// the n bins [k/n, (k+1)/n) holds exactly one point.
pub fn lhs_random(n: usize, d: usize, jitter: Jitter, seed: u64) -> Result<Design> {
    if n < 2 || d == 0 {
        return Err(Error::InvalidArgument(format!("latin hypercube needs n >= 2 and d >= 1, got n={n}, d={d}")));
    }
    let mut rng = rng::stream(seed, 0);
    let x = random_lhs_matrix(n, d, jitter, &mut rng);
    Design::new(x, Coding::Unit, Provenance::seeded(format!("lhs n={n}"), seed))
}

/// Latin hypercube built from an orthogonal array with symbols 0..s−1: the
/// n/s runs carrying symbol k in a column are spread at random over the
/// n/s fine bins inside coarse bin k.
pub fn lhs_oa(oa: &[Vec<usize>], jitter: Jitter, seed: u64) -> Result<Design> {
    let n = oa.len();
    let d = oa.first().map_or(0, Vec::len);
    if n < 2 || d == 0 || oa.iter().any(|r| r.len() != d) {
        return Err(Error::InvalidArgument("orthogonal array must be a non-empty rectangle".into()));
    }
    let s = oa.iter().flatten().max().map_or(0, |m| m + 1);
    if s < 2 || n % s != 0 {
        return Err(Error::InvalidArgument(format!("{n} runs cannot be split evenly over {s} symbols")));
    }
    let per = n / s;
    let mut rng = rng::stream(seed, 0);
    let mut x = DMatrix::zeros(n, d);
    for j in 0..d {
        for k in 0..s {
            let rows: Vec<usize> = (0..n).filter(|&i| oa[i][j] == k).collect();
            if rows.len() != per {
                return Err(Error::InvalidArgument(format!(
                    "symbol {k} appears {} times in column {}, expected {per}",
                    rows.len(),
                    j + 1
                )));
            }
            let mut fine: Vec<usize> = (0..per).collect();
            fine.shuffle(&mut rng);
            for (&i, &f) in rows.iter().zip(&fine) {
                x[(i, j)] = ((k * per + f) as f64 + jitter.offset(&mut rng)) / n as f64;
            }
        }
    }
    Design::new(x, Coding::Unit, Provenance::seeded(format!("oa-based lhs n={n} s={s}"), seed))
}

/// True when every column of a [0,1] design hits each of the n bins once.
pub fn is_latin_hypercube(x: &DMatrix<f64>) -> bool {
    let n = x.nrows();
    (0..x.ncols()).all(|j| {
        let mut seen = vec![false; n];
        x.column(j).iter().all(|&v| {
            let b = ((v * n as f64).floor() as usize).min(n - 1);
            !std::mem::replace(&mut seen[b], true)
        })
    })
}
