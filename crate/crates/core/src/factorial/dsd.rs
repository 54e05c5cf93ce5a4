use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;

use crate::design::{Coding, Design, Provenance};
use crate::error::{Error, Result};
use crate::rng;

use super::hadamard::jacobsthal;
use super::int_design;
use super::tables::{to_rows, DSD6};

/// Settings for the coordinate-exchange search used when no closed-form
/// template is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsdSearch {
    pub restarts: usize,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for DsdSearch {
    fn default() -> Self {
        Self { restarts: 20, max_passes: 50, seed: 0 }
    }
}

/// Definitive screening design for even d ≥ 4 with the default search
/// settings.
pub fn definitive_screening(d: usize) -> Result<Design> {
    definitive_screening_with(d, DsdSearch::default())
}

/// Definitive screening design: d mirrored run pairs, the j-th pair with
/// x_j = 0, followed by a centre run.
///
/// d = 6 returns the stored design. When d − 1 is prime the top half is a
/// Paley conference matrix; otherwise it is found by coordinate exchange on
/// det(CᵀC).
pub fn definitive_screening_with(d: usize, search: DsdSearch) -> Result<Design> {
    if d < 4 || d % 2 == 1 {
        return Err(Error::InvalidArgument(format!("definitive screening needs even d >= 4, got {d}")));
    }
    if d == 6 {
        return Ok(int_design(&to_rows(&DSD6), Coding::ThreeLevel, "definitive screening d=6"));
    }
    let (top, construction, seed) = if is_prime(d - 1) {
        (conference(d - 1), format!("definitive screening d={d} (conference)"), None)
    } else {
        let top = search_template(d, search)?;
        (top, format!("definitive screening d={d} (coordinate exchange)"), Some(search.seed))
    };
    let mut rows = Vec::with_capacity(2 * d + 1);
    for r in &top {
        rows.push(r.clone());
        rows.push(r.iter().map(|v| -v).collect());
    }
    rows.push(vec![0; d]);
    if let Some(msg) = orthogonality_violation(&rows) {
        return Err(Error::ConstructionFailed(msg));
    }
    let design = int_design(&rows, Coding::ThreeLevel, &construction);
    Ok(match seed {
        Some(s) => design.with_provenance(Provenance::seeded(construction, s)),
        None => design,
    })
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|k| k * k <= q).all(|k| q % k != 0)
}

/// Conference matrix of order q + 1 for prime q: zero diagonal, CᵀC = qI.
fn conference(q: usize) -> Vec<Vec<i32>> {
    let n = q + 1;
    let jac = jacobsthal(q);
    let lower = if q % 4 == 1 { 1 } else { -1 };
    let mut c = vec![vec![0; n]; n];
    for j in 1..n {
        c[0][j] = 1;
        c[j][0] = lower;
    }
    for i in 0..q {
        for j in 0..q {
            c[i + 1][j + 1] = jac[i][j];
        }
    }
    c
}

fn log_det_info(c: &[Vec<i32>]) -> f64 {
    let d = c.len();
    let m = DMatrix::from_fn(d, d, |i, j| c[i][j] as f64);
    let info = m.transpose() * m;
    match info.cholesky() {
        Some(ch) => 2.0 * ch.l().diagonal().iter().map(|v| v.ln()).sum::<f64>(),
        None => f64::NEG_INFINITY,
    }
}

fn search_template(d: usize, search: DsdSearch) -> Result<Vec<Vec<i32>>> {
    let restarts = search.restarts.max(1);
    let best = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(search.seed, k as u64);
            let mut c: Vec<Vec<i32>> = (0..d)
                .map(|i| (0..d).map(|j| if i == j { 0 } else if rng.gen() { 1 } else { -1 }).collect())
                .collect();
            let mut value = log_det_info(&c);
            for _ in 0..search.max_passes {
                let mut improved = false;
                for i in 0..d {
                    for j in (0..d).filter(|&j| j != i) {
                        c[i][j] = -c[i][j];
                        let v = log_det_info(&c);
                        if v > value + 1e-10 {
                            value = v;
                            improved = true;
                        } else {
                            c[i][j] = -c[i][j];
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            (value, k, c)
        })
        .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
        .expect("at least one restart");
    if !best.0.is_finite() {
        return Err(Error::ConstructionFailed(format!(
            "no nonsingular main-effect template found for d={d} after {restarts} restarts"
        )));
    }
    Ok(best.2)
}

/// Checks mains against intercept, quadratics and two-factor interactions in
/// integer arithmetic.
fn orthogonality_violation(rows: &[Vec<i32>]) -> Option<String> {
    let d = rows[0].len();
    for i in 0..d {
        if rows.iter().map(|r| r[i]).sum::<i32>() != 0 {
            return Some(format!("x{} not orthogonal to intercept", i + 1));
        }
        for j in 0..d {
            if rows.iter().map(|r| r[i] * r[j] * r[j]).sum::<i32>() != 0 {
                return Some(format!("x{} not orthogonal to x{}^2", i + 1, j + 1));
            }
            for k in j + 1..d {
                if rows.iter().map(|r| r[i] * r[j] * r[k]).sum::<i32>() != 0 {
                    return Some(format!("x{} not orthogonal to x{}x{}", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conference_matrices_are_orthogonal() {
        for q in [5, 7, 11, 13, 19] {
            let c = conference(q);
            let n = q + 1;
            for a in 0..n {
                assert_eq!(c[a][a], 0);
                for b in 0..n {
                    let dot: i32 = (0..n).map(|r| c[r][a] * c[r][b]).sum();
                    assert_eq!(dot, if a == b { q as i32 } else { 0 }, "q={q}");
                }
            }
        }
    }

    #[test]
    fn searched_template_is_nonsingular() {
        let d = definitive_screening_with(10, DsdSearch { restarts: 4, ..Default::default() }).unwrap();
        assert_eq!(d.n(), 21);
        assert_eq!(d.provenance().seed, Some(0));
    }

    #[test]
    fn odd_or_small_d_rejected() {
        assert!(definitive_screening(5).is_err());
        assert!(definitive_screening(2).is_err());
    }

    #[test]
    fn pairs_hold_own_variable_at_zero() {
        let d = definitive_screening(8).unwrap();
        for j in 0..8 {
            assert_eq!(d.get(2 * j, j), 0.0);
            assert_eq!(d.get(2 * j + 1, j), 0.0);
        }
    }
}
