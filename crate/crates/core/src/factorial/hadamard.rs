use crate::design::Design;
use crate::error::{Error, Result};

use super::tables::{to_rows, PB12};
use super::two_level;

/// A square ±1 matrix with CᵀC = nI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HadamardMatrix {
    rows: Vec<Vec<i32>>,
}

impl HadamardMatrix {
    /// Wraps a matrix after checking the defining property exactly.
    pub fn from_rows(rows: Vec<Vec<i32>>) -> Result<Self> {
        if !is_hadamard(&rows) {
            return Err(Error::InvalidArgument("matrix is not Hadamard".into()));
        }
        Ok(Self { rows })
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<i32>] {
        &self.rows
    }

    /// Rows multiplied by −1 where needed so the first column is all +1.
    pub fn normalized(&self) -> HadamardMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| if r[0] < 0 { r.iter().map(|v| -v).collect() } else { r.clone() })
            .collect();
        HadamardMatrix { rows }
    }
}

/// Exact integer check of CᵀC = nI.
pub fn is_hadamard(rows: &[Vec<i32>]) -> bool {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n || r.iter().any(|v| v.abs() != 1)) {
        return false;
    }
    (0..n).all(|i| {
        (i..n).all(|j| {
            let dot: i32 = rows.iter().map(|r| r[i] * r[j]).sum();
            dot == if i == j { n as i32 } else { 0 }
        })
    })
}

fn is_prime(q: usize) -> bool {
    q >= 2 && (2..).take_while(|k| k * k <= q).all(|k| q % k != 0)
}

/// Quadratic character modulo a prime q.
pub(crate) fn legendre(a: i64, q: usize) -> i32 {
    let a = a.rem_euclid(q as i64) as usize;
    if a == 0 {
        return 0;
    }
    let mut r = 1usize;
    let mut b = a;
    let mut e = (q - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % q;
        }
        b = b * b % q;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Jacobsthal matrix Q_ij = χ(j − i) for prime q.
pub(crate) fn jacobsthal(q: usize) -> Vec<Vec<i32>> {
    (0..q).map(|i| (0..q).map(|j| legendre(j as i64 - i as i64, q)).collect()).collect()
}

fn sylvester(n: usize) -> Vec<Vec<i32>> {
    let mut h = vec![vec![1]];
    while h.len() < n {
        let m = h.len();
        let mut next = vec![vec![0; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = h[i][j];
                next[i][j + m] = h[i][j];
                next[i + m][j] = h[i][j];
                next[i + m][j + m] = -h[i][j];
            }
        }
        h = next;
    }
    h
}

/// Paley type I: n = q + 1 with q prime, q ≡ 3 (mod 4).
fn paley_one(q: usize) -> Vec<Vec<i32>> {
    let n = q + 1;
    let jac = jacobsthal(q);
    let mut h = vec![vec![0; n]; n];
    for j in 1..n {
        h[0][j] = 1;
        h[j][0] = -1;
    }
    for i in 0..q {
        for j in 0..q {
            h[i + 1][j + 1] = jac[i][j];
        }
    }
    for (i, row) in h.iter_mut().enumerate() {
        row[i] += 1;
    }
    h
}

const SUPPORTED: &str = "1, 2, powers of two (Sylvester) and q + 1 for primes q = 3 mod 4 (Paley I)";

/// Hadamard matrix of order n by Sylvester doubling or the Paley I
/// construction.
pub fn hadamard(n: usize) -> Result<HadamardMatrix> {
    let rows = if n >= 1 && n.is_power_of_two() {
        sylvester(n)
    } else if n > 4 && n % 4 == 0 && is_prime(n - 1) && (n - 1) % 4 == 3 {
        paley_one(n - 1)
    } else {
        return Err(Error::ConstructionUnavailable { order: n, supported: SUPPORTED.into() });
    };
    debug_assert!(is_hadamard(&rows));
    Ok(HadamardMatrix { rows })
}

/// Plackett–Burman design with n runs and n − 1 two-level variables.
/// The 12-run design is the stored canonical array.
pub fn plackett_burman(n: usize) -> Result<Design> {
    if n == 12 {
        return Ok(two_level(&to_rows(&PB12), "plackett-burman 12"));
    }
    if n < 4 {
        return Err(Error::ConstructionUnavailable { order: n, supported: SUPPORTED.into() });
    }
    let h = hadamard(n)?.normalized();
    let rows: Vec<Vec<i32>> = h.rows().iter().map(|r| r[1..].to_vec()).collect();
    Ok(two_level(&rows, &format!("plackett-burman {n}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supported_orders_satisfy_definition() {
        for n in [1, 2, 4, 8, 12, 16, 20, 24, 32] {
            let h = hadamard(n).unwrap();
            assert!(is_hadamard(h.rows()), "order {n}");
        }
    }

    #[test]
    fn unsupported_order_names_constructions() {
        match hadamard(28) {
            Err(Error::ConstructionUnavailable { order: 28, supported }) => assert!(supported.contains("Paley")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(hadamard(6).is_err());
    }

    #[test]
    fn legendre_symbols_mod_11() {
        let residues: Vec<i32> = (1..11).map(|a| legendre(a, 11)).collect();
        assert_eq!(residues, vec![1, -1, 1, 1, 1, -1, -1, -1, 1, -1]);
    }

    #[test]
    fn pb12_is_stored_table_with_hadamard_completion() {
        let d = plackett_burman(12).unwrap();
        let mut rows = d.to_int_rows().unwrap();
        for r in &mut rows {
            r.insert(0, 1);
        }
        assert!(is_hadamard(&rows));
    }
}
