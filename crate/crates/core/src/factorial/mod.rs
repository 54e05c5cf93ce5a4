//! Two- and three-level factorial constructions: full factorials, regular
//! fractions, Hadamard and Plackett–Burman designs, definitive screening
//! designs, systematic fractional replicates, foldovers and OFAAT plans.

mod dsd;
mod hadamard;
mod regular;
mod simple;
pub mod tables;

pub use dsd::{definitive_screening, definitive_screening_with, DsdSearch};
pub use hadamard::{hadamard, is_hadamard, plackett_burman, HadamardMatrix};
pub use regular::{full_factorial, regular_fraction, DefiningWordSet, Word, MAX_FACTORIAL_VARS};
pub use simple::{foldover, ofaat, sfrd};

use nalgebra::DMatrix;

use crate::design::{Coding, Design, Provenance};

/// Builds a two-level design from integer ±1 rows.
pub(crate) fn two_level(rows: &[Vec<i32>], construction: &str) -> Design {
    int_design(rows, Coding::TwoLevel, construction)
}

pub(crate) fn int_design(rows: &[Vec<i32>], coding: Coding, construction: &str) -> Design {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    let m = DMatrix::from_fn(n, d, |i, j| rows[i][j] as f64);
    Design::new(m, coding, Provenance::new(construction)).expect("constructed entries match coding")
}
