//! Shared data model: designs, term sets, model matrices, least squares,
//! alias matrices and screening metrics.

mod halfnormal;
pub mod io;
mod lsq;
mod metrics;
mod terms;

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use halfnormal::{half_normal_data, lenth, HalfNormalPoint, Lenth};
pub use lsq::{alias_matrix, least_squares, main_effects_t_tests, LeastSquaresFit, TTestRow};
pub use metrics::{screening_metrics, Metrics, ScreeningOutcome};
pub use terms::{build_model_matrix, ModelMatrix, Term, TermSet};

/// Level coding of a design's settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coding {
    /// Two levels, ±1.
    TwoLevel,
    /// Three levels, {−1, 0, +1}.
    ThreeLevel,
    /// Continuous settings in [0, 1].
    Unit,
    /// Continuous settings in [−1, 1].
    Symmetric,
}

impl Coding {
    pub fn admits(self, v: f64) -> bool {
        match self {
            Coding::TwoLevel => v == 1.0 || v == -1.0,
            Coding::ThreeLevel => v == 1.0 || v == -1.0 || v == 0.0,
            Coding::Unit => (0.0..=1.0).contains(&v),
            Coding::Symmetric => (-1.0..=1.0).contains(&v),
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, Coding::TwoLevel | Coding::ThreeLevel)
    }

    pub fn name(self) -> &'static str {
        match self {
            Coding::TwoLevel => "two-level",
            Coding::ThreeLevel => "three-level",
            Coding::Unit => "continuous [0,1]",
            Coding::Symmetric => "continuous [-1,1]",
        }
    }
}

/// Where a design came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(construction: impl Into<String>) -> Self {
        Self { construction: construction.into(), seed: None }
    }

    pub fn seeded(construction: impl Into<String>, seed: u64) -> Self {
        Self { construction: construction.into(), seed: Some(seed) }
    }
}

/// One estimable effect with the effects that bias it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliasString {
    pub term: String,
    /// Biasing terms with their alias coefficients.
    pub aliases: Vec<(String, f64)>,
}

/// Defining relation, resolution and alias structure of a design.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AliasReport {
    /// Signed words of the defining relation, e.g. `+x1x2x3x4`.
    pub defining_relation: Vec<String>,
    /// Minimum word length; `None` for designs that are not regular.
    pub resolution: Option<u32>,
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
    pub alias_matrix: Vec<Vec<f64>>,
    pub aliased: Vec<AliasString>,
}

impl AliasReport {
    /// Report holding only an alias matrix.
    pub fn from_matrix(a: &DMatrix<f64>, rows: &TermSet, cols: &TermSet) -> Self {
        let alias_matrix = (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect();
        Self {
            row_labels: rows.labels(),
            column_labels: cols.labels(),
            alias_matrix,
            ..Default::default()
        }
    }
}

/// An n×d experiment plan: one run per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    runs: DMatrix<f64>,
    coding: Coding,
    names: Vec<String>,
    provenance: Provenance,
}

pub(crate) fn default_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).collect()
}

impl Design {
    /// Builds a design with default names `x1..xd`, validating every entry
    /// against the coding.
    pub fn new(runs: DMatrix<f64>, coding: Coding, provenance: Provenance) -> Result<Self> {
        let names = default_names(runs.ncols());
        Self::with_names(runs, coding, names, provenance)
    }

    pub fn with_names(
        runs: DMatrix<f64>,
        coding: Coding,
        names: Vec<String>,
        provenance: Provenance,
    ) -> Result<Self> {
        if runs.nrows() == 0 || runs.ncols() == 0 {
            return Err(Error::InvalidArgument("design needs n >= 1 and d >= 1".into()));
        }
        if names.len() != runs.ncols() {
            return Err(Error::Shape { expected: runs.ncols(), found: names.len() });
        }
        let unique: HashSet<&String> = names.iter().collect();
        if unique.len() != names.len() {
            return Err(Error::InvalidArgument("variable names must be unique".into()));
        }
        if let Some((idx, v)) = runs.iter().enumerate().find(|(_, v)| !coding.admits(**v)) {
            let (r, c) = (idx % runs.nrows(), idx / runs.nrows());
            return Err(Error::InvalidArgument(format!(
                "entry ({r}, {c}) = {v} is not a valid {} setting",
                coding.name()
            )));
        }
        Ok(Self { runs, coding, names, provenance })
    }

    /// Builds a design from row vectors.
    pub fn from_rows(rows: &[Vec<f64>], coding: Coding, provenance: Provenance) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("ragged design rows".into()));
        }
        let runs = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
        Self::new(runs, coding, provenance)
    }

    pub fn n(&self) -> usize {
        self.runs.nrows()
    }

    pub fn d(&self) -> usize {
        self.runs.ncols()
    }

    pub fn runs(&self) -> &DMatrix<f64> {
        &self.runs
    }

    pub fn coding(&self) -> Coding {
        self.coding
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn get(&self, run: usize, var: usize) -> f64 {
        self.runs[(run, var)]
    }

    pub fn row(&self, run: usize) -> Vec<f64> {
        self.runs.row(run).iter().copied().collect()
    }

    pub fn column(&self, var: usize) -> Vec<f64> {
        self.runs.column(var).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|i| self.row(i)).collect()
    }

    /// Integer view of a two- or three-level design.
    pub fn to_int_rows(&self) -> Option<Vec<Vec<i32>>> {
        if !self.coding.is_discrete() {
            return None;
        }
        Some((0..self.n()).map(|i| self.runs.row(i).iter().map(|&v| v as i32).collect()).collect())
    }

    /// Affine map of a [0,1] design onto [−1,1].
    pub fn to_symmetric(&self) -> Result<Design> {
        match self.coding {
            Coding::Symmetric => Ok(self.clone()),
            Coding::Unit => Design::with_names(
                self.runs.map(|v| (2.0 * v - 1.0).clamp(-1.0, 1.0)),
                Coding::Symmetric,
                self.names.clone(),
                self.provenance.clone(),
            ),
            other => Err(Error::UnsupportedCoding(other.name().into())),
        }
    }

    /// Affine map of a [−1,1] design (or any discrete ±1/0 design) onto [0,1].
    pub fn to_unit(&self) -> Result<Design> {
        match self.coding {
            Coding::Unit => Ok(self.clone()),
            _ => Design::with_names(
                self.runs.map(|v| ((v + 1.0) / 2.0).clamp(0.0, 1.0)),
                Coding::Unit,
                self.names.clone(),
                self.provenance.clone(),
            ),
        }
    }

    /// Selects a subset of columns, keeping their names.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Design> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.d()) {
            return Err(Error::IndexOutOfRange { index: bad, d: self.d() });
        }
        let runs = DMatrix::from_fn(self.n(), cols.len(), |i, j| self.runs[(i, cols[j])]);
        let names = cols.iter().map(|&c| self.names[c].clone()).collect();
        Design::with_names(runs, self.coding, names, self.provenance.clone())
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Evaluates an output function on every run.
    pub fn evaluate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> Vec<f64> {
        (0..self.n()).map(|i| f(&self.row(i))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_entries_outside_coding() {
        let rows = vec![vec![1.0, 0.5]];
        assert!(Design::from_rows(&rows, Coding::TwoLevel, Provenance::new("t")).is_err());
        assert!(Design::from_rows(&rows, Coding::Unit, Provenance::new("t")).is_ok());
    }

    #[test]
    fn rejects_duplicate_names() {
        let runs = DMatrix::from_element(2, 2, 1.0);
        let names = vec!["a".to_string(), "a".to_string()];
        assert!(Design::with_names(runs, Coding::TwoLevel, names, Provenance::new("t")).is_err());
    }

    #[test]
    fn rejects_empty() {
        let runs = DMatrix::<f64>::zeros(0, 3);
        assert!(Design::new(runs, Coding::Unit, Provenance::new("t")).is_err());
    }

    #[test]
    fn affine_maps_round_trip() {
        let rows = vec![vec![0.0, 0.25], vec![1.0, 0.5]];
        let d = Design::from_rows(&rows, Coding::Unit, Provenance::new("t")).unwrap();
        let s = d.to_symmetric().unwrap();
        assert_eq!(s.row(0), vec![-1.0, -0.5]);
        assert_eq!(s.to_unit().unwrap().rows(), rows);
    }
}
