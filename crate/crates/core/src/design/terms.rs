use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Design;
use crate::error::{Error, Result};

/// A monomial over design variables: a sorted list of (variable, power).
/// The empty monomial is the intercept.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Term(Vec<(usize, u32)>);

impl Term {
    pub fn intercept() -> Self {
        Term(Vec::new())
    }

    pub fn main(var: usize) -> Self {
        Term(vec![(var, 1)])
    }

    pub fn quadratic(var: usize) -> Self {
        Term(vec![(var, 2)])
    }

    /// Product of distinct variables, e.g. `[0, 1]` is x1x2.
    pub fn product(vars: &[usize]) -> Self {
        Self::from_factors(vars.iter().map(|&v| (v, 1)))
    }

    /// Builds a monomial, merging repeated variables by adding powers.
    pub fn from_factors<I: IntoIterator<Item = (usize, u32)>>(factors: I) -> Self {
        let mut f: Vec<(usize, u32)> = Vec::new();
        for (v, p) in factors {
            if p == 0 {
                continue;
            }
            match f.iter_mut().find(|(w, _)| *w == v) {
                Some(slot) => slot.1 += p,
                None => f.push((v, p)),
            }
        }
        f.sort_unstable();
        Term(f)
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_intercept(&self) -> bool {
        self.0.is_empty()
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, p)| p).sum()
    }

    /// Distinct variables involved.
    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|(v, _)| *v)
    }

    pub fn max_variable(&self) -> Option<usize> {
        self.0.iter().map(|(v, _)| *v).max()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.0.iter().map(|&(v, p)| x[v].powi(p as i32)).product()
    }

    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &(v, p) in &self.0 {
            if p == 1 {
                write!(f, "x{}", v + 1)?;
            } else {
                write!(f, "x{}^{}", v + 1, p)?;
            }
        }
        Ok(())
    }
}

/// An ordered basis of model terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSet {
    terms: Vec<Term>,
}

impl TermSet {
    /// Validates an explicit term list: no duplicates, intercept (if any) first.
    pub fn from_terms(terms: Vec<Term>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, t) in terms.iter().enumerate() {
            if !seen.insert(t.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate term {t}")));
            }
            if t.is_intercept() && i != 0 {
                return Err(Error::InvalidArgument("intercept must be the first term".into()));
            }
        }
        Ok(Self { terms })
    }

    pub fn intercept_only() -> Self {
        Self { terms: vec![Term::intercept()] }
    }

    /// Intercept plus main effects.
    pub fn main_effects(d: usize) -> Self {
        Self::canonical(d, true, true, false, false)
    }

    /// Intercept, mains and all two-variable interactions.
    pub fn with_interactions(d: usize) -> Self {
        Self::canonical(d, true, true, true, false)
    }

    /// Intercept, mains, two-variable interactions and pure quadratics.
    pub fn full_quadratic(d: usize) -> Self {
        Self::canonical(d, true, true, true, true)
    }

    /// Canonical order: intercept, mains ascending, two-variable
    /// interactions lexicographic, quadratics ascending.
    pub fn canonical(d: usize, intercept: bool, mains: bool, two_fi: bool, quad: bool) -> Self {
        let mut terms = Vec::new();
        if intercept {
            terms.push(Term::intercept());
        }
        if mains {
            terms.extend((0..d).map(Term::main));
        }
        if two_fi {
            for i in 0..d {
                for j in i + 1..d {
                    terms.push(Term::product(&[i, j]));
                }
            }
        }
        if quad {
            terms.extend((0..d).map(Term::quadratic));
        }
        Self { terms }
    }

    /// All products of exactly `order` distinct variables, lexicographic.
    pub fn interactions_of_order(d: usize, order: usize) -> Self {
        let mut terms = Vec::new();
        let mut idx: Vec<usize> = (0..order).collect();
        if order == 0 || order > d {
            return Self { terms };
        }
        loop {
            terms.push(Term::product(&idx));
            let mut k = order;
            while k > 0 && idx[k - 1] == d - order + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for m in k..order {
                idx[m] = idx[m - 1] + 1;
            }
        }
        Self { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_intercept(&self) -> bool {
        self.terms.first().is_some_and(Term::is_intercept)
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(Term::label).collect()
    }

    pub fn position(&self, term: &Term) -> Option<usize> {
        self.terms.iter().position(|t| t == term)
    }

    /// Concatenates two term sets, rejecting overlaps.
    pub fn concat(&self, other: &TermSet) -> Result<TermSet> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TermSet::from_terms(terms)
    }
}

/// Numeric expansion H of a term set on a design.
#[derive(Debug, Clone)]
pub struct ModelMatrix {
    h: DMatrix<f64>,
    terms: TermSet,
}

impl ModelMatrix {
    /// Wraps an explicit matrix; the term set is only used for labels.
    pub fn from_parts(h: DMatrix<f64>, terms: TermSet) -> Result<Self> {
        if h.ncols() != terms.len() {
            return Err(Error::Shape { expected: terms.len(), found: h.ncols() });
        }
        Ok(Self { h, terms })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn terms(&self) -> &TermSet {
        &self.terms
    }

    pub fn nrows(&self) -> usize {
        self.h.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.h.ncols()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.h.column(j).iter().copied().collect()
    }
}

/// Evaluates every term of `terms` on every run of `design`.
pub fn build_model_matrix(design: &Design, terms: &TermSet) -> Result<ModelMatrix> {
    let d = design.d();
    for t in terms.terms() {
        if let Some(v) = t.max_variable() {
            if v >= d {
                return Err(Error::IndexOutOfRange { index: v, d });
            }
        }
    }
    let runs = design.runs();
    let h = DMatrix::from_fn(design.n(), terms.len(), |i, j| {
        terms.terms()[j].factors().iter().map(|&(v, p)| runs[(i, v)].powi(p as i32)).product()
    });
    Ok(ModelMatrix { h, terms: terms.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Coding, Provenance};

    fn two_run() -> Design {
        Design::from_rows(&[vec![-1.0], vec![1.0]], Coding::TwoLevel, Provenance::new("t")).unwrap()
    }

    #[test]
    fn intercept_only_is_column_of_ones() {
        let d = two_run();
        let m = build_model_matrix(&d, &TermSet::intercept_only()).unwrap();
        assert_eq!(m.matrix(), &DMatrix::from_element(2, 1, 1.0));
    }

    #[test]
    fn direct_evaluation_with_quadratic() {
        let d = two_run();
        let ts = TermSet::from_terms(vec![Term::intercept(), Term::main(0), Term::quadratic(0)]).unwrap();
        let m = build_model_matrix(&d, &ts).unwrap();
        assert_eq!(m.matrix(), &DMatrix::from_row_slice(2, 3, &[1.0, -1.0, 1.0, 1.0, 1.0, 1.0]));
    }

    #[test]
    fn out_of_range_variable_is_an_error() {
        let d = two_run();
        let ts = TermSet::from_terms(vec![Term::main(1)]).unwrap();
        assert!(matches!(build_model_matrix(&d, &ts), Err(Error::IndexOutOfRange { index: 1, d: 1 })));
    }

    #[test]
    fn term_set_rules() {
        assert!(TermSet::from_terms(vec![Term::main(0), Term::main(0)]).is_err());
        assert!(TermSet::from_terms(vec![Term::main(0), Term::intercept()]).is_err());
        let ts = TermSet::full_quadratic(3);
        assert_eq!(
            ts.labels(),
            vec!["1", "x1", "x2", "x3", "x1x2", "x1x3", "x2x3", "x1^2", "x2^2", "x3^2"]
        );
    }

    #[test]
    fn interactions_of_order_counts() {
        assert_eq!(TermSet::interactions_of_order(5, 3).len(), 10);
        assert_eq!(TermSet::interactions_of_order(4, 4).labels(), vec!["x1x2x3x4"]);
        assert_eq!(TermSet::interactions_of_order(3, 2).labels(), vec!["x1x2", "x1x3", "x2x3"]);
    }

    #[test]
    fn repeated_factors_merge() {
        assert_eq!(Term::from_factors([(2, 1), (0, 1), (2, 1)]).label(), "x1x3^2");
    }
}
