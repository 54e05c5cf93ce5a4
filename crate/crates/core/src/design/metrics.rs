use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Sensitivity, type I error rate and false discovery rate of a selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub sensitivity: f64,
    pub type_one: f64,
    pub fdr: f64,
}

/// Computes (φ_s, φ_I, φ_fdr) for 0-based index sets over `d` variables.
///
/// Degenerate cases: φ_s = 1 when the truth is empty, φ_fdr = 0 when
/// nothing is selected, φ_I = 0 when every variable is truly active.
pub fn screening_metrics(selected: &BTreeSet<usize>, truth: &BTreeSet<usize>, d: usize) -> Metrics {
    let hits = selected.intersection(truth).count() as f64;
    let false_pos = selected.iter().filter(|i| !truth.contains(i) && **i < d).count() as f64;
    let inactive = d.saturating_sub(truth.iter().filter(|&&i| i < d).count()) as f64;
    let sensitivity = if truth.is_empty() { 1.0 } else { hits / truth.len() as f64 };
    let fdr = if selected.is_empty() { 0.0 } else { false_pos / selected.len() as f64 };
    let type_one = if inactive == 0.0 { 0.0 } else { false_pos / inactive };
    Metrics { sensitivity, type_one, fdr }
}

/// Result of a screening analysis: selected variables (0-based), their
/// scores and, when the truth is known, the quality metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningOutcome {
    pub method: String,
    pub d: usize,
    pub selected: BTreeSet<usize>,
    pub statistics: Vec<f64>,
    pub truth: Option<BTreeSet<usize>>,
    pub metrics: Option<Metrics>,
    /// Method-specific diagnostics carried into the report.
    #[serde(default)]
    pub details: serde_json::Value,
}

impl ScreeningOutcome {
    pub fn new(method: impl Into<String>, d: usize, selected: BTreeSet<usize>, statistics: Vec<f64>) -> Self {
        Self { method: method.into(), d, selected, statistics, truth: None, metrics: None, details: serde_json::Value::Null }
    }

    /// Attaches the true active set and computes the metrics.
    pub fn with_truth(mut self, truth: &BTreeSet<usize>) -> Self {
        self.metrics = Some(screening_metrics(&self.selected, truth, self.d));
        self.truth = Some(truth.clone());
        self
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = details;
        self
    }

    /// Selected variables as 1-based labels `x{i}`.
    pub fn selected_labels(&self) -> Vec<String> {
        self.selected.iter().map(|i| format!("x{}", i + 1)).collect()
    }

    /// Report JSON: `{method, selected, statistics, metrics}` with 1-based
    /// selected indices.
    pub fn to_report(&self) -> serde_json::Value {
        serde_json::json!({
            "method": self.method,
            "selected": self.selected.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "selected_labels": self.selected_labels(),
            "statistics": self.statistics,
            "metrics": self.metrics.map(|m| serde_json::json!({
                "sensitivity": m.sensitivity,
                "type_one": m.type_one,
                "fdr": m.fdr,
            })),
            "details": self.details,
        })
    }
}
