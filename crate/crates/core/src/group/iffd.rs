use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::design::{build_model_matrix, least_squares, Coding, Design, Provenance, ScreeningOutcome, TermSet};
use crate::error::{Error, Result};
use crate::factorial::{foldover, hadamard};
use crate::rng;

use super::{Grouping, Oracle};

/// Settings for [`iffd`].
#[derive(Debug, Clone, PartialEq)]
pub struct IffdOptions {
    /// Number of groups, a power of two.
    pub groups: usize,
    pub stages: usize,
    /// Probability that a stage uses the mid-level 0 in place of −1.
    pub midlevel_prob: f64,
    /// Probability that a variable's levels are swapped within a stage.
    pub sign_flip_prob: f64,
    /// A group is important when its estimated effect exceeds δ.
    pub delta: f64,
    pub seed: u64,
}

impl Default for IffdOptions {
    fn default() -> Self {
        Self { groups: 8, stages: 4, midlevel_prob: 0.25, sign_flip_prob: 0.5, delta: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IffdResult {
    pub outcome: ScreeningOutcome,
    /// Intersection of important groups after each stage.
    pub running_intersection: Vec<BTreeSet<usize>>,
    pub runs: usize,
}

/// Iterated fractional factorial design.
///
/// Every stage reuses the 2g-run foldover of a g×g Hadamard matrix with a
/// fresh random assignment of variables to groups and of groups to columns,
/// and with random level swaps per variable. Group effects are estimated on
/// the ±1 column scale; in a mid-level stage the low level becomes 0, so
/// estimates are doubled to stay comparable. Variables whose group is
/// important in every stage are declared active.
pub fn iffd(oracle: &Oracle, opts: &IffdOptions) -> Result<IffdResult> {
    let d = oracle.d();
    let g = opts.groups;
    if g < 2 || !g.is_power_of_two() {
        return Err(Error::Domain(format!("number of groups must be a power of two >= 2, got {g}")));
    }
    if d < g {
        return Err(Error::Domain(format!("need d >= g, got d = {d}, g = {g}")));
    }
    if opts.stages == 0 {
        return Err(Error::InvalidArgument("need at least one stage".into()));
    }
    for p in [opts.midlevel_prob, opts.sign_flip_prob] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("probability {p} outside [0, 1]")));
        }
    }
    let h = hadamard(g)?;
    let rows: Vec<Vec<f64>> = h.rows().iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
    let base = Design::from_rows(&rows, Coding::TwoLevel, Provenance::new(format!("hadamard {g}")))?;
    let design = foldover(&base)?;
    let mm = build_model_matrix(&design, &TermSet::canonical(g, true, true, false, false))?;

    let start_calls = oracle.calls();
    let mut rng = rng::stream(opts.seed, 0);
    let mut running: Option<BTreeSet<usize>> = None;
    let mut history = Vec::with_capacity(opts.stages);
    let mut stage_info = Vec::with_capacity(opts.stages);
    for stage in 0..opts.stages {
        let grouping = Grouping::random(d, g, &mut rng)?;
        let mut columns: Vec<usize> = (0..g).collect();
        columns.shuffle(&mut rng);
        let flips: Vec<f64> = (0..d).map(|_| if rng.gen::<f64>() < opts.sign_flip_prob { -1.0 } else { 1.0 }).collect();
        let mid = rng.gen::<f64>() < opts.midlevel_prob;
        let mut y = Vec::with_capacity(design.n());
        for i in 0..design.n() {
            let x: Vec<f64> = (0..d)
                .map(|v| {
                    let z = design.get(i, columns[grouping.group_of(v)]) * flips[v];
                    if mid && z < 0.0 {
                        0.0
                    } else {
                        z
                    }
                })
                .collect();
            y.push(oracle.eval(&x)?);
        }
        let fit = least_squares(&mm, &y)?;
        let scale = if mid { 2.0 } else { 1.0 };
        let effects: Vec<f64> = (0..g).map(|k| scale * fit.coefficients[1 + columns[k]]).collect();
        let important: BTreeSet<usize> = (0..d).filter(|&v| effects[grouping.group_of(v)].abs() > opts.delta).collect();
        let next: BTreeSet<usize> = match running {
            None => important,
            Some(prev) => prev.intersection(&important).copied().collect(),
        };
        stage_info.push(serde_json::json!({
            "stage": stage + 1,
            "midlevel": mid,
            "group_effects": effects,
            "candidates": next.iter().map(|v| v + 1).collect::<Vec<_>>(),
        }));
        history.push(next.clone());
        running = Some(next);
    }
    let selected = running.unwrap_or_default();
    let runs = oracle.calls() - start_calls;
    let stats = (0..d).map(|v| if selected.contains(&v) { 1.0 } else { 0.0 }).collect();
    let details = serde_json::json!({ "runs": runs, "stages": stage_info });
    let outcome = ScreeningOutcome::new("iffd", d, selected, stats).with_details(details);
    Ok(IffdResult { outcome, running_intersection: history, runs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_must_be_power_of_two() {
        let o = Oracle::new(20, |_| 0.0);
        let opts = IffdOptions { groups: 6, ..Default::default() };
        assert!(matches!(iffd(&o, &opts), Err(Error::Domain(_))));
    }

    #[test]
    fn zero_oracle_selects_nothing() {
        let o = Oracle::new(32, |_| 0.0);
        let r = iffd(&o, &IffdOptions { delta: 0.1, ..Default::default() }).unwrap();
        assert!(r.outcome.selected.is_empty());
        assert_eq!(r.runs, 4 * 16);
    }

    #[test]
    fn intersection_never_grows() {
        let o = Oracle::new(64, |x| 5.0 * x[10] + 3.0 * x[40]);
        let r = iffd(&o, &IffdOptions { delta: 0.5, stages: 6, seed: 3, ..Default::default() }).unwrap();
        for w in r.running_intersection.windows(2) {
            assert!(w[1].is_subset(&w[0]));
        }
    }
}
