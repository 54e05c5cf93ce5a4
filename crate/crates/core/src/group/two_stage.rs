use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::design::{build_model_matrix, least_squares, Design, ModelMatrix, ScreeningOutcome, Term, TermSet};
use crate::error::{Error, Result};

use super::designs::{resolution_v, smallest_pb};
use super::{Grouping, Oracle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageOneMode {
    /// Grouped main effects only.
    Classical,
    /// Grouped main effects and two-factor interactions.
    Interaction,
}

/// Rule for declaring an estimated effect large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecisionRule {
    /// |coefficient| > δ.
    Threshold(f64),
    /// Two-sided t-test on the coefficient at the given level.
    TTest { alpha: f64 },
}

impl DecisionRule {
    /// δ for deterministic oracles; a t-test at level 0.2 for stochastic
    /// ones.
    pub fn default_for(oracle: &Oracle, delta: f64) -> Self {
        if oracle.is_stochastic() {
            DecisionRule::TTest { alpha: 0.2 }
        } else {
            DecisionRule::Threshold(delta)
        }
    }
}

/// One tested effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectDecision {
    pub term: String,
    pub estimate: f64,
    pub p_value: Option<f64>,
    pub active: bool,
}

/// Record of a two-stage group screening experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct GsRun {
    pub stage1: Design,
    pub stage1_decisions: Vec<EffectDecision>,
    /// Variables (0-based) carried to stage 2.
    pub carried: Vec<usize>,
    pub stage2: Option<Design>,
    pub stage2_decisions: Vec<EffectDecision>,
    pub n1: usize,
    pub n2: usize,
}

impl GsRun {
    pub fn total_runs(&self) -> usize {
        self.n1 + self.n2
    }
}

fn decide(mm: &ModelMatrix, y: &[f64], rule: DecisionRule) -> Result<Vec<EffectDecision>> {
    let fit = least_squares(mm, y)?;
    let terms = mm.terms().terms();
    let n = mm.nrows();
    let p = mm.ncols();
    let (se, dist) = match rule {
        DecisionRule::Threshold(_) => (vec![f64::NAN; p], None),
        DecisionRule::TTest { .. } => {
            if n <= p {
                return Err(Error::Domain(format!("t-tests need residual degrees of freedom; n = {n}, p = {p}")));
            }
            let sigma2 = fit.rss / (n - p) as f64;
            let h = mm.matrix();
            let xtx = h.transpose() * h;
            let inv = xtx
                .try_inverse()
                .ok_or_else(|| Error::Numeric("information matrix is singular".into()))?;
            let se = (0..p).map(|j| (sigma2 * inv[(j, j)]).sqrt()).collect();
            let dist = StudentsT::new(0.0, 1.0, (n - p) as f64).map_err(|e| Error::Numeric(e.to_string()))?;
            (se, Some(dist))
        }
    };
    Ok(terms
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_intercept())
        .map(|(j, t)| {
            let est = fit.coefficients[j];
            let (p_value, active) = match (rule, &dist) {
                (DecisionRule::Threshold(delta), _) => (None, est.abs() > delta),
                (DecisionRule::TTest { alpha }, Some(dist)) => {
                    let pv = if se[j] > 0.0 { 2.0 * (1.0 - dist.cdf((est / se[j]).abs())) } else if est != 0.0 { 0.0 } else { 1.0 };
                    (Some(pv), pv < alpha)
                }
                _ => unreachable!("t-test always has a distribution"),
            };
            EffectDecision { term: t.label(), estimate: est, p_value, active }
        })
        .collect())
}

/// Expands a grouped design (one column per group) to the d individual
/// variables; variables outside every listed group stay at −1.
fn expand(grouped: &Design, groups: &[Vec<usize>], d: usize) -> Vec<Vec<f64>> {
    (0..grouped.n())
        .map(|i| {
            let mut x = vec![-1.0; d];
            for (g, members) in groups.iter().enumerate() {
                for &v in members {
                    x[v] = grouped.get(i, g);
                }
            }
            x
        })
        .collect()
}

fn two_factor_terms(pairs: &[(usize, usize)]) -> Vec<Term> {
    pairs.iter().map(|&(a, b)| Term::product(&[a, b])).collect()
}

/// Classical or interaction two-stage group screening.
///
/// Stage 1 runs the smallest Plackett–Burman design on the g grouped
/// variables (classical) or a resolution V fraction (interaction) and fits
/// grouped main effects, plus grouped interactions in interaction mode.
/// Variables in groups with a large main effect or a large interaction are
/// carried to stage 2, which uses the same design family on the carried
/// variables; inactive variables are held at their low level.
pub fn group_screen(
    oracle: &Oracle,
    grouping: &Grouping,
    mode: StageOneMode,
    rule: DecisionRule,
) -> Result<(GsRun, ScreeningOutcome)> {
    let d = oracle.d();
    if grouping.d() != d {
        return Err(Error::Shape { expected: d, found: grouping.d() });
    }
    let g = grouping.g();
    let extra = usize::from(matches!(rule, DecisionRule::TTest { .. }));
    let stage1 = match mode {
        StageOneMode::Classical => smallest_pb(g, g + 1 + extra)?,
        StageOneMode::Interaction => resolution_v(g)?,
    };
    let group_terms = match mode {
        StageOneMode::Classical => TermSet::canonical(g, true, true, false, false),
        StageOneMode::Interaction => TermSet::canonical(g, true, true, true, false),
    };
    let members: Vec<Vec<usize>> = (0..g).map(|k| grouping.members(k)).collect();
    let runs1 = expand(&stage1, &members, d);
    let y1: Vec<f64> = runs1.iter().map(|x| oracle.eval(x)).collect::<Result<_>>()?;
    let mm1 = build_model_matrix(&stage1, &group_terms)?;
    let dec1 = decide(&mm1, &y1, rule)?;

    let mut active_groups = BTreeSet::new();
    let mut active_pairs = Vec::new();
    for (t, dec) in group_terms.terms().iter().filter(|t| !t.is_intercept()).zip(&dec1) {
        if !dec.active {
            continue;
        }
        let vars: Vec<usize> = t.variables().collect();
        active_groups.extend(vars.iter().copied());
        if vars.len() == 2 {
            active_pairs.push((vars[0], vars[1]));
        }
    }
    let carried: Vec<usize> = active_groups.iter().flat_map(|&k| members[k].clone()).collect::<BTreeSet<_>>().into_iter().collect();

    let mut run = GsRun {
        stage1: stage1.clone(),
        stage1_decisions: dec1,
        carried: carried.clone(),
        stage2: None,
        stage2_decisions: Vec::new(),
        n1: stage1.n(),
        n2: 0,
    };
    let mut selected = BTreeSet::new();
    let mut stats = vec![0.0; d];
    if !carried.is_empty() {
        let m = carried.len();
        let local = |v: usize| carried.iter().position(|&c| c == v).expect("carried");
        let mut terms = vec![Term::intercept()];
        terms.extend((0..m).map(Term::main));
        if mode == StageOneMode::Interaction {
            let mut pairs = BTreeSet::new();
            for &k in &active_groups {
                for (a, &u) in members[k].iter().enumerate() {
                    for &v in &members[k][a + 1..] {
                        pairs.insert((local(u).min(local(v)), local(u).max(local(v))));
                    }
                }
            }
            for &(ga, gb) in &active_pairs {
                for &u in &members[ga] {
                    for &v in &members[gb] {
                        pairs.insert((local(u).min(local(v)), local(u).max(local(v))));
                    }
                }
            }
            terms.extend(two_factor_terms(&pairs.into_iter().collect::<Vec<_>>()));
        }
        let p = terms.len();
        let stage2 = match mode {
            StageOneMode::Classical => smallest_pb(m, m + 1 + extra)?,
            StageOneMode::Interaction => resolution_v(m)?,
        };
        if stage2.n() < p + extra {
            return Err(Error::ConstructionUnavailable { order: p, supported: "stage-2 design too small for the model".into() });
        }
        let groups2: Vec<Vec<usize>> = carried.iter().map(|&v| vec![v]).collect();
        let runs2 = expand(&stage2, &groups2, d);
        let y2: Vec<f64> = runs2.iter().map(|x| oracle.eval(x)).collect::<Result<_>>()?;
        let ts = TermSet::from_terms(terms)?;
        let mm2 = build_model_matrix(&stage2, &ts)?;
        let dec2 = decide(&mm2, &y2, rule)?;
        for (t, dec) in ts.terms().iter().filter(|t| !t.is_intercept()).zip(&dec2) {
            let vars: Vec<usize> = t.variables().map(|v| carried[v]).collect();
            if vars.len() == 1 {
                stats[vars[0]] = dec.estimate;
            }
            if dec.active {
                selected.extend(vars);
            }
        }
        run.n2 = stage2.n();
        run.stage2 = Some(stage2);
        run.stage2_decisions = dec2
            .into_iter()
            .map(|mut e| {
                e.term = relabel(&e.term, &carried);
                e
            })
            .collect();
    }
    let details = serde_json::json!({
        "mode": mode,
        "n1": run.n1,
        "n2": run.n2,
        "carried": carried.iter().map(|v| v + 1).collect::<Vec<_>>(),
        "stage1": run.stage1_decisions,
        "stage2": run.stage2_decisions,
    });
    let outcome = ScreeningOutcome::new("group-screening", d, selected, stats).with_details(details);
    Ok((run, outcome))
}

/// Maps stage-2 local labels `x{j}` back to original variable labels.
fn relabel(label: &str, carried: &[usize]) -> String {
    label
        .split('x')
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (num, rest) = s.split_at(s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len()));
            match num.parse::<usize>() {
                Ok(j) if j >= 1 && j <= carried.len() => format!("x{}{rest}", carried[j - 1] + 1),
                _ => format!("x{s}"),
            }
        })
        .collect()
}
