//! Randomized invariants, run through proptest's `TestRunner` so the
//! acceptance harness can call them as ordinary functions.

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use screenkit::design::{build_model_matrix, screening_metrics, Term, TermSet};
use screenkit::factorial::{definitive_screening, foldover};
use screenkit::gp::gp_loglik;
use screenkit::group::{group_screen, sequential_bifurcation, DecisionRule, Grouping, Oracle, SbOptions, StageOneMode};
use screenkit::space_filling::{lhs_optimize, lhs_random, morris_plan, Jitter, Objective, Schedule};
use screenkit::{Coding, Design, Provenance};

use crate::{ensure, Check};

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Check
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string().replace('\n', " "))
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn lift(c: Check) -> Result<(), TestCaseError> {
    c.map_err(fail)
}

/// Bin index of every point, per column; a Latin hypercube has a
/// permutation of 0..n in each.
fn is_stratified(d: &Design) -> bool {
    let n = d.n();
    (0..d.d()).all(|j| {
        let mut bins: Vec<usize> = d.column(j).iter().map(|v| ((v * n as f64).floor() as usize).min(n - 1)).collect();
        bins.sort_unstable();
        bins == (0..n).collect::<Vec<_>>()
    })
}

/// Random and optimized Latin hypercubes put exactly one point in each of
/// the n bins of every variable.
pub fn lhs_stratification() -> Check {
    let strategy = (3usize..30, 1usize..8, any::<u64>(), prop_oneof![Just(Jitter::Random), Just(Jitter::Midpoint)]);
    run(64, strategy, |(n, d, seed, jitter)| {
        let x = lhs_random(n, d, jitter, seed).map_err(|e| fail(e.to_string()))?;
        lift(ensure(is_stratified(&x), || format!("random n={n} d={d}")))?;
        let schedule = Schedule { iterations: 300, jitter, ..Schedule::default() };
        for objective in [Objective::PhiQ(15.0), Objective::MaxPro] {
            let x = lhs_optimize(n, d, objective, schedule, seed).map_err(|e| fail(e.to_string()))?;
            lift(ensure(is_stratified(&x), || format!("{objective:?} n={n} d={d}")))?;
        }
        Ok(())
    })
}

/// Every Morris trajectory moves each variable exactly once, by ±Δ, and
/// stays on the f-level grid.
pub fn morris_step_structure() -> Check {
    let strategy = (1usize..10, 1usize..6, prop_oneof![Just(4usize), Just(6), Just(8)], any::<u64>());
    run(64, strategy, |(d, r, f, seed)| {
        let plan = morris_plan(d, r, f, None, seed).map_err(|e| fail(e.to_string()))?;
        let delta = plan.delta();
        let x = plan.design.runs();
        lift(ensure(x.nrows() == r * (d + 1), || format!("{} rows for d={d} r={r}", x.nrows())))?;
        let on_grid = x.iter().all(|v| {
            let k = v * (f - 1) as f64;
            (k - k.round()).abs() < 1e-9 && (-1e-12..=1.0 + 1e-12).contains(v)
        });
        lift(ensure(on_grid, || "point off the grid".into()))?;
        for t in 0..r {
            let rows: Vec<usize> = plan.trajectory(t).collect();
            let mut moved = BTreeSet::new();
            for w in rows.windows(2) {
                let changed: Vec<usize> = (0..d).filter(|&j| x[(w[1], j)] != x[(w[0], j)]).collect();
                lift(ensure(changed.len() == 1, || format!("trajectory {t}: step changes {changed:?}")))?;
                let j = changed[0];
                let step = (x[(w[1], j)] - x[(w[0], j)]).abs();
                lift(ensure((step - delta).abs() < 1e-12, || format!("step {step} != delta {delta}")))?;
                moved.insert(j);
            }
            lift(ensure(moved.len() == d, || format!("trajectory {t} moves {} of {d} variables", moved.len())))?;
        }
        Ok(())
    })
}

fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Main-effect columns orthogonal to the intercept, to every two-factor
/// interaction and to every quadratic column.
fn mains_orthogonal_to_even_terms(design: &Design) -> Check {
    let d = design.d();
    let mut list = vec![Term::intercept()];
    list.extend((0..d).map(Term::main));
    for i in 0..d {
        list.push(Term::quadratic(i));
        for j in i + 1..d {
            list.push(Term::product(&[i, j]));
        }
    }
    let terms = TermSet::from_terms(list).map_err(|e| e.to_string())?;
    let mm = build_model_matrix(design, &terms).map_err(|e| e.to_string())?;
    let mains = 1..=d;
    for i in mains.clone() {
        for k in (0..mm.ncols()).filter(|k| !mains.contains(k)) {
            let v = inner(&mm.column(i), &mm.column(k));
            ensure(v.abs() < 1e-9, || format!("x{i} vs {}: {v}", mm.terms().terms()[k].label()))?;
        }
    }
    Ok(())
}

/// Foldovers of random two-level designs and definitive screening designs
/// estimate main effects clear of the intercept, two-factor interactions
/// and quadratics; conference-matrix DSDs also have orthogonal mains.
pub fn foldover_orthogonality() -> Check {
    let strategy = (2usize..10, 2usize..7).prop_flat_map(|(n, d)| {
        proptest::collection::vec(proptest::collection::vec(prop_oneof![Just(-1.0), Just(1.0)], d), n)
    });
    run(64, strategy, |rows| {
        let base = Design::from_rows(&rows, Coding::TwoLevel, Provenance::new("random")).map_err(|e| fail(e.to_string()))?;
        let folded = foldover(&base).map_err(|e| fail(e.to_string()))?;
        lift(mains_orthogonal_to_even_terms(&folded))
    })?;
    for d in [4, 6, 8, 10, 12, 14] {
        let dsd = definitive_screening(d).map_err(|e| format!("d={d}: {e}"))?;
        ensure(dsd.n() == 2 * d + 1, || format!("d={d}: {} runs", dsd.n()))?;
        mains_orthogonal_to_even_terms(&dsd).map_err(|e| format!("dsd d={d}: {e}"))?;
        if matches!(d - 1, 3 | 5 | 7 | 11 | 13) {
            for i in 0..d {
                for j in i + 1..d {
                    let v = inner(&dsd.column(i), &dsd.column(j));
                    ensure(v == 0.0, || format!("dsd d={d}: x{} vs x{}: {v}", i + 1, j + 1))?;
                }
            }
        }
    }
    Ok(())
}

/// φ_s, φ_I and φ_fdr stay in [0, 1] and follow the stated edge cases.
pub fn metric_conventions() -> Check {
    let strategy = (1usize..25).prop_flat_map(|d| {
        (Just(d), proptest::collection::btree_set(0..d, 0..=d), proptest::collection::btree_set(0..d, 0..=d))
    });
    run(256, strategy, |(d, selected, truth)| {
        let m = screening_metrics(&selected, &truth, d);
        for v in [m.sensitivity, m.type_one, m.fdr] {
            lift(ensure((0.0..=1.0).contains(&v), || format!("{m:?} out of range")))?;
        }
        if truth.is_subset(&selected) {
            lift(ensure(m.sensitivity == 1.0, || format!("superset of truth but {m:?}")))?;
        }
        if selected.is_subset(&truth) {
            lift(ensure(m.type_one == 0.0 && m.fdr == 0.0, || format!("subset of truth but {m:?}")))?;
        }
        if selected.is_empty() {
            lift(ensure(m.fdr == 0.0, || "empty selection must have zero fdr".into()))?;
        }
        if truth.len() == d {
            lift(ensure(m.type_one == 0.0, || "no inactive variables must give zero type I".into()))?;
        }
        let hits = selected.intersection(&truth).count();
        if !truth.is_empty() {
            let expect = hits as f64 / truth.len() as f64;
            lift(ensure((m.sensitivity - expect).abs() < 1e-15, || format!("sensitivity {m:?}")))?;
        }
        Ok(())
    })
}

/// Sequential bifurcation recovers exactly the active set of any first-order
/// function with nonnegative effects, whatever the variable order, and its
/// run count matches the oracle's call count.
pub fn sb_exact_recovery() -> Check {
    let strategy = (2usize..40).prop_flat_map(|d| {
        (
            proptest::collection::vec(prop_oneof![3 => Just(0.0), 1 => 1.0f64..10.0], d),
            Just((0..d).collect::<Vec<usize>>()).prop_shuffle(),
            -5.0f64..5.0,
            any::<bool>(),
        )
    });
    run(128, strategy, |(beta, order, beta0, fold)| {
        let d = beta.len();
        let truth: BTreeSet<usize> = (0..d).filter(|&i| beta[i] > 0.0).collect();
        let b = beta.clone();
        let oracle = Oracle::new(d, move |x| beta0 + x.iter().zip(&b).map(|(x, b)| x * b).sum::<f64>());
        let opts = SbOptions { delta: 1.0, foldover: fold, order: Some(order), ..SbOptions::default() };
        let r = sequential_bifurcation(&oracle, &opts).map_err(|e| fail(e.to_string()))?;
        lift(ensure(r.outcome.selected == truth, || format!("selected {:?}, truth {truth:?}", r.outcome.selected)))?;
        lift(ensure(r.runs == oracle.calls(), || format!("{} runs, {} calls", r.runs, oracle.calls())))
    })
}

/// Two effects of equal size and opposite sign cancel when they share a
/// group, so classical group screening misses both; in different groups
/// both are found.
pub fn group_cancellation() -> Check {
    let strategy = (1.0f64..10.0, 0usize..3);
    run(64, strategy, |(b, other)| {
        let oracle = Oracle::new(8, move |x| b * x[0] - b * x[1] + 0.01 * x[7]);
        let rule = DecisionRule::Threshold(0.5);
        let together = Grouping::contiguous(8, 4).map_err(|e| fail(e.to_string()))?;
        let (_, out) = group_screen(&oracle, &together, StageOneMode::Classical, rule).map_err(|e| fail(e.to_string()))?;
        lift(ensure(out.selected.is_empty(), || format!("shared group selected {:?}", out.selected)))?;
        // x2 moved into another group
        let apart = Grouping::new(vec![0, 1 + other, 1, 1, 2, 2, 3, 3]).map_err(|e| fail(e.to_string()))?;
        let (_, out) = group_screen(&oracle, &apart, StageOneMode::Classical, rule).map_err(|e| fail(e.to_string()))?;
        let both: BTreeSet<usize> = [0, 1].into_iter().collect();
        lift(ensure(out.selected == both, || format!("separate groups selected {:?}", out.selected)))
    })
}

/// The GP likelihood does not depend on the order of the runs.
pub fn gp_permutation_invariance() -> Check {
    let strategy = (4usize..12, 1usize..4, any::<u64>()).prop_flat_map(|(n, d, seed)| {
        (
            Just(d),
            Just(seed),
            proptest::collection::vec(-2.0f64..2.0, n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            proptest::collection::vec(0.05f64..5.0, d),
        )
    });
    run(64, strategy, |(d, seed, y, perm, theta)| {
        let n = y.len();
        let x = lhs_random(n, d, Jitter::Random, seed).map_err(|e| fail(e.to_string()))?;
        let alpha = vec![2.0; d];
        let a = gp_loglik(&x, &y, &theta, &alpha, 1e-8).map_err(|e| fail(e.to_string()))?;
        let rows: Vec<Vec<f64>> = perm.iter().map(|&i| x.row(i)).collect();
        let xp = Design::from_rows(&rows, Coding::Unit, Provenance::new("permuted")).map_err(|e| fail(e.to_string()))?;
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let b = gp_loglik(&xp, &yp, &theta, &alpha, 1e-8).map_err(|e| fail(e.to_string()))?;
        let tol = 1e-8 * (1.0 + a.loglik.abs());
        // β̂₀ itself is ill-determined when R is nearly singular, so only
        // the profiled likelihood is compared
        lift(ensure((a.loglik - b.loglik).abs() < tol, || format!("{} vs {}", a.loglik, b.loglik)))
    })
}

/// All suites with their names, in a fixed order.
pub fn all() -> Vec<(&'static str, fn() -> Check)> {
    vec![
        ("lhs stratification", lhs_stratification as fn() -> Check),
        ("morris step structure", morris_step_structure),
        ("foldover and dsd orthogonality", foldover_orthogonality),
        ("metric conventions", metric_conventions),
        ("sequential bifurcation exact recovery", sb_exact_recovery),
        ("group screening cancellation", group_cancellation),
        ("gp likelihood permutation invariance", gp_permutation_invariance),
    ]
}
