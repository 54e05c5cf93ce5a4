use std::collections::BTreeSet;

use screenkit::bench::{run_benchmark, welch_function, BenchFunction, BenchOptions, Method};
use screenkit::design::io::{read_design_file, read_vector_file, write_design_file};
use screenkit::design::{build_model_matrix, least_squares, TermSet};
use screenkit::ee::{cotter_contrasts, cotter_sensitivity, ee_indices, elementary_effects};
use screenkit::factorial::{regular_fraction, sfrd, DefiningWordSet};
use screenkit::shrinkage::{gauss_dantzig, GaussDantzig};
use screenkit::space_filling::morris_plan;
use screenkit::ssd::{search_ssd, SsdSearch};
use screenkit::Coding;

#[test]
fn aliased_interaction_biases_main_effect_estimate() {
    let words = DefiningWordSet::parse(4, "1234", None).unwrap();
    let (design, report) = regular_fraction(&words).unwrap();
    assert!(report.aliased.iter().any(|a| a.term == "x1" && a.aliases.iter().any(|(t, c)| t == "x2x3x4" && *c == 1.0)));
    // y = 2x1 + 3x2x3x4: the fitted x1 coefficient absorbs its alias
    let y = design.evaluate(|x| 2.0 * x[0] + 3.0 * x[1] * x[2] * x[3]);
    let fit = least_squares(&build_model_matrix(&design, &TermSet::main_effects(4)).unwrap(), &y).unwrap();
    assert!((fit.coefficients[1] - 5.0).abs() < 1e-12);
    for b in &fit.coefficients[2..] {
        assert!(b.abs() < 1e-12);
    }
}

#[test]
fn design_files_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("sfrd.csv");
    let d = sfrd(5).unwrap();
    write_design_file(&d, &path).unwrap();
    let back = read_design_file(&path, None).unwrap();
    assert_eq!(back.runs(), d.runs());
    assert_eq!(back.coding(), Coding::TwoLevel);
    assert_eq!(back.names(), d.names());
}

#[test]
fn sfrd_finds_example_one_actives() {
    let d = sfrd(20).unwrap();
    let y = d.evaluate(welch_function);
    let out = cotter_sensitivity(&cotter_contrasts(&y, 20).unwrap(), 0.01).unwrap();
    assert_eq!(out.selected, [0, 3, 4, 11, 18, 19].into_iter().collect());
}

#[test]
fn elementary_effects_of_additive_function() {
    let plan = morris_plan(6, 5, 4, None, 11).unwrap();
    let slopes = [1.0, 0.0, -2.0, 0.0, 0.5, 0.0];
    let y = plan.design.evaluate(|x| x.iter().zip(&slopes).map(|(x, b)| b * x).sum::<f64>() + 7.0);
    let idx = ee_indices(&elementary_effects(&plan, &y).unwrap()).unwrap();
    for i in 0..6 {
        assert!((idx.mu_star[i] - f64::abs(slopes[i])).abs() < 1e-12);
        assert!(idx.sigma[i] < 1e-12);
    }
}

#[test]
fn gauss_dantzig_on_supersaturated_design() {
    let design = search_ssd(16, 20, SsdSearch { restarts: 4, iterations: 2000, ..SsdSearch::default() }).unwrap();
    let y = design.evaluate(|x| 3.0 * x[0]);
    let mm = build_model_matrix(&design, &TermSet::main_effects(20)).unwrap();
    let fit = gauss_dantzig(&mm, &y, &GaussDantzig::default()).unwrap();
    assert_eq!(fit.outcome.selected, BTreeSet::from([0]));
    assert!((fit.refit[1] - 3.0).abs() < 1e-9);
}

#[test]
fn benchmark_report_writes_all_files() {
    let tmp = tempfile::tempdir().unwrap();
    let f = BenchFunction::example(2, 1, false).unwrap();
    let r = run_benchmark(Method::Dsd, &f, 41, 0, &BenchOptions::default()).unwrap();
    assert_eq!(r.oracle_calls, 41);
    r.write_to(tmp.path()).unwrap();
    let y = read_vector_file(&tmp.path().join("response.csv")).unwrap();
    assert_eq!(y, r.y);
    for name in ["report.json", "design.csv", "metrics.csv", "shrinkage_path.csv", "half_normal.csv"] {
        assert!(tmp.path().join(name).exists(), "{name}");
    }
}
