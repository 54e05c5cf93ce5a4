use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use screenkit::bench::{run_benchmark, BenchFunction, BenchOptions, GpDesigns, Method, FROZEN_COEFFICIENT_SEED};
use screenkit::design::io::{num, read_design_file, read_vector_file, write_design_file, write_json_file, write_table_file};
use screenkit::design::{build_model_matrix, Coding, ScreeningOutcome, TermSet};
use screenkit::ee::{cotter_contrasts, cotter_sensitivity, ee_indices, elementary_effects};
use screenkit::factorial::{definitive_screening, full_factorial, ofaat, plackett_burman, regular_fraction, sfrd, DefiningWordSet};
use screenkit::gp::{rdvs, sgpvs, RdvsOptions, SgpvsOptions};
use screenkit::group::{group_screen, iffd, sequential_bifurcation, DecisionRule, Grouping, IffdOptions, Oracle, SbOptions, StageOneMode};
use screenkit::shrinkage::{gauss_dantzig, GaussDantzig};
use screenkit::space_filling::{lhs_optimize, lhs_random, morris_plan, Jitter, MorrisMeta, MorrisPlan, Objective, Schedule};
use screenkit::ssd::{bayes_d, es2, search_ssd, SsdCriterion, SsdSearch};
use screenkit::Error;

#[derive(Parser)]
#[command(name = "screenkit", version, about = "Screening designs and variable selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a design and write it as CSV.
    #[command(subcommand)]
    Design(DesignCmd),
    /// Analyze responses from an existing design.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Run a screening method on data or on a built-in oracle.
    #[command(subcommand)]
    Screen(ScreenCmd),
    /// Run one cell of the method comparison on a benchmark function.
    Bench(BenchArgs),
}

#[derive(Args, Clone, Copy)]
struct SeedArg {
    #[arg(long, env = "SCREENKIT_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FactorialKind {
    Full,
    Regular,
    Pb,
    Dsd,
    Sfrd,
    Ofaat,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Es2,
    Bayesd,
}

#[derive(Clone, Copy, ValueEnum)]
enum LhsOptimize {
    None,
    PhiQ,
    Maxpro,
}

#[derive(Subcommand)]
enum DesignCmd {
    /// Full and regular fractions, Plackett–Burman, DSD, SFRD and OFAAT.
    Factorial {
        #[arg(long, value_enum)]
        kind: FactorialKind,
        #[arg(long)]
        d: Option<usize>,
        /// Generators for a regular fraction, e.g. "1234" or "1,2,11;3,4,12".
        #[arg(long)]
        words: Option<String>,
        /// Run size for Plackett–Burman designs.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Supersaturated design by stochastic search.
    Ssd {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "es2")]
        criterion: CriterionArg,
        #[arg(long, default_value_t = 5.0)]
        tau2: f64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Latin hypercube, optionally optimized for φ_q or maximum projection.
    Lhs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "none")]
        optimize: LhsOptimize,
        #[arg(long, default_value_t = 15.0)]
        q: f64,
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Morris trajectory plan; the plan metadata goes to a JSON sidecar.
    Morris {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 4)]
        f: usize,
        #[arg(long)]
        delta: Option<f64>,
        /// Sidecar path; defaults to the output path with a .json extension.
        #[arg(long)]
        meta: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TermsArg {
    Main,
    #[value(name = "main+2fi")]
    MainTwoFi,
    #[value(name = "main+2fi+quad")]
    Full,
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Elementary effects from a Morris plan.
    Ee {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        meta: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// Writes (mu_star, sigma) per variable for plotting.
        #[arg(long)]
        scatter: Option<PathBuf>,
    },
    /// Cotter sensitivity indices from SFRD outputs.
    Cotter {
        #[arg(long)]
        y: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.01)]
        threshold: f64,
    },
    /// Gauss–Dantzig selector with AICc choice of s.
    Dantzig {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, value_enum, default_value = "main")]
        terms: TermsArg,
        /// Refit coefficients with magnitude above t are declared active.
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        /// Writes the shrinkage path (s against every coefficient).
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum ModeArg {
    Classical,
    Interaction,
}

#[derive(Subcommand)]
enum ScreenCmd {
    /// Two-stage factorial group screening.
    Group {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        groups: usize,
        #[arg(long, value_enum, default_value = "classical")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[command(flatten)]
        coef: CoefArg,
    },
    /// Sequential bifurcation.
    Sb {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long)]
        foldover: bool,
        #[command(flatten)]
        coef: CoefArg,
    },
    /// Iterated fractional factorial designs.
    Iffd {
        #[arg(long)]
        oracle: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 8)]
        groups: usize,
        #[arg(long, default_value_t = 4)]
        stages: usize,
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        coef: CoefArg,
    },
    /// Stepwise Gaussian-process variable selection.
    Sgpvs {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 6.0)]
        c: f64,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Compare the likelihood-ratio statistic 2(l_j − l₀) with c
        /// instead of the raw gain.
        #[arg(long)]
        deviance: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Reference-distribution variable selection.
    Rdvs {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value_t = 100)]
        b: usize,
        #[arg(long, default_value_t = 0.9)]
        pct: f64,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[arg(long, default_value_t = 500)]
        burn_in: usize,
        /// Directory for the reference medians and per-variable medians.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        seed: SeedArg,
    },
}

#[derive(Args, Clone, Copy)]
struct CoefArg {
    /// Seed for the random coefficients of builtin:morris.
    #[arg(long, default_value_t = FROZEN_COEFFICIENT_SEED)]
    coef_seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    method: Method,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    example: u8,
    #[arg(long)]
    n: usize,
    /// Use the modified version of the example function.
    #[arg(long)]
    modified: bool,
    #[arg(long, default_value_t = FROZEN_COEFFICIENT_SEED)]
    coef_seed: u64,
    /// Restrict GP methods to one space-filling design.
    #[arg(long, value_enum, default_value = "both")]
    gp_design: GpDesignArg,
    #[command(flatten)]
    seed: SeedArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum GpDesignArg {
    Both,
    Maximin,
    Maxpro,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 3 for numerical failures, 2 for everything else (bad flags, bad input,
/// I/O).
fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Error>().is_some_and(Error::is_numeric) {
        3
    } else {
        2
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Design(c) => design(c),
        Command::Analyze(c) => analyze(c),
        Command::Screen(c) => screen(c),
        Command::Bench(a) => bench(a),
    }
}

fn print_json(v: &serde_json::Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        // a closed pipe (e.g. `| head`) is not an error for us
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r.map_err(Error::from)?),
    }
}

fn need_d(d: Option<usize>, kind: &str) -> anyhow::Result<usize> {
    d.ok_or_else(|| anyhow!(Error::Usage(format!("--d is required for --kind {kind}"))))
}

fn design(c: DesignCmd) -> anyhow::Result<()> {
    match c {
        DesignCmd::Factorial { kind, d, words, n, seed: _, output } => {
            let (design, aliases) = match kind {
                FactorialKind::Full => (full_factorial(need_d(d, "full")?)?, None),
                FactorialKind::Regular => {
                    let d = need_d(d, "regular")?;
                    let words = words.ok_or_else(|| Error::Usage("--words is required for --kind regular".into()))?;
                    let (design, report) = regular_fraction(&DefiningWordSet::parse(d, &words, None)?)?;
                    (design, Some(report))
                }
                FactorialKind::Pb => {
                    let n = n.ok_or_else(|| Error::Usage("--n is required for --kind pb".into()))?;
                    let pb = plackett_burman(n)?;
                    let design = match d {
                        Some(d) => pb.select_columns(&(0..d).collect::<Vec<_>>())?,
                        None => pb,
                    };
                    (design, None)
                }
                FactorialKind::Dsd => (definitive_screening(need_d(d, "dsd")?)?, None),
                FactorialKind::Sfrd => (sfrd(need_d(d, "sfrd")?)?, None),
                FactorialKind::Ofaat => (ofaat(need_d(d, "ofaat")?)?, None),
            };
            write_design_file(&design, &output)?;
            let mut summary = json!({ "output": output, "n": design.n(), "d": design.d() });
            if let Some(report) = aliases {
                let path = output.with_extension("alias.json");
                write_json_file(&serde_json::to_value(&report)?, &path)?;
                summary["aliases"] = json!(path);
                summary["resolution"] = json!(report.resolution);
                summary["defining_relation"] = json!(report.defining_relation);
            }
            print_json(&summary)
        }
        DesignCmd::Ssd { n, d, criterion, tau2, restarts, seed, output } => {
            let criterion = match criterion {
                CriterionArg::Es2 => SsdCriterion::Es2,
                CriterionArg::Bayesd => SsdCriterion::BayesD,
            };
            let opts = SsdSearch { criterion, restarts, tau2, seed: seed.seed, ..Default::default() };
            let design = search_ssd(n, d, opts)?;
            write_design_file(&design, &output)?;
            let value = match criterion {
                SsdCriterion::Es2 => es2(&design)?,
                SsdCriterion::BayesD => bayes_d(&design, tau2)?,
            };
            print_json(&json!({ "output": output, "criterion": value }))
        }
        DesignCmd::Lhs { n, d, optimize, q, iterations, seed, output } => {
            let schedule = Schedule { iterations, ..Default::default() };
            let design = match optimize {
                LhsOptimize::None => lhs_random(n, d, Jitter::Random, seed.seed)?,
                LhsOptimize::PhiQ => lhs_optimize(n, d, Objective::PhiQ(q), schedule, seed.seed)?,
                LhsOptimize::Maxpro => lhs_optimize(n, d, Objective::MaxPro, schedule, seed.seed)?,
            };
            write_design_file(&design, &output)?;
            print_json(&json!({
                "output": output,
                "phi_q": screenkit::space_filling::phi_q(&design, q)?,
                "maxpro": screenkit::space_filling::maxpro(&design)?,
            }))
        }
        DesignCmd::Morris { d, r, f, delta, meta, seed, output } => {
            let plan = morris_plan(d, r, f, delta, seed.seed)?;
            write_design_file(&plan.design, &output)?;
            let meta = meta.unwrap_or_else(|| output.with_extension("json"));
            write_json_file(&serde_json::to_value(&plan.meta)?, &meta)?;
            print_json(&json!({ "output": output, "meta": meta, "n": plan.design.n(), "delta": plan.delta() }))
        }
    }
}

fn read_meta(path: &Path) -> anyhow::Result<MorrisMeta> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn analyze(c: AnalyzeCmd) -> anyhow::Result<()> {
    match c {
        AnalyzeCmd::Ee { plan, meta, y, scatter } => {
            let meta = read_meta(&meta)?;
            let design = read_design_file(&plan, Some(Coding::Unit))?;
            let plan = MorrisPlan { design, meta };
            let y = read_vector_file(&y)?;
            let idx = ee_indices(&elementary_effects(&plan, &y)?)?;
            if let Some(path) = scatter {
                let rows: Vec<Vec<String>> = (0..idx.mu.len())
                    .map(|i| vec![format!("x{}", i + 1), num(idx.mu_star[i]), num(idx.sigma[i])])
                    .collect();
                write_table_file(&["variable", "mu_star", "sigma"], &rows, &path)?;
            }
            print_json(&json!({ "r": idx.r, "mu": idx.mu, "sigma": idx.sigma, "mu_star": idx.mu_star }))
        }
        AnalyzeCmd::Cotter { y, d, threshold } => {
            let y = read_vector_file(&y)?;
            let indices = cotter_contrasts(&y, d)?;
            let outcome = cotter_sensitivity(&indices, threshold)?;
            print_json(&json!({ "indices": indices, "outcome": outcome }))
        }
        AnalyzeCmd::Dantzig { design, y, terms, t, path } => {
            let design = read_design_file(&design, None)?;
            let y = read_vector_file(&y)?;
            let d = design.d();
            let ts = match terms {
                TermsArg::Main => TermSet::main_effects(d),
                TermsArg::MainTwoFi => TermSet::canonical(d, true, true, true, false),
                TermsArg::Full => TermSet::canonical(d, true, true, true, true),
            };
            let mm = build_model_matrix(&design, &ts)?;
            let fit = gauss_dantzig(&mm, &y, &GaussDantzig { threshold: t, ..Default::default() })?;
            let labels = ts.labels();
            if let Some(p) = path {
                // the path covers the non-intercept terms only
                let width = fit.path.coefficients.first().map_or(0, Vec::len);
                let mut headers = vec!["s"];
                headers.extend(labels[labels.len() - width..].iter().map(String::as_str));
                let rows: Vec<Vec<String>> = fit
                    .path
                    .s
                    .iter()
                    .zip(&fit.path.coefficients)
                    .map(|(s, b)| std::iter::once(num(*s)).chain(b.iter().map(|v| num(*v))).collect())
                    .collect();
                write_table_file(&headers, &rows, &p)?;
            }
            let chosen_s = fit.chosen.map(|i| fit.path.s[i]);
            let refit: serde_json::Map<String, serde_json::Value> =
                labels.iter().zip(&fit.refit).map(|(l, v)| (l.clone(), json!(v))).collect();
            print_json(&json!({
                "outcome": fit.outcome,
                "chosen_s": chosen_s,
                "refit": refit,
                "empty_support_warning": fit.empty_support_warning,
            }))
        }
    }
}

/// Resolves `builtin:welch`, `builtin:welch-modified`, `builtin:morris` and
/// `builtin:morris-modified` to an oracle on [−1, 1]^20.
fn builtin_oracle(spec: &str, d: Option<usize>, coef_seed: u64) -> anyhow::Result<(Oracle, BenchFunction)> {
    let name = spec
        .strip_prefix("builtin:")
        .ok_or_else(|| Error::Usage(format!("unknown oracle {spec:?}; expected builtin:<name>")))?;
    let f = match name {
        "welch" => BenchFunction::example(1, coef_seed, false),
        "welch-modified" => BenchFunction::example(1, coef_seed, true),
        "morris" => BenchFunction::example(2, coef_seed, false),
        "morris-modified" => BenchFunction::example(2, coef_seed, true),
        _ => None,
    }
    .ok_or_else(|| {
        Error::Usage(format!("unknown oracle {spec:?}; builtins are welch, welch-modified, morris, morris-modified"))
    })?;
    if let Some(d) = d {
        if d != f.d() {
            bail!(Error::Usage(format!("{spec} has d = {}, got --d {d}", f.d())));
        }
    }
    let g = f.clone();
    Ok((Oracle::new(f.d(), move |x| g.eval(x)), f))
}

fn with_truth(outcome: ScreeningOutcome, f: &BenchFunction) -> ScreeningOutcome {
    outcome.with_truth(&f.truth())
}

fn screen(c: ScreenCmd) -> anyhow::Result<()> {
    match c {
        ScreenCmd::Group { oracle, d, groups, mode, delta, coef } => {
            let (o, f) = builtin_oracle(&oracle, d, coef.coef_seed)?;
            let grouping = Grouping::contiguous(o.d(), groups)?;
            let mode = if mode == ModeArg::Classical { StageOneMode::Classical } else { StageOneMode::Interaction };
            let rule = DecisionRule::default_for(&o, delta);
            let (run, outcome) = group_screen(&o, &grouping, mode, rule)?;
            print_json(&json!({
                "outcome": with_truth(outcome, &f),
                "n1": run.n1,
                "n2": run.n2,
                "runs": run.n1 + run.n2,
                "oracle_calls": o.calls(),
                "carried": run.carried.iter().map(|v| v + 1).collect::<Vec<_>>(),
                "stage1_decisions": run.stage1_decisions,
                "stage2_decisions": run.stage2_decisions,
            }))
        }
        ScreenCmd::Sb { oracle, d, delta, foldover, coef } => {
            let (o, f) = builtin_oracle(&oracle, d, coef.coef_seed)?;
            let r = sequential_bifurcation(&o, &SbOptions { delta, foldover, ..Default::default() })?;
            print_json(&json!({
                "outcome": with_truth(r.outcome, &f),
                "runs": r.runs,
                "oracle_calls": o.calls(),
                "trace": r.trace,
            }))
        }
        ScreenCmd::Iffd { oracle, d, groups, stages, delta, seed, coef } => {
            let (o, f) = builtin_oracle(&oracle, d, coef.coef_seed)?;
            let opts = IffdOptions { groups, stages, delta, seed: seed.seed, ..Default::default() };
            let r = iffd(&o, &opts)?;
            print_json(&json!({
                "outcome": with_truth(r.outcome, &f),
                "runs": r.runs,
                "oracle_calls": o.calls(),
                "running_intersection": r
                    .running_intersection
                    .iter()
                    .map(|s| s.iter().map(|v| v + 1).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }))
        }
        ScreenCmd::Sgpvs { design, y, c, alpha, deviance, seed } => {
            let design = read_design_file(&design, None)?;
            let y = read_vector_file(&y)?;
            let opts = SgpvsOptions { c, alpha, deviance, seed: seed.seed, ..Default::default() };
            let r = sgpvs(&design, &y, &opts)?;
            for w in &r.warnings {
                log::warn!("{w}");
            }
            print_json(&json!({ "outcome": r.outcome, "theta": r.theta, "theta_tied": r.theta_tied }))
        }
        ScreenCmd::Rdvs { design, y, b, pct, iterations, burn_in, out, seed } => {
            let design = read_design_file(&design, None)?;
            let y = read_vector_file(&y)?;
            let mut opts = RdvsOptions { b, percentile: pct, seed: seed.seed, ..Default::default() };
            opts.mcmc.iterations = iterations;
            opts.mcmc.burn_in = burn_in;
            let r = rdvs(&design, &y, &opts)?;
            for w in &r.warnings {
                log::warn!("{w}");
            }
            if let Some(dir) = out {
                fs::create_dir_all(&dir)?;
                let refs: Vec<Vec<String>> = r.reference.medians.iter().map(|v| vec![num(*v)]).collect();
                write_table_file(&["inert_median"], &refs, &dir.join("rdvs_reference.csv"))?;
                let vars: Vec<Vec<String>> = r
                    .variable_medians
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![format!("x{}", i + 1), num(*v), (r.outcome.selected.contains(&i) as u8).to_string()])
                    .collect();
                write_table_file(&["variable", "median", "active"], &vars, &dir.join("rdvs_variables.csv"))?;
            }
            print_json(&json!({
                "outcome": r.outcome,
                "threshold": r.reference.threshold,
                "variable_medians": r.variable_medians,
                "acceptance": r.acceptance,
            }))
        }
    }
}

fn bench(a: BenchArgs) -> anyhow::Result<()> {
    let f = BenchFunction::example(a.example, a.coef_seed, a.modified)
        .ok_or_else(|| Error::Usage(format!("unknown example {}", a.example)))?;
    let gp_designs = match a.gp_design {
        GpDesignArg::Both => GpDesigns::Both,
        GpDesignArg::Maximin => GpDesigns::Maximin,
        GpDesignArg::Maxpro => GpDesigns::MaxPro,
    };
    let opts = BenchOptions { gp_designs, ..Default::default() };
    let report = run_benchmark(a.method, &f, a.n, a.seed.seed, &opts)?;
    report.write_to(&a.out)?;
    print_json(&report.to_json())
}
