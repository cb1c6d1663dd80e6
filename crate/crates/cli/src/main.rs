use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use offo::bench::{
    aggregate, check_fdecrease, run_matrix, series_check, summarize, theory_check,
    write_results_csv, write_stats_csv, BenchOptions, FdecreaseReport, ProfileScale, Regime,
    SeriesReport, TheoryConstants, TheoryReport,
};
use offo::driver::run;
use offo::problem::testbed::{quadratic_testbed, spread_start};
use offo::problem::{manifest, SUITE_NAMES};
use offo::sharpness::{
    build_counterexample, hermite_fn, verify_sharpness, write_grid_csv, write_knots_csv, SharpParams,
};
use offo::{load_suite, ModelKind, Norm, Problem, Variant};

#[derive(Parser)]
#[command(name = "offo", version, about = "Objective-function-free trust-region optimizers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one variant on one problem.
    Solve(SolveArgs),
    /// Run a variant x problem x noise matrix and write CSV results.
    Bench(BenchArgs),
    /// Build a worst-case knot sequence and optionally replay it.
    Sharpness(SharpnessArgs),
    /// Numerical checks of the complexity bounds on the quadratic testbed.
    Check(CheckArgs),
    /// Print the versioned problem registry as JSON.
    Manifest(ManifestArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Suite problem name, or quad<n> for the diagonal quadratic testbed.
    #[arg(long)]
    problem: String,
    #[arg(long, default_value = "adagi1")]
    variant: Variant,
    /// Override the variant's model: none, bb, lbfgs<m> or exact.
    #[arg(long)]
    model: Option<ModelKind>,
    /// Override the variant's trust-region norm: inf or 2.
    #[arg(long)]
    norm: Option<Norm>,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    /// Relative noise level on every oracle output.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full run record with its per-iteration trace.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// `all` or a comma-separated list of problem names.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Comma-separated variant tags.
    #[arg(long, value_delimiter = ',', default_value = "adag1,adagi1,adag2,adagi2,maxg01,maxgi01,sdba,b1adagi1,lmadagi3b,Eadagi1")]
    variants: Vec<Variant>,
    /// Comma-separated relative noise levels.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    noise: Vec<f64>,
    /// Replications per noisy level (noiseless levels run once).
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    profile_scale: Scale,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    #[arg(long, default_value = "stats.csv")]
    stats: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Sharp1,
    Sharp2,
}

#[derive(Args)]
struct SharpnessArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 0.5)]
    mu: f64,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[arg(long, default_value_t = 0.01)]
    varsigma: f64,
    #[arg(long, default_value_t = 1.0 / 9.0)]
    nu: f64,
    #[arg(long, default_value_t = 4.0 / 9.0 + 0.01)]
    omega: f64,
    /// Number of intervals of the knot sequence.
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    /// Also sample the interpolant with this many points per decade (2000 when given bare).
    #[arg(long, num_args = 0..=1, default_missing_value = "2000")]
    grid: Option<usize>,
    /// Where the grid samples go (defaults to `<out stem>_grid.csv`).
    #[arg(long)]
    grid_out: Option<PathBuf>,
    /// Replay the knots with the matching optimizer and report the deviation.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value = "knots.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Check the gradient bounds, the per-iteration decrease and the series lemma.
    #[arg(long)]
    theory: bool,
    /// Iterations per testbed run.
    #[arg(long, default_value_t = 10_000)]
    iters: usize,
    /// Testbed dimensions.
    #[arg(long, value_delimiter = ',', default_value = "1,5,20")]
    dims: Vec<usize>,
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ManifestArgs {
    #[arg(long)]
    out: Option<PathBuf>,
}

fn find_problem(name: &str) -> Result<Problem> {
    if let Some(n) = name.strip_prefix("quad") {
        let n: usize = n.parse().with_context(|| format!("bad testbed dimension in {name}"))?;
        if n == 0 {
            bail!("testbed dimension must be positive");
        }
        return Ok(quadratic_testbed(n, None));
    }
    Ok(load_suite(Some(&[name]))?.remove(0))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn fmt_f(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.10e}"))
}

fn solve(a: SolveArgs) -> Result<()> {
    let problem = find_problem(&a.problem)?;
    let mut cfg = a.variant.config();
    if let Some(m) = a.model {
        cfg.model = m;
    }
    if let Some(n) = a.norm {
        cfg.norm = n;
    }
    cfg.eps = a.eps;
    cfg.max_iter = a.max_iter;
    cfg.noise_level = a.noise;
    cfg.seed = a.seed;
    cfg.trace = a.trace.is_some();
    let record = run(&problem, &cfg)?;
    let summary = summarize(&record, &problem, a.noise, 0)?;
    println!("problem      {} (n = {})", problem.name, problem.n());
    println!("variant      {}", record.variant);
    println!("status       {}", record.status);
    println!("iterations   {}", record.iters);
    println!("evaluations  {}", record.evals);
    println!("final |g|    {:.6e}", record.final_gnorm);
    println!("final f      {}", fmt_f(summary.final_f));
    println!("reference f  {}", fmt_f(problem.f_ref));
    println!("success      {}", summary.success);
    println!("violations   {}", record.violations.total());
    if let Some(path) = a.trace {
        let mut w = create(&path)?;
        w.write_all(record.to_json()?.as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<()> {
    let problems = if a.suite == "all" {
        load_suite(None)?
    } else {
        let names: Vec<&str> = a.suite.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        load_suite(Some(&names))?
    };
    let opts = BenchOptions { master_seed: a.seed, max_iter: a.max_iter, eps: a.eps, assertions: true };
    let results = run_matrix(&a.variants, &problems, &a.noise, a.reps, &opts)?;
    let scale = match a.profile_scale {
        Scale::Linear => ProfileScale::Linear,
        Scale::Log => ProfileScale::Log,
    };
    let agg = aggregate(&results, scale)?;
    write_results_csv(&results, create(&a.out)?)?;
    write_stats_csv(&agg, create(&a.stats)?)?;
    println!("{:<10} {:>6} {:>7} {:>7}", "variant", "noise", "pi", "rho");
    for s in &agg.stats {
        println!("{:<10} {:>6} {:>7.4} {:>7.2}", s.variant, s.noise_level, s.pi, s.rho);
    }
    if !agg.excluded.is_empty() {
        println!("excluded from profiles: {}", agg.excluded.join(", "));
    }
    let violations: usize = results.runs.iter().map(|r| r.violations).sum();
    if violations > 0 {
        eprintln!("warning: {violations} step-contract violations recorded");
    }
    Ok(())
}

fn sharpness(a: SharpnessArgs) -> Result<()> {
    let params = match a.kind {
        Kind::Sharp1 => SharpParams::Sharp1 { mu: a.mu, eta: a.eta, varsigma: a.varsigma },
        Kind::Sharp2 => SharpParams::Sharp2 { nu: a.nu, omega: a.omega },
    };
    let knots = build_counterexample(params, a.iters)?;
    write_knots_csv(&knots, create(&a.out)?)?;
    println!("{} knots written to {}", knots.len(), a.out.display());
    let interp = hermite_fn(knots.clone());
    if let Some(per_decade) = a.grid {
        let path = a.grid_out.clone().unwrap_or_else(|| {
            let stem = a.out.file_stem().and_then(|s| s.to_str()).unwrap_or("knots");
            a.out.with_file_name(format!("{stem}_grid.csv"))
        });
        let grid = interp.grid(per_decade, true)?;
        write_grid_csv(&grid, create(&path)?)?;
        println!("{} grid points written to {}", grid.len(), path.display());
    }
    if a.verify {
        let mut cfg = match params {
            SharpParams::Sharp1 { mu, varsigma, .. } => {
                let mut c = Variant::Adagi1.config();
                c.scaling = c.scaling.with_mu(mu);
                c.scaling.varsigma = varsigma;
                c
            }
            SharpParams::Sharp2 { nu, .. } => {
                let mut c = Variant::Maxgi01.config();
                c.scaling = c.scaling.with_mu(nu).with_nu(nu);
                c
            }
        };
        cfg.max_iter = a.iters;
        cfg.eps = f64::MIN_POSITIVE;
        cfg.trace = true;
        let record = run(&interp.to_problem(), &cfg)?;
        let rep = verify_sharpness(&knots, &record)?;
        println!(
            "replayed {} knots: max relative gradient error {:.3e}, max iterate error {:.3e}",
            rep.checked, rep.max_gradient_deviation, rep.max_knot_deviation
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct FdecreaseEntry {
    variant: String,
    n: usize,
    x0_first: f64,
    report: FdecreaseReport,
}

#[derive(Serialize)]
struct CheckReport {
    iters: usize,
    bounds: Vec<TheoryReport>,
    fdecrease: Vec<FdecreaseEntry>,
    series: SeriesReport,
    violations: usize,
}

fn check(a: CheckArgs) -> Result<bool> {
    if !a.theory {
        bail!("nothing to check; pass --theory");
    }
    let mut configs = Vec::new();
    for mu in [0.25, 0.5, 0.75] {
        let mut c = Variant::Adagi1.config();
        c.scaling = c.scaling.with_mu(mu);
        configs.push(c);
    }
    configs.push(Variant::Maxgi01.config());
    configs.push(Variant::Maxg01.config());

    let problems: Vec<Problem> = a
        .dims
        .iter()
        .flat_map(|&n| [quadratic_testbed(n, None), quadratic_testbed(n, Some(spread_start(n)))])
        .collect();
    let mut bounds = Vec::new();
    for cfg in &configs {
        for p in &problems {
            let mut cfg = cfg.clone();
            cfg.max_iter = a.iters;
            cfg.eps = 1e-10;
            cfg.trace = true;
            let record = run(p, &cfg)?;
            let c = TheoryConstants::from_run(&record, p, 1.0, 0.0)?;
            bounds.push(theory_check(&record, &c, Regime::for_strategy(&cfg.scaling))?);
        }
    }
    let mut fdecrease = Vec::new();
    for v in Variant::SCALING_ONLY {
        for p in &problems {
            let mut cfg = v.config();
            cfg.max_iter = a.iters;
            cfg.eps = 1e-10;
            cfg.trace = true;
            cfg.instrument = true;
            let record = run(p, &cfg)?;
            let report = check_fdecrease(&record, Some(1.0))?;
            fdecrease.push(FdecreaseEntry { variant: v.tag().into(), n: p.n(), x0_first: p.x0[0], report });
        }
    }
    let series = series_check(1000, 200, 7);

    let violations = bounds.iter().map(|r| r.violation_count + usize::from(!r.series_spot)).sum::<usize>()
        + fdecrease.iter().map(|e| e.report.violations).sum::<usize>()
        + series.violations;
    for r in &bounds {
        println!(
            "{:<8} mu={:<5} {:<6} {:<11} checks {:>6} violations {}",
            r.variant, r.constants.mu, r.problem, r.regime.as_str(), r.checked, r.violation_count
        );
    }
    for e in &fdecrease {
        println!(
            "{:<8} n={:<3} x0[0]={:<4} fdecrease checks {:>6} violations {}",
            e.variant, e.n, e.x0_first, e.report.checked, e.report.violations
        );
    }
    println!("series: {} sequences, {} checks, {} violations", series.sequences, series.checks, series.violations);
    let report = CheckReport { iters: a.iters, bounds, fdecrease, series, violations };
    let mut w = create(&a.out)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    w.flush()?;
    Ok(violations == 0)
}

fn write_manifest(a: ManifestArgs) -> Result<()> {
    let m = manifest(&load_suite(Some(SUITE_NAMES))?);
    let json = serde_json::to_string_pretty(&m)?;
    match a.out {
        Some(path) => {
            let mut w = create(&path)?;
            w.write_all(json.as_bytes())?;
            w.flush()?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Solve(a) => solve(a).map(|_| true),
        Command::Bench(a) => bench(a).map(|_| true),
        Command::Sharpness(a) => sharpness(a).map(|_| true),
        Command::Check(a) => check(a),
        Command::Manifest(a) => write_manifest(a).map(|_| true),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed: bound violations recorded");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
