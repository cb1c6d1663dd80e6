//! Experiment matrix, success rule, performance profiles and reliability.

mod series;
mod theory;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::driver::{run, RunRecord, RunStatus, Variant};
use crate::error::{Error, Result};
use crate::problem::noise::splitmix64;
use crate::problem::{Oracle, Problem};

pub use series::{series_bounds_hold, series_check, SeriesForm, SeriesReport};
pub use theory::{
    check_fdecrease, theory_check, FdecreaseReport, Regime, TheoryConstants, TheoryReport,
    TheoryViolation,
};

/// Gradient tolerance of the success rule.
pub const SUCCESS_GTOL: f64 = 1e-6;
/// Relative (or, near zero, absolute) objective tolerance of the success rule.
pub const SUCCESS_FTOL: f64 = 1e-7;

/// Options shared by every cell of a run matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchOptions {
    pub master_seed: u64,
    pub max_iter: usize,
    pub eps: f64,
    pub assertions: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self { master_seed: 0, max_iter: 100_000, eps: 1e-6, assertions: true }
    }
}

/// Outcome of one cell of the matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub variant: String,
    pub problem: String,
    pub noise_level: f64,
    pub rep: usize,
    pub status: RunStatus,
    pub evals: usize,
    pub final_gnorm: f64,
    /// Noiseless objective at the final iterate.
    pub final_f: Option<f64>,
    pub success: bool,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResults {
    pub runs: Vec<RunSummary>,
    /// Problems on which the converged runs agree on the final value.
    pub comparable: Vec<String>,
}

/// Seed of one cell; independent of the variant so that all variants see
/// the same noise stream on a given (problem, level, rep).
pub fn cell_seed(master: u64, problem: &str, level: f64, rep: usize) -> u64 {
    let mut h = splitmix64(master);
    for b in problem.bytes() {
        h = splitmix64(h ^ b as u64);
    }
    h = splitmix64(h ^ level.to_bits());
    splitmix64(h ^ rep as u64)
}

/// Success rule: small gradient, or final value close to the reference.
pub fn success(final_gnorm: f64, final_f: Option<f64>, problem: &Problem) -> Result<bool> {
    if final_gnorm <= SUCCESS_GTOL {
        return Ok(true);
    }
    let f_ref = problem
        .f_ref
        .ok_or_else(|| Error::MissingReference(problem.name.clone()))?;
    let Some(f) = final_f else {
        return Ok(false);
    };
    let relative = (f - f_ref).abs() <= SUCCESS_FTOL * f_ref.abs();
    let absolute = f_ref.abs() < SUCCESS_FTOL && f.abs() <= SUCCESS_FTOL;
    Ok(relative || absolute)
}

/// Summarize a finished run; the objective is re-evaluated without noise.
pub fn summarize(record: &RunRecord, problem: &Problem, level: f64, rep: usize) -> Result<RunSummary> {
    let final_f = problem.value(&record.x_final).ok();
    let ok = record.status != RunStatus::OverflowFailure
        && success(record.final_gnorm, final_f, problem)?;
    Ok(RunSummary {
        variant: record.variant.clone(),
        problem: record.problem.clone(),
        noise_level: level,
        rep,
        status: record.status,
        evals: record.evals,
        final_gnorm: record.final_gnorm,
        final_f,
        success: ok,
        violations: record.violations.total(),
    })
}

/// Run every (variant, problem, level, rep) cell in parallel.
///
/// A noiseless level runs a single replication since its runs are deterministic.
pub fn run_matrix(
    variants: &[Variant],
    problems: &[Problem],
    levels: &[f64],
    reps: usize,
    opts: &BenchOptions,
) -> Result<BenchResults> {
    if variants.is_empty() || problems.is_empty() || levels.is_empty() || reps == 0 {
        return Err(Error::InvalidParameter("run matrix needs nonempty lists and reps >= 1".into()));
    }
    if let Some(l) = levels.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(Error::InvalidParameter(format!("noise level {l} must be >= 0")));
    }
    let mut cells = Vec::new();
    for p in problems {
        for &level in levels {
            let r = if level == 0.0 { 1 } else { reps };
            for rep in 0..r {
                for &v in variants {
                    cells.push((v, p, level, rep));
                }
            }
        }
    }
    let runs = cells
        .into_par_iter()
        .map(|(v, p, level, rep)| {
            let mut cfg = v.config();
            cfg.max_iter = opts.max_iter;
            cfg.eps = opts.eps;
            cfg.assertions = opts.assertions;
            cfg.noise_level = level;
            cfg.seed = cell_seed(opts.master_seed, &p.name, level, rep);
            let rec = run(p, &cfg)?;
            summarize(&rec, p, level, rep)
        })
        .collect::<Result<Vec<_>>>()?;
    let comparable = comparable_problems(&runs);
    Ok(BenchResults { runs, comparable })
}

/// Problems whose converged runs at the lowest noise level agree on the
/// final value to a relative `1e-3`. Disagreement signals distinct
/// stationary points, which makes evaluation counts incomparable.
pub fn comparable_problems(runs: &[RunSummary]) -> Vec<String> {
    let mut lowest: BTreeMap<&str, f64> = BTreeMap::new();
    for r in runs {
        let e = lowest.entry(&r.problem).or_insert(r.noise_level);
        *e = e.min(r.noise_level);
    }
    let mut out = Vec::new();
    for (&p, &level) in &lowest {
        let fs: Vec<f64> = runs
            .iter()
            .filter(|r| r.problem == p && r.noise_level == level && r.status == RunStatus::Converged)
            .filter_map(|r| r.final_f)
            .collect();
        let lo = fs.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = fs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if fs.len() < 2 || hi - lo <= 1e-3 * f64::max(1.0, f64::max(lo.abs(), hi.abs())) {
            out.push(p.to_string());
        }
    }
    out
}

/// Abscissa of the profile area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileScale {
    /// `π = (1/50)∫₁⁵⁰ θ(t) dt`; a perfect solver scores 0.98.
    #[default]
    Linear,
    /// Area over `log t ∈ [0, log 50]`, normalized to 1.
    Log,
}

pub const PROFILE_TMAX: f64 = 50.0;

/// Performance ratios of one variant at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub variant: String,
    pub noise_level: f64,
    /// One ratio per (problem, rep) instance; failures are `+∞`.
    pub ratios: Vec<f64>,
}

impl Profile {
    /// Fraction of instances solved within a factor `t` of the best.
    pub fn theta(&self, t: f64) -> f64 {
        if self.ratios.is_empty() {
            return 0.0;
        }
        self.ratios.iter().filter(|&&r| r <= t).count() as f64 / self.ratios.len() as f64
    }

    pub fn area(&self, scale: ProfileScale) -> f64 {
        if self.ratios.is_empty() {
            return 0.0;
        }
        let total: f64 = self
            .ratios
            .iter()
            .map(|&r| {
                let r = r.max(1.0);
                match scale {
                    ProfileScale::Linear => (PROFILE_TMAX - r).max(0.0) / PROFILE_TMAX,
                    ProfileScale::Log => (PROFILE_TMAX.ln() - r.ln()).max(0.0) / PROFILE_TMAX.ln(),
                }
            })
            .sum();
        total / self.ratios.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantStats {
    pub variant: String,
    pub noise_level: f64,
    pub pi: f64,
    pub rho: f64,
    pub attempts: usize,
    pub successes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub stats: Vec<VariantStats>,
    pub profiles: Vec<Profile>,
    /// Problems left out of the profiles by the comparability filter.
    pub excluded: Vec<String>,
}

impl Aggregate {
    pub fn get(&self, variant: &str, level: f64) -> Option<&VariantStats> {
        self.stats.iter().find(|s| s.variant == variant && s.noise_level == level)
    }
}

/// Profiles, `π` and `ρ` per (variant, noise level).
///
/// `ρ` counts every attempt; profiles only use comparable problems.
pub fn aggregate(results: &BenchResults, scale: ProfileScale) -> Result<Aggregate> {
    if results.runs.is_empty() {
        return Err(Error::EmptyResults);
    }
    let comparable: BTreeSet<&str> = results.comparable.iter().map(String::as_str).collect();
    let mut variants: Vec<&str> = Vec::new();
    let mut levels: Vec<f64> = Vec::new();
    for r in &results.runs {
        if !variants.contains(&r.variant.as_str()) {
            variants.push(&r.variant);
        }
        if !levels.contains(&r.noise_level) {
            levels.push(r.noise_level);
        }
    }
    levels.sort_by(f64::total_cmp);

    // best successful evaluation count per instance
    let mut best: BTreeMap<(&str, u64, usize), usize> = BTreeMap::new();
    for r in results.runs.iter().filter(|r| r.success) {
        let e = best.entry((&r.problem, r.noise_level.to_bits(), r.rep)).or_insert(usize::MAX);
        *e = (*e).min(r.evals);
    }

    let mut stats = Vec::new();
    let mut profiles = Vec::new();
    for &level in &levels {
        for &v in &variants {
            let runs: Vec<&RunSummary> = results
                .runs
                .iter()
                .filter(|r| r.variant == v && r.noise_level == level)
                .collect();
            let successes = runs.iter().filter(|r| r.success).count();
            let ratios: Vec<f64> = runs
                .iter()
                .filter(|r| comparable.contains(r.problem.as_str()))
                .map(|r| {
                    if !r.success {
                        return f64::INFINITY;
                    }
                    let b = best[&(r.problem.as_str(), level.to_bits(), r.rep)];
                    r.evals as f64 / b as f64
                })
                .collect();
            let profile = Profile { variant: v.to_string(), noise_level: level, ratios };
            stats.push(VariantStats {
                variant: v.to_string(),
                noise_level: level,
                pi: profile.area(scale),
                rho: if runs.is_empty() { 0.0 } else { 100.0 * successes as f64 / runs.len() as f64 },
                attempts: runs.len(),
                successes,
            });
            profiles.push(profile);
        }
    }
    let all: BTreeSet<&str> = results.runs.iter().map(|r| r.problem.as_str()).collect();
    let excluded = all.difference(&comparable).map(|s| s.to_string()).collect();
    Ok(Aggregate { stats, profiles, excluded })
}

pub fn write_results_csv<W: Write>(results: &BenchResults, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "variant",
        "problem",
        "noise_level",
        "rep",
        "status",
        "evals",
        "final_gnorm",
        "final_f",
        "success",
    ])?;
    for r in &results.runs {
        wtr.write_record([
            r.variant.clone(),
            r.problem.clone(),
            r.noise_level.to_string(),
            r.rep.to_string(),
            r.status.as_str().to_string(),
            r.evals.to_string(),
            r.final_gnorm.to_string(),
            r.final_f.map(|f| f.to_string()).unwrap_or_default(),
            r.success.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_stats_csv<W: Write>(agg: &Aggregate, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["variant", "noise_level", "pi", "rho"])?;
    for s in &agg.stats {
        wtr.write_record([
            s.variant.clone(),
            s.noise_level.to_string(),
            format!("{:.4}", s.pi),
            format!("{:.2}", s.rho),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Lowest objective value reached by long steepest-descent runs, each
/// restarted from the previous end point. Used to fill in missing references.
pub fn reference_value(problem: &Problem, iters: usize, restarts: usize) -> Result<f64> {
    let mut cfg = Variant::Sdba.config();
    cfg.max_iter = iters;
    cfg.eps = 1e-12;
    let mut p = problem.clone();
    let mut best = problem.value(&problem.x0)?;
    for _ in 0..=restarts {
        let rec = run(&p, &cfg)?;
        if let Ok(f) = problem.value(&rec.x_final) {
            best = best.min(f);
        }
        if rec.status == RunStatus::Converged {
            break;
        }
        p.x0 = rec.x_final;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{load_suite, testbed::quadratic_testbed};

    fn summary(variant: &str, problem: &str, evals: usize, ok: bool) -> RunSummary {
        RunSummary {
            variant: variant.into(),
            problem: problem.into(),
            noise_level: 0.0,
            rep: 0,
            status: if ok { RunStatus::Converged } else { RunStatus::BudgetExhausted },
            evals,
            final_gnorm: if ok { 1e-7 } else { 1.0 },
            final_f: Some(0.0),
            success: ok,
            violations: 0,
        }
    }

    #[test]
    fn success_clauses() {
        let mut p = quadratic_testbed(1, None);
        assert!(success(5e-7, None, &p).unwrap());
        p.f_ref = Some(1.0);
        assert!(success(1e-3, Some(1.0 + 5e-8), &p).unwrap());
        assert!(!success(1e-3, Some(1.0 + 5e-7), &p).unwrap());
        p.f_ref = Some(0.0);
        assert!(success(1e-3, Some(5e-8), &p).unwrap());
        p.f_ref = None;
        assert!(matches!(success(1e-3, Some(0.0), &p), Err(Error::MissingReference(_))));
    }

    #[test]
    fn perfect_and_failing_variants() {
        let runs = vec![
            summary("a", "p1", 10, true),
            summary("a", "p2", 10, true),
            summary("b", "p1", 10, false),
            summary("b", "p2", 10, false),
        ];
        let res = BenchResults { comparable: comparable_problems(&runs), runs };
        let agg = aggregate(&res, ProfileScale::Linear).unwrap();
        let a = agg.get("a", 0.0).unwrap();
        assert!((a.pi - 0.98).abs() < 1e-15);
        assert_eq!(a.rho, 100.0);
        let b = agg.get("b", 0.0).unwrap();
        assert_eq!((b.pi, b.rho), (0.0, 0.0));
        let log = aggregate(&res, ProfileScale::Log).unwrap();
        assert!((log.get("a", 0.0).unwrap().pi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ratios_and_area() {
        let runs = vec![summary("a", "p", 10, true), summary("b", "p", 20, true)];
        let res = BenchResults { comparable: vec!["p".into()], runs };
        let agg = aggregate(&res, ProfileScale::Linear).unwrap();
        assert_eq!(agg.profiles[1].ratios, vec![2.0]);
        assert!((agg.get("b", 0.0).unwrap().pi - 48.0 / 50.0).abs() < 1e-15);
        assert_eq!(agg.profiles[1].theta(1.5), 0.0);
        assert_eq!(agg.profiles[1].theta(2.0), 1.0);
    }

    #[test]
    fn filter_drops_disagreeing_problems() {
        let mut r1 = summary("a", "p", 10, true);
        let mut r2 = summary("b", "p", 10, true);
        r1.final_f = Some(1.0);
        r2.final_f = Some(1.1);
        let r3 = summary("a", "q", 10, true);
        assert_eq!(comparable_problems(&[r1, r2, r3]), vec!["q".to_string()]);
    }

    #[test]
    fn empty_results() {
        let res = BenchResults { runs: vec![], comparable: vec![] };
        assert!(matches!(aggregate(&res, ProfileScale::Linear), Err(Error::EmptyResults)));
    }

    #[test]
    fn matrix_is_deterministic() {
        let problems = load_suite(Some(&["beale", "rosenbr"])).unwrap();
        let opts = BenchOptions { master_seed: 7, max_iter: 200, ..BenchOptions::default() };
        let variants = [Variant::Adagi1, Variant::Sdba];
        let a = run_matrix(&variants, &problems, &[0.0, 0.05], 2, &opts).unwrap();
        let b = run_matrix(&variants, &problems, &[0.0, 0.05], 2, &opts).unwrap();
        assert_eq!(a, b);
        // level 0 runs once, level 0.05 twice
        assert_eq!(a.runs.len(), 2 * 2 * (1 + 2));
        assert!(a.runs.iter().all(|r| r.evals >= 1));
    }

    #[test]
    fn single_cell() {
        let problems = vec![quadratic_testbed(2, None)];
        let res = run_matrix(&[Variant::Adagi1], &problems, &[0.0], 1, &BenchOptions::default()).unwrap();
        assert_eq!(res.runs.len(), 1);
        assert!(res.runs[0].success);
        assert_eq!(res.runs[0].violations, 0);
    }

    #[test]
    fn seeds_differ_across_cells() {
        let a = cell_seed(1, "beale", 0.05, 0);
        assert_ne!(a, cell_seed(1, "beale", 0.05, 1));
        assert_ne!(a, cell_seed(1, "beale", 0.15, 0));
        assert_ne!(a, cell_seed(2, "beale", 0.05, 0));
        assert_eq!(a, cell_seed(1, "beale", 0.05, 0));
    }

    #[test]
    fn csv_columns() {
        let runs = vec![summary("a", "p", 10, true)];
        let res = BenchResults { comparable: vec!["p".into()], runs };
        let mut buf = Vec::new();
        write_results_csv(&res, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "variant,problem,noise_level,rep,status,evals,final_gnorm,final_f,success\n"
        ));
        let agg = aggregate(&res, ProfileScale::Linear).unwrap();
        let mut buf = Vec::new();
        write_stats_csv(&agg, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("variant,noise_level,pi,rho\n"));
    }
}
