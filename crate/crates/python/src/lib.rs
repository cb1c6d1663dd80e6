//! Python bindings for the `offo` optimizers, problems and benchmarks.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use offo::bench::{self, BenchOptions, ProfileScale};
use offo::driver::{run, RunRecord};
use offo::linalg::DenseSym;
use offo::problem::testbed::quadratic_testbed;
use offo::sharpness::{self, SharpParams};
use offo::{load_suite, ModelKind, Norm, Oracle, Variant};

fn err(e: offo::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = offo::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn find_problem(name: &str) -> PyResult<offo::Problem> {
    if let Some(n) = name.strip_prefix("quad").and_then(|n| n.parse::<usize>().ok()) {
        if n > 0 {
            return Ok(quadratic_testbed(n, None));
        }
    }
    Ok(load_suite(Some(&[name])).map_err(err)?.remove(0))
}

/// A test problem with value and gradient oracles.
#[pyclass(name = "Problem", skip_from_py_object)]
struct PyProblem {
    inner: offo::Problem,
}

#[pymethods]
impl PyProblem {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Self { inner: find_problem(name)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn x0(&self) -> Vec<f64> {
        self.inner.x0.clone()
    }

    #[getter]
    fn f_ref(&self) -> Option<f64> {
        self.inner.f_ref
    }

    fn value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.value(&x).map_err(err)
    }

    fn gradient(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.gradient(&x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Problem({}, n={})", self.inner.name, self.inner.n())
    }
}

/// Outcome of one optimizer run.
#[pyclass(name = "RunResult", skip_from_py_object)]
struct PyRunResult {
    record: RunRecord,
    success: bool,
    final_f: Option<f64>,
}

#[pymethods]
impl PyRunResult {
    #[getter]
    fn problem(&self) -> String {
        self.record.problem.clone()
    }

    #[getter]
    fn variant(&self) -> String {
        self.record.variant.clone()
    }

    #[getter]
    fn status(&self) -> &'static str {
        self.record.status.as_str()
    }

    #[getter]
    fn iters(&self) -> usize {
        self.record.iters
    }

    #[getter]
    fn evals(&self) -> usize {
        self.record.evals
    }

    #[getter]
    fn final_gnorm(&self) -> f64 {
        self.record.final_gnorm
    }

    /// Noiseless objective at the final iterate.
    #[getter]
    fn final_f(&self) -> Option<f64> {
        self.final_f
    }

    #[getter]
    fn x(&self) -> Vec<f64> {
        self.record.x_final.clone()
    }

    #[getter]
    fn success(&self) -> bool {
        self.success
    }

    #[getter]
    fn violations(&self) -> usize {
        self.record.violations.total()
    }

    /// Gradient norms along the run, when it was traced.
    fn gnorms(&self) -> Option<Vec<f64>> {
        self.record.trace.as_ref().map(|t| t.iter().map(|r| r.gnorm).collect())
    }

    fn to_json(&self) -> PyResult<String> {
        self.record.to_json().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "RunResult({} on {}: {} after {} iterations, |g| = {:.3e})",
            self.record.variant, self.record.problem, self.record.status, self.record.iters, self.record.final_gnorm
        )
    }
}

/// Run a variant on a suite problem (or `quad<n>`).
#[pyfunction]
#[pyo3(signature = (problem, variant="adagi1", eps=1e-6, max_iter=100_000, noise=0.0, seed=0, model=None, norm=None, trace=false))]
#[allow(clippy::too_many_arguments)]
fn solve(
    problem: &str,
    variant: &str,
    eps: f64,
    max_iter: usize,
    noise: f64,
    seed: u64,
    model: Option<&str>,
    norm: Option<&str>,
    trace: bool,
) -> PyResult<PyRunResult> {
    let p = find_problem(problem)?;
    let mut cfg = parse::<Variant>(variant)?.config();
    if let Some(m) = model {
        cfg.model = parse::<ModelKind>(m)?;
    }
    if let Some(n) = norm {
        cfg.norm = parse::<Norm>(n)?;
    }
    cfg.eps = eps;
    cfg.max_iter = max_iter;
    cfg.noise_level = noise;
    cfg.seed = seed;
    cfg.trace = trace;
    let record = run(&p, &cfg).map_err(err)?;
    let s = bench::summarize(&record, &p, noise, 0).map_err(err)?;
    Ok(PyRunResult { record, success: s.success, final_f: s.final_f })
}

/// Names of the problems in the benchmark subset.
#[pyfunction]
fn suite_names() -> Vec<&'static str> {
    offo::problem::SUITE_NAMES.to_vec()
}

/// Names of the algorithm variants.
#[pyfunction]
fn variant_names() -> Vec<&'static str> {
    Variant::ALL.iter().map(|v| v.tag()).collect()
}

/// Run a benchmark matrix. Returns `(runs, stats)`, each a list of dicts.
#[pyfunction]
#[pyo3(signature = (variants, problems=None, noise=vec![0.0], reps=10, seed=0, max_iter=100_000, log_profile=false))]
fn run_bench<'py>(
    py: Python<'py>,
    variants: Vec<String>,
    problems: Option<Vec<String>>,
    noise: Vec<f64>,
    reps: usize,
    seed: u64,
    max_iter: usize,
    log_profile: bool,
) -> PyResult<(Vec<Bound<'py, PyDict>>, Vec<Bound<'py, PyDict>>)> {
    let vs: Vec<Variant> = variants.iter().map(|v| parse(v)).collect::<PyResult<_>>()?;
    let ps = match problems {
        None => load_suite(None).map_err(err)?,
        Some(names) => {
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            load_suite(Some(&names)).map_err(err)?
        }
    };
    let opts = BenchOptions { master_seed: seed, max_iter, ..BenchOptions::default() };
    let results = py
        .detach(|| bench::run_matrix(&vs, &ps, &noise, reps, &opts))
        .map_err(err)?;
    let scale = if log_profile { ProfileScale::Log } else { ProfileScale::Linear };
    let agg = bench::aggregate(&results, scale).map_err(err)?;
    let mut runs = Vec::with_capacity(results.runs.len());
    for r in &results.runs {
        let d = PyDict::new(py);
        d.set_item("variant", &r.variant)?;
        d.set_item("problem", &r.problem)?;
        d.set_item("noise_level", r.noise_level)?;
        d.set_item("rep", r.rep)?;
        d.set_item("status", r.status.as_str())?;
        d.set_item("evals", r.evals)?;
        d.set_item("final_gnorm", r.final_gnorm)?;
        d.set_item("final_f", r.final_f)?;
        d.set_item("success", r.success)?;
        runs.push(d);
    }
    let mut stats = Vec::with_capacity(agg.stats.len());
    for s in &agg.stats {
        let d = PyDict::new(py);
        d.set_item("variant", &s.variant)?;
        d.set_item("noise_level", s.noise_level)?;
        d.set_item("pi", s.pi)?;
        d.set_item("rho", s.rho)?;
        stats.push(d);
    }
    Ok((runs, stats))
}

/// Knots of a worst-case construction as a dict of columns.
#[pyfunction]
#[pyo3(signature = (kind, iters, mu=0.5, eta=0.01, varsigma=0.01, nu=1.0/9.0, omega=4.0/9.0 + 0.01))]
#[allow(clippy::too_many_arguments)]
fn sharpness_knots<'py>(
    py: Python<'py>,
    kind: &str,
    iters: usize,
    mu: f64,
    eta: f64,
    varsigma: f64,
    nu: f64,
    omega: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let params = match kind {
        "sharp1" => SharpParams::Sharp1 { mu, eta, varsigma },
        "sharp2" => SharpParams::Sharp2 { nu, omega },
        _ => return Err(PyValueError::new_err(format!("unknown construction {kind}"))),
    };
    let k = sharpness::build_counterexample(params, iters).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("first_index", k.first_index())?;
    d.set_item("x", &k.x)?;
    d.set_item("f", &k.f)?;
    d.set_item("g", &k.g)?;
    d.set_item("s", &k.s)?;
    d.set_item("w", &k.w)?;
    Ok(d)
}

/// A trust-region step for the quadratic model `gᵀs + ½ sᵀBs` with radii `|g_i|/w_i`.
#[pyfunction]
#[pyo3(signature = (g, b, w, norm="inf", tau=0.1))]
fn solve_tr_step(g: Vec<f64>, b: Vec<Vec<f64>>, w: Vec<f64>, norm: &str, tau: f64) -> PyResult<Vec<f64>> {
    let n = g.len();
    if b.len() != n || b.iter().any(|row| row.len() != n) {
        return Err(PyValueError::new_err("b must be an n x n matrix"));
    }
    let mut m = DenseSym::zeros(n);
    for (i, row) in b.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m.data[i * n + j] = 0.5 * (v + b[j][i]);
        }
    }
    let tr = offo::TrustRegion::from_scaling(&g, &w, parse::<Norm>(norm)?).map_err(err)?;
    offo::solve_tr_step(&g, &m, &tr, tau, 5 * n.max(1)).map_err(err)
}

/// The lower real branch `W₋₁` of the Lambert function on `[−1/e, 0)`.
#[pyfunction]
fn lambert_wm1(y: f64) -> PyResult<f64> {
    sharpness::lambert_wm1(y).map_err(err)
}

/// Randomized check of the series lemma; returns `(sequences, checks, violations)`.
#[pyfunction]
#[pyo3(signature = (count=1000, max_len=200, seed=0))]
fn series_check(count: usize, max_len: usize, seed: u64) -> (usize, usize, usize) {
    let r = bench::series_check(count, max_len, seed);
    (r.sequences, r.checks, r.violations)
}

#[pymodule]
fn offo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(suite_names, m)?)?;
    m.add_function(wrap_pyfunction!(variant_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    m.add_function(wrap_pyfunction!(sharpness_knots, m)?)?;
    m.add_function(wrap_pyfunction!(solve_tr_step, m)?)?;
    m.add_function(wrap_pyfunction!(lambert_wm1, m)?)?;
    m.add_function(wrap_pyfunction!(series_check, m)?)?;
    Ok(())
}
