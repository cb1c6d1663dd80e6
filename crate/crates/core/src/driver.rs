//! The ASTR1 iteration and the steepest-descent baseline.
//!
//! [`astr1`] queries gradients (and Hessians for the exact model) only. The
//! objective value is requested solely when `instrument` is set, and then
//! only to be recorded; no decision depends on it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, sub};
use crate::model::{HessianModel, ModelKind, DEFAULT_KAPPA_B};
use crate::problem::{with_noise, Oracle, Problem, Want};
use crate::scaling::{ScalingKind, ScalingState, ScalingStrategy};
use crate::step::{cauchy_point, model_value, solve_step, Norm, TrustRegion};

/// The named algorithm variants of the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "adag1")]
    Adag1,
    #[serde(rename = "adagi1")]
    Adagi1,
    #[serde(rename = "adag2")]
    Adag2,
    #[serde(rename = "adagi2")]
    Adagi2,
    #[serde(rename = "maxg01")]
    Maxg01,
    #[serde(rename = "maxgi01")]
    Maxgi01,
    #[serde(rename = "sdba")]
    Sdba,
    #[serde(rename = "b1adagi1")]
    B1adagi1,
    #[serde(rename = "lmadagi3b")]
    Lmadagi3b,
    #[serde(rename = "Eadagi1")]
    Eadagi1,
}

impl Variant {
    pub const ALL: [Variant; 10] = [
        Variant::Adag1,
        Variant::Adagi1,
        Variant::Adag2,
        Variant::Adagi2,
        Variant::Maxg01,
        Variant::Maxgi01,
        Variant::Sdba,
        Variant::B1adagi1,
        Variant::Lmadagi3b,
        Variant::Eadagi1,
    ];

    /// The six first-order scaling variants with `B_k = 0`.
    pub const SCALING_ONLY: [Variant; 6] = [
        Variant::Adag1,
        Variant::Adagi1,
        Variant::Adag2,
        Variant::Adagi2,
        Variant::Maxg01,
        Variant::Maxgi01,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::Adag1 => "adag1",
            Variant::Adagi1 => "adagi1",
            Variant::Adag2 => "adag2",
            Variant::Adagi2 => "adagi2",
            Variant::Maxg01 => "maxg01",
            Variant::Maxgi01 => "maxgi01",
            Variant::Sdba => "sdba",
            Variant::B1adagi1 => "b1adagi1",
            Variant::Lmadagi3b => "lmadagi3b",
            Variant::Eadagi1 => "Eadagi1",
        }
    }

    /// Default configuration of the variant.
    pub fn config(self) -> RunConfig {
        use ScalingKind::*;
        let (method, kind, norm, model) = match self {
            Variant::Adag1 => (Method::Astr1, AdagradAgg, Norm::Two, ModelKind::Zero),
            Variant::Adagi1 => (Method::Astr1, AdagradComp, Norm::Inf, ModelKind::Zero),
            Variant::Adag2 => (Method::Astr1, EwmaAgg, Norm::Two, ModelKind::Zero),
            Variant::Adagi2 => (Method::Astr1, EwmaComp, Norm::Inf, ModelKind::Zero),
            Variant::Maxg01 => (Method::Astr1, MaxgAgg, Norm::Two, ModelKind::Zero),
            Variant::Maxgi01 => (Method::Astr1, MaxgComp, Norm::Inf, ModelKind::Zero),
            Variant::Sdba => (Method::Sdba, AdagradComp, Norm::Inf, ModelKind::Zero),
            Variant::B1adagi1 => (Method::Astr1, AdagradComp, Norm::Inf, ModelKind::Bb),
            Variant::Lmadagi3b => (Method::Astr1, AdagradComp, Norm::Inf, ModelKind::Lbfgs(3)),
            Variant::Eadagi1 => (Method::Astr1, AdagradComp, Norm::Inf, ModelKind::Exact),
        };
        RunConfig {
            label: self.tag().to_string(),
            method,
            scaling: ScalingStrategy::new(kind),
            model,
            norm,
            ..RunConfig::default()
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.tag() == s || v.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Astr1,
    Sdba,
}

/// Armijo backtracking parameters of the baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Armijo {
    pub initial_step: f64,
    pub factor: f64,
    pub c: f64,
    pub max_backtracks: usize,
}

impl Default for Armijo {
    fn default() -> Self {
        Self { initial_step: 1.0, factor: 0.5, c: 1e-4, max_backtracks: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Name written to run records (a variant tag for the standard variants).
    pub label: String,
    pub method: Method,
    pub scaling: ScalingStrategy,
    pub model: ModelKind,
    pub norm: Norm,
    pub tau: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub kappa_b: f64,
    /// CG iteration cap; `5n` when `None`.
    pub cg_max: Option<usize>,
    pub noise_level: f64,
    pub seed: u64,
    pub armijo: Armijo,
    /// Count violations of the step and scaling contracts.
    pub assertions: bool,
    /// Record `f(x_k)` along the run (never used by the algorithm).
    pub instrument: bool,
    /// Keep the per-iteration trace.
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            label: "adagi1".into(),
            method: Method::Astr1,
            scaling: ScalingStrategy::new(ScalingKind::AdagradComp),
            model: ModelKind::Zero,
            norm: Norm::Inf,
            tau: 0.1,
            eps: 1e-6,
            max_iter: 100_000,
            kappa_b: DEFAULT_KAPPA_B,
            cg_max: None,
            noise_level: 0.0,
            seed: 0,
            armijo: Armijo::default(),
            assertions: true,
            instrument: false,
            trace: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!("eps = {} must be > 0", self.eps)));
        }
        if self.max_iter < 1 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidParameter(format!("tau = {} must lie in (0,1]", self.tau)));
        }
        if !(self.noise_level >= 0.0) {
            return Err(Error::InvalidParameter("noise level must be >= 0".into()));
        }
        self.scaling.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Converged,
    BudgetExhausted,
    OverflowFailure,
    /// The baseline's backtracking exhausted its trials.
    LineSearchFailure,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::BudgetExhausted => "budget-exhausted",
            RunStatus::OverflowFailure => "overflow-failure",
            RunStatus::LineSearchFailure => "line-search-failure",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One iteration of a trace. The final row describes the terminal iterate
/// and carries no step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub gnorm: f64,
    pub w: Vec<f64>,
    pub delta: Vec<f64>,
    pub s: Vec<f64>,
    /// `−(gᵀs + ½ sᵀBs)` for the step taken.
    pub model_decrease: f64,
    /// Decrease at the generalized Cauchy point.
    pub cauchy_decrease: f64,
    pub f: Option<f64>,
    /// Bound on `‖B_k‖₂`.
    pub b_norm: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violations {
    pub sbound: usize,
    pub gcp: usize,
    pub floor: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.sbound + self.gcp + self.floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub variant: String,
    pub status: RunStatus,
    /// Number of steps taken.
    pub iters: usize,
    /// Derivative evaluations (iterations + 1); one per iteration for sdba.
    pub evals: usize,
    pub final_gnorm: f64,
    pub final_f: Option<f64>,
    pub x_final: Vec<f64>,
    pub violations: Violations,
    pub value_calls: usize,
    pub fallback_steps: usize,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceRow>>,
}

impl RunRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Run the configured method on `problem`, adding noise when requested.
pub fn run(problem: &Problem, config: &RunConfig) -> Result<RunRecord> {
    match config.method {
        Method::Astr1 => astr1(problem, config),
        Method::Sdba => sdba(problem, config),
    }
}

/// ASTR1 on `problem` (wrapped with noise when `config.noise_level > 0`).
pub fn astr1(problem: &Problem, config: &RunConfig) -> Result<RunRecord> {
    if config.noise_level > 0.0 {
        let noisy = with_noise(problem.clone(), config.noise_level, config.seed)?;
        astr1_oracle(&noisy, config)
    } else {
        astr1_oracle(problem, config)
    }
}

/// Steepest descent with Armijo backtracking on `problem`.
pub fn sdba(problem: &Problem, config: &RunConfig) -> Result<RunRecord> {
    if config.noise_level > 0.0 {
        let noisy = with_noise(problem.clone(), config.noise_level, config.seed)?;
        sdba_oracle(&noisy, config)
    } else {
        sdba_oracle(problem, config)
    }
}

struct Outcome {
    status: RunStatus,
    iters: usize,
    final_gnorm: f64,
    final_f: Option<f64>,
    x: Vec<f64>,
}

fn record(
    oracle: &(impl Oracle + ?Sized),
    config: &RunConfig,
    out: Outcome,
    violations: Violations,
    value_calls: usize,
    fallback_steps: usize,
    trace: Option<Vec<TraceRow>>,
) -> RunRecord {
    RunRecord {
        problem: oracle.name().to_string(),
        variant: config.label.clone(),
        status: out.status,
        iters: out.iters,
        evals: out.iters + 1,
        final_gnorm: out.final_gnorm,
        final_f: out.final_f,
        x_final: out.x,
        violations,
        value_calls,
        fallback_steps,
        config: config.clone(),
        trace,
    }
}

/// ASTR1 on any oracle, without noise wrapping.
pub fn astr1_oracle<O: Oracle + ?Sized>(oracle: &O, config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let n = oracle.dim();
    if n == 0 {
        return Err(Error::InvalidParameter("problem dimension must be positive".into()));
    }
    let cg_max = config.cg_max.unwrap_or(5 * n);
    let mut scaling = ScalingState::new(config.scaling, n)?;
    let mut model = HessianModel::new(config.model, n, config.kappa_b)?;
    let want = if config.instrument { Want::VALUE_GRADIENT } else { Want::GRADIENT };

    let mut x = oracle.x0().to_vec();
    let mut trace: Option<Vec<TraceRow>> = config.trace.then(Vec::new);
    let mut violations = Violations::default();
    let mut value_calls = 0;
    let mut fallback_steps = 0;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None; // (g_{k-1}, s_{k-1})
    let mut last_gnorm = f64::NAN;
    let mut last_f = None;

    let mut k = 0;
    let status = loop {
        let ev = match oracle.evaluate(&x, want) {
            Ok(ev) => ev,
            Err(Error::NonFiniteValue { .. }) => break RunStatus::OverflowFailure,
            Err(e) => return Err(e),
        };
        if config.instrument {
            value_calls += 1;
        }
        let f = ev.value;
        let g = ev.into_gradient();
        let gnorm = norm2(&g);

        if let Some((g_prev, s_prev)) = prev.take() {
            let y = sub(&g, &g_prev);
            if model.update(&s_prev, &y).is_err() {
                break RunStatus::OverflowFailure;
            }
        }
        if config.model == ModelKind::Exact {
            match oracle.hessian(&x) {
                Ok(h) => {
                    if model.set_exact(h).is_err() {
                        break RunStatus::OverflowFailure;
                    }
                }
                Err(Error::NonFiniteValue { .. }) => break RunStatus::OverflowFailure,
                Err(e) => return Err(e),
            }
        }
        last_gnorm = gnorm;
        last_f = f;

        let terminal = gnorm <= config.eps || k == config.max_iter;
        if terminal {
            if let Some(t) = trace.as_mut() {
                t.push(TraceRow {
                    k,
                    x: x.clone(),
                    g: g.clone(),
                    gnorm,
                    w: vec![],
                    delta: vec![],
                    s: vec![],
                    model_decrease: 0.0,
                    cauchy_decrease: 0.0,
                    f,
                    b_norm: model.norm_bound(),
                });
            }
            break if gnorm <= config.eps {
                RunStatus::Converged
            } else {
                RunStatus::BudgetExhausted
            };
        }

        let w = scaling.update(&g, k)?;
        if !w.iter().all(|v| v.is_finite()) {
            break RunStatus::OverflowFailure;
        }
        let tr = TrustRegion::from_scaling(&g, &w, config.norm)?;
        let cauchy = match cauchy_point(&g, &model, &tr) {
            Ok(c) => c,
            Err(Error::NonFiniteInput { .. }) => break RunStatus::OverflowFailure,
            Err(e) => return Err(e),
        };
        let step = solve_step(&g, &model, &tr, config.tau, cg_max, &cauchy)?;
        if step.fallback {
            fallback_steps += 1;
        }
        let s = step.s;
        let m_s = model_value(&g, &model, &s);

        if config.assertions {
            if !tr.contains(&s) {
                violations.sbound += 1;
            }
            if !(m_s <= config.tau * model_value(&g, &model, &cauchy.s_q)) {
                violations.gcp += 1;
            }
            let floor = config.scaling.floor(k);
            if w.iter().any(|&wi| wi < floor) {
                violations.floor += 1;
            }
        }

        if let Some(t) = trace.as_mut() {
            t.push(TraceRow {
                k,
                x: x.clone(),
                g: g.clone(),
                gnorm,
                w,
                delta: tr.radii,
                s: s.clone(),
                model_decrease: -m_s,
                cauchy_decrease: cauchy.qdec,
                f,
                b_norm: model.norm_bound(),
            });
        }

        for (xi, si) in x.iter_mut().zip(&s) {
            *xi += si;
        }
        prev = Some((g, s));
        k += 1;
    };

    let out = Outcome { status, iters: k, final_gnorm: last_gnorm, final_f: last_f, x };
    Ok(record(oracle, config, out, violations, value_calls, fallback_steps, trace))
}

/// Steepest descent with Armijo backtracking on any oracle.
pub fn sdba_oracle<O: Oracle + ?Sized>(oracle: &O, config: &RunConfig) -> Result<RunRecord> {
    config.validate()?;
    let a = config.armijo;
    let mut x = oracle.x0().to_vec();
    let mut trace: Option<Vec<TraceRow>> = config.trace.then(Vec::new);
    let mut value_calls = 0;
    let mut k = 0;

    let (mut f, mut g) = match oracle.evaluate(&x, Want::VALUE_GRADIENT) {
        Ok(ev) => (ev.value(), ev.into_gradient()),
        Err(Error::NonFiniteValue { .. }) => {
            let out = Outcome {
                status: RunStatus::OverflowFailure,
                iters: 0,
                final_gnorm: f64::NAN,
                final_f: None,
                x,
            };
            return Ok(record(oracle, config, out, Violations::default(), 0, 0, trace));
        }
        Err(e) => return Err(e),
    };
    value_calls += 1;

    let status = loop {
        let gnorm = norm2(&g);
        let row = |s: Vec<f64>, md: f64| TraceRow {
            k,
            x: x.clone(),
            g: g.clone(),
            gnorm,
            w: vec![],
            delta: vec![],
            s,
            model_decrease: md,
            cauchy_decrease: md,
            f: Some(f),
            b_norm: 0.0,
        };
        if gnorm <= config.eps || k == config.max_iter {
            if let Some(t) = trace.as_mut() {
                t.push(row(vec![], 0.0));
            }
            break if gnorm <= config.eps {
                RunStatus::Converged
            } else {
                RunStatus::BudgetExhausted
            };
        }
        let gg = gnorm * gnorm;
        let mut alpha = a.initial_step;
        let mut accepted = None;
        for _ in 0..=a.max_backtracks {
            let xt: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
            value_calls += 1;
            match oracle.value(&xt) {
                Ok(ft) if ft <= f - a.c * alpha * gg => {
                    accepted = Some(xt);
                    break;
                }
                Ok(_) | Err(Error::NonFiniteValue { .. }) => alpha *= a.factor,
                Err(e) => return Err(e),
            }
        }
        let Some(xt) = accepted else {
            break RunStatus::LineSearchFailure;
        };
        if let Some(t) = trace.as_mut() {
            let s: Vec<f64> = g.iter().map(|gi| -alpha * gi).collect();
            t.push(row(s, alpha * gg));
        }
        match oracle.evaluate(&xt, Want::VALUE_GRADIENT) {
            Ok(ev) => {
                value_calls += 1;
                f = ev.value();
                g = ev.into_gradient();
                x = xt;
            }
            Err(Error::NonFiniteValue { .. }) => {
                x = xt;
                k += 1;
                break RunStatus::OverflowFailure;
            }
            Err(e) => return Err(e),
        }
        k += 1;
    };

    let out = Outcome { status, iters: k, final_gnorm: norm2(&g), final_f: Some(f), x };
    Ok(record(oracle, config, out, Violations::default(), value_calls, 0, trace))
}
