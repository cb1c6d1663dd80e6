//! One-dimensional worst-case functions on which ASTR1 (with `B_k = 0`)
//! produces a prescribed sequence of gradients.
//!
//! The knots `(x_k, f_k, g_k)` are generated by running the scaling rule on
//! the prescribed gradients; a piecewise cubic Hermite interpolant then
//! turns them into a smooth function with exactly those values and slopes.

mod special;

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::driver::{Method, RunRecord};
use crate::error::{Error, Result};
use crate::model::ModelKind;
use crate::problem::{Objective, Problem};
use crate::scaling::ScalingKind;

pub use special::{lambert_wm1, zeta};

/// Parameters of the two constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SharpParams {
    /// Adagrad-like scaling: `g_0 = −2`, `g_k = −k^{−(½+η)}`.
    Sharp1 { mu: f64, eta: f64, varsigma: f64 },
    /// Divergent scaling `w_k = k^ν`: `g_k = −k^{−ω}`, indexed from `k = 1`.
    Sharp2 { nu: f64, omega: f64 },
}

impl SharpParams {
    pub fn name(&self) -> &'static str {
        match self {
            SharpParams::Sharp1 { .. } => "sharp1",
            SharpParams::Sharp2 { .. } => "sharp2",
        }
    }

    /// Index of the first knot.
    pub fn first_index(&self) -> usize {
        match self {
            SharpParams::Sharp1 { .. } => 0,
            SharpParams::Sharp2 { .. } => 1,
        }
    }

    /// Exponent `p` of the gradient decay `|g_k| = k^{−p}`.
    pub fn decay(&self) -> f64 {
        match *self {
            SharpParams::Sharp1 { eta, .. } => 0.5 + eta,
            SharpParams::Sharp2 { omega, .. } => omega,
        }
    }
}

/// Knots of a worst-case function.
///
/// `x`, `f` and `g` hold `K + 1` entries for the indices
/// `first_index..=first_index + K`; `s` and `w` hold the `K` steps between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotSequence {
    pub params: SharpParams,
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub kappa_f: f64,
}

impl KnotSequence {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn first_index(&self) -> usize {
        self.params.first_index()
    }

    pub fn f0(&self) -> f64 {
        self.f[0]
    }
}

/// Build the knots of the requested construction with `k_max` intervals.
pub fn build_counterexample(params: SharpParams, k_max: usize) -> Result<KnotSequence> {
    if k_max < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 intervals, got {k_max}")));
    }
    match params {
        SharpParams::Sharp1 { mu, eta, varsigma } => {
            if !(mu > 0.0 && mu < 1.0) || !(eta > 0.0 && eta <= 1.0) || !(varsigma > 0.0 && varsigma <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "sharp1 needs mu in (0,1), eta in (0,1], varsigma in (0,1]; got {mu}, {eta}, {varsigma}"
                )));
            }
            let p = 0.5 + eta;
            let g: Vec<f64> = (0..=k_max)
                .map(|k| if k == 0 { -2.0 } else { -(k as f64).powf(-p) })
                .collect();
            let f0 = 4.0 / (varsigma + 4.0).powf(mu) + zeta(1.0 + 2.0 * eta)?;
            let mut acc = 0.0;
            let mut w = Vec::with_capacity(k_max);
            for gk in &g[..k_max] {
                acc += gk * gk;
                w.push((varsigma + acc).powf(mu));
            }
            let kappa_f = f64::max(f64::max(1.5 * (varsigma + 5.0).powf(mu), f0), 2.0);
            Ok(assemble(params, g, w, f0, kappa_f))
        }
        SharpParams::Sharp2 { nu, omega } => {
            if !(nu > 0.0 && nu <= 1.0) {
                return Err(Error::InvalidParameter(format!("sharp2 needs nu in (0,1], got {nu}")));
            }
            if !(omega > 0.5 * (1.0 - nu) && omega <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "sharp2 needs omega in ((1-nu)/2, 1], got {omega}"
                )));
            }
            let g: Vec<f64> = (1..=k_max + 1).map(|k| -(k as f64).powf(-omega)).collect();
            // w_k = k^ν times the running max of |g|, which is |g_1| = 1
            let w: Vec<f64> = (1..=k_max).map(|k| (k as f64).powf(nu) * 1.0).collect();
            let f0 = zeta(2.0 * omega + nu)?;
            Ok(assemble(params, g, w, f0, omega))
        }
    }
}

fn assemble(params: SharpParams, g: Vec<f64>, w: Vec<f64>, f0: f64, kappa_f: f64) -> KnotSequence {
    let k_max = w.len();
    let mut x = Vec::with_capacity(k_max + 1);
    let mut f = Vec::with_capacity(k_max + 1);
    let mut s = Vec::with_capacity(k_max);
    x.push(0.0);
    f.push(f0);
    for k in 0..k_max {
        let sk = g[k].abs() / w[k];
        s.push(sk);
        x.push(x[k] + sk);
        f.push(f[k] + g[k] * sk);
    }
    KnotSequence { params, x, f, g, s, w, kappa_f }
}

/// Largest ratios `|f_{k+1} − f_k − g_k s_k| / s_k²` and `|g_{k+1} − g_k| / s_k`;
/// Hermite interpolation is admissible when both are at most `kappa_f`.
pub fn admissibility_ratios(knots: &KnotSequence) -> (f64, f64) {
    let mut r1 = 0.0_f64;
    let mut r2 = 0.0_f64;
    for k in 0..knots.s.len() {
        let sk = knots.s[k];
        r1 = r1.max((knots.f[k + 1] - knots.f[k] - knots.g[k] * sk).abs() / (sk * sk));
        r2 = r2.max((knots.g[k + 1] - knots.g[k]).abs() / sk);
    }
    (r1, r2)
}

/// Piecewise cubic Hermite interpolant of a knot sequence, extended linearly
/// beyond the last knot.
#[derive(Debug, Clone)]
pub struct Interpolant {
    pub knots: Arc<KnotSequence>,
}

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub x: f64,
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

pub fn hermite_fn(knots: KnotSequence) -> Interpolant {
    Interpolant { knots: Arc::new(knots) }
}

impl Interpolant {
    pub fn eval(&self, x: f64) -> Result<Jet> {
        let kn = &self.knots;
        if !(x >= kn.x[0]) {
            return Err(Error::OutOfDomain(format!("x = {x} lies left of the first knot")));
        }
        let last = kn.x.len() - 1;
        if x >= kn.x[last] {
            let d = x - kn.x[last];
            return Ok(Jet { x, f: kn.f[last] + kn.g[last] * d, df: kn.g[last], d2f: 0.0 });
        }
        // interval [x_k, x_{k+1}) containing x
        let k = kn.x.partition_point(|&v| v <= x) - 1;
        let h = kn.x[k + 1] - kn.x[k];
        let t = (x - kn.x[k]) / h;
        let (f0, f1, g0, g1) = (kn.f[k], kn.f[k + 1], kn.g[k], kn.g[k + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let f = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
            + (t3 - 2.0 * t2 + t) * h * g0
            + (-2.0 * t3 + 3.0 * t2) * f1
            + (t3 - t2) * h * g1;
        let df = (6.0 * t2 - 6.0 * t) * (f0 - f1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * g0
            + (3.0 * t2 - 2.0 * t) * g1;
        let d2f = ((12.0 * t - 6.0) * (f0 - f1) / h + (6.0 * t - 4.0) * g0 + (6.0 * t - 2.0) * g1) / h;
        Ok(Jet { x, f, df, d2f })
    }

    /// The interpolant as a one-dimensional test problem started at the first knot.
    pub fn to_problem(&self) -> Problem {
        let name = self.knots.params.name();
        Problem::new(name, vec![self.knots.x[0]], Arc::new(self.clone()))
    }

    /// Samples with `per_decade` points per decade of the knot index,
    /// optionally shifting values so that `f(x_0) = 100`.
    pub fn grid(&self, per_decade: usize, shift_to_100: bool) -> Result<Vec<Jet>> {
        if per_decade == 0 {
            return Err(Error::InvalidParameter("grid needs at least one point per decade".into()));
        }
        let kn = &self.knots;
        let intervals = kn.s.len() as f64;
        let shift = if shift_to_100 { 100.0 - kn.f0() } else { 0.0 };
        let mut out = Vec::new();
        // the first interval linearly, then logarithmic in the interval index
        let mut pos: Vec<f64> = (0..per_decade).map(|i| i as f64 / per_decade as f64).collect();
        let decades = intervals.log10();
        let count = (decades * per_decade as f64).ceil() as usize;
        for i in 0..=count {
            let p = 10f64.powf(i as f64 / per_decade as f64).min(intervals);
            pos.push(p);
        }
        pos.dedup();
        for p in pos {
            let k = (p.floor() as usize).min(kn.s.len() - 1);
            let t = (p - k as f64).min(1.0);
            let x = if t >= 1.0 { kn.x[k + 1] } else { kn.x[k] + t * kn.s[k] };
            let mut j = self.eval(x)?;
            j.f += shift;
            out.push(j);
        }
        Ok(out)
    }
}

impl Objective for Interpolant {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[0]).map_or(f64::NAN, |j| j.f)
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        g[0] = self.eval(x[0]).map_or(f64::NAN, |j| j.df);
    }

    fn hessian(&self, x: &[f64], h: &mut [f64]) {
        h[0] = self.eval(x[0]).map_or(f64::NAN, |j| j.d2f);
    }
}

/// Agreement between a run and the knots it should reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub checked: usize,
    /// `max |x_k − knot x_k|`.
    pub max_knot_deviation: f64,
    /// `max | |g(x_k)| − k^{−p} | / k^{−p}`.
    pub max_gradient_deviation: f64,
}

/// Compare the iterates of `record` with the knots.
pub fn verify_sharpness(knots: &KnotSequence, record: &RunRecord) -> Result<SharpnessReport> {
    let cfg = &record.config;
    if cfg.method != Method::Astr1 || cfg.model != ModelKind::Zero {
        return Err(Error::ConfigMismatch("the construction assumes ASTR1 with B = 0".into()));
    }
    let sc = cfg.scaling;
    let matches = match knots.params {
        SharpParams::Sharp1 { mu, varsigma, .. } => {
            sc.kind == ScalingKind::AdagradComp
                && sc.mu == mu
                && sc.varsigma == varsigma
                && sc.vartheta == 1.0
        }
        SharpParams::Sharp2 { nu, .. } => {
            sc.kind == ScalingKind::MaxgComp && sc.nu == nu && sc.varsigma <= 1.0
        }
    };
    if !matches {
        return Err(Error::ConfigMismatch(format!(
            "{} knots cannot be reproduced by scaling {}",
            knots.params.name(),
            sc.kind
        )));
    }
    let Some(trace) = record.trace.as_ref() else {
        return Ok(SharpnessReport::default());
    };
    let mut rep = SharpnessReport::default();
    let p = knots.params.decay();
    let first = knots.first_index();
    for row in trace.iter().take(knots.len()) {
        let j = row.k;
        let k = j + first;
        rep.max_knot_deviation = rep.max_knot_deviation.max((row.x[0] - knots.x[j]).abs());
        let want = if k == 0 { knots.g[0].abs() } else { (k as f64).powf(-p) };
        rep.max_gradient_deviation =
            rep.max_gradient_deviation.max((row.g[0].abs() - want).abs() / want);
        rep.checked += 1;
    }
    Ok(rep)
}

/// Write `k, x, f, g, s, w` rows (the last knot has no step).
pub fn write_knots_csv<W: Write>(knots: &KnotSequence, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["k", "x", "f", "g", "s", "w"])?;
    let first = knots.first_index();
    for j in 0..knots.len() {
        let (s, w) = match (knots.s.get(j), knots.w.get(j)) {
            (Some(s), Some(w)) => (s.to_string(), w.to_string()),
            _ => (String::new(), String::new()),
        };
        wtr.write_record([
            (j + first).to_string(),
            knots.x[j].to_string(),
            knots.f[j].to_string(),
            knots.g[j].to_string(),
            s,
            w,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_grid_csv<W: Write>(grid: &[Jet], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["x", "f", "df", "d2f"])?;
    for j in grid {
        wtr.serialize((j.x, j.f, j.df, j.d2f))?;
    }
    wtr.flush()?;
    Ok(())
}
