//! Differentiable test problems and the oracles the optimizers query.
//!
//! A [`Problem`] couples an [`Objective`] (value, gradient and optional
//! Hessian routines) with its dimension, standard start point and a
//! reference optimal value. [`NoisyProblem`] wraps a problem and contaminates
//! every oracle output with relative Gaussian noise. Both implement
//! [`Oracle`], which is all the drivers ever see.

pub(crate) mod noise;
pub mod suite;
pub mod testbed;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::DenseSym;

pub use noise::{noise_draws, with_noise, NoisyProblem, Quantity};
pub use suite::{load_suite, manifest, Manifest, ManifestEntry, SUITE_NAMES};

/// The quantities requested from an oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Want {
    pub value: bool,
    pub gradient: bool,
    pub hessian: bool,
}

impl Want {
    pub const VALUE: Want = Want { value: true, gradient: false, hessian: false };
    pub const GRADIENT: Want = Want { value: false, gradient: true, hessian: false };
    pub const HESSIAN: Want = Want { value: false, gradient: false, hessian: true };
    pub const VALUE_GRADIENT: Want = Want { value: true, gradient: true, hessian: false };
    pub const ALL: Want = Want { value: true, gradient: true, hessian: true };

    pub fn is_empty(&self) -> bool {
        !(self.value || self.gradient || self.hessian)
    }
}

/// Oracle output; only the requested fields are populated.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evaluation {
    pub value: Option<f64>,
    pub gradient: Option<Vec<f64>>,
    pub hessian: Option<DenseSym>,
}

impl Evaluation {
    pub fn value(&self) -> f64 {
        self.value.expect("value was not requested")
    }

    pub fn gradient(&self) -> &[f64] {
        self.gradient.as_deref().expect("gradient was not requested")
    }

    pub fn into_gradient(self) -> Vec<f64> {
        self.gradient.expect("gradient was not requested")
    }

    pub fn into_hessian(self) -> DenseSym {
        self.hessian.expect("hessian was not requested")
    }
}

/// A smooth function `f: Rⁿ → R` with analytic gradient.
///
/// Implementations may return non-finite numbers on overflow; [`evaluate`]
/// turns those into [`Error::NonFiniteValue`].
pub trait Objective: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64], g: &mut [f64]);

    /// Row-major Hessian. Defaults to central differences of the gradient.
    fn hessian(&self, x: &[f64], h: &mut [f64]) {
        fd_hessian(|y, g| self.gradient(y, g), x, h);
    }
}

/// Central finite-difference Hessian of a gradient routine, symmetrized.
///
/// Step `√ε·(1+|x_i|)` per coordinate, divided by the representable width.
pub fn fd_hessian<G: Fn(&[f64], &mut [f64])>(grad: G, x: &[f64], h: &mut [f64]) {
    let n = x.len();
    let mut xp = x.to_vec();
    let mut gp = vec![0.0; n];
    let mut gm = vec![0.0; n];
    for j in 0..n {
        let step = f64::EPSILON.sqrt() * (1.0 + x[j].abs());
        xp[j] = x[j] + step;
        let hi = xp[j];
        grad(&xp, &mut gp);
        xp[j] = x[j] - step;
        let width = hi - xp[j];
        grad(&xp, &mut gm);
        xp[j] = x[j];
        for i in 0..n {
            h[i * n + j] = (gp[i] - gm[i]) / width;
        }
    }
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = m;
            h[j * n + i] = m;
        }
    }
}

/// Where a problem's reference optimal value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Literature,
    ReferenceRun,
}

/// Anything the optimizers can query for derivatives.
pub trait Oracle: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn x0(&self) -> &[f64];
    fn evaluate(&self, x: &[f64], want: Want) -> Result<Evaluation>;

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate(x, Want::GRADIENT)?.into_gradient())
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate(x, Want::VALUE)?.value())
    }

    fn hessian(&self, x: &[f64]) -> Result<DenseSym> {
        Ok(self.evaluate(x, Want::HESSIAN)?.into_hessian())
    }
}

/// Test problem with its oracles and metadata.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub x0: Vec<f64>,
    pub f_ref: Option<f64>,
    pub f_ref_provenance: Option<Provenance>,
    objective: Arc<dyn Objective>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("f_ref", &self.f_ref)
            .finish()
    }
}

impl Problem {
    pub fn new(name: impl Into<String>, x0: Vec<f64>, objective: Arc<dyn Objective>) -> Self {
        Self {
            name: name.into(),
            x0,
            f_ref: None,
            f_ref_provenance: None,
            objective,
        }
    }

    pub fn with_reference(mut self, f_ref: f64, provenance: Provenance) -> Self {
        self.f_ref = Some(f_ref);
        self.f_ref_provenance = Some(provenance);
        self
    }

    pub fn n(&self) -> usize {
        self.x0.len()
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }
}

impl Oracle for Problem {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n()
    }

    fn x0(&self) -> &[f64] {
        &self.x0
    }

    fn evaluate(&self, x: &[f64], want: Want) -> Result<Evaluation> {
        evaluate_objective(self.objective.as_ref(), self.n(), x, want)
    }
}

pub(crate) fn evaluate_objective(
    obj: &dyn Objective,
    n: usize,
    x: &[f64],
    want: Want,
) -> Result<Evaluation> {
    check_dim(n, x.len())?;
    if want.is_empty() {
        return Err(Error::InvalidParameter("empty evaluation request".into()));
    }
    let mut out = Evaluation::default();
    if want.value {
        let f = obj.value(x);
        if !f.is_finite() {
            return Err(Error::NonFiniteValue { what: "objective value" });
        }
        out.value = Some(f);
    }
    if want.gradient {
        let mut g = vec![0.0; n];
        obj.gradient(x, &mut g);
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteValue { what: "gradient" });
        }
        out.gradient = Some(g);
    }
    if want.hessian {
        let mut h = DenseSym::zeros(n);
        obj.hessian(x, &mut h.data);
        if !h.data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteValue { what: "hessian" });
        }
        out.hessian = Some(h);
    }
    Ok(out)
}

/// Evaluate the requested quantities of any oracle at `x`.
pub fn evaluate<O: Oracle + ?Sized>(oracle: &O, x: &[f64], want: Want) -> Result<Evaluation> {
    oracle.evaluate(x, want)
}

/// Largest relative discrepancy between analytic derivatives and central
/// finite differences at `x`: `(gradient vs value, hessian vs gradient)`.
///
/// Relative errors are measured against `max(1, ‖·‖∞)` of the analytic
/// quantity, so tiny components do not dominate.
pub fn derivative_errors(problem: &Problem, x: &[f64]) -> Result<(f64, f64)> {
    let n = problem.n();
    let ev = problem.evaluate(x, Want::ALL)?;
    let g = ev.gradient();
    let h = ev.hessian.as_ref().unwrap();

    let mut y = x.to_vec();
    let mut fd_g = vec![0.0; n];
    for i in 0..n {
        // cube root of eps balances truncation and rounding for central differences
        let step = f64::EPSILON.cbrt() * (1.0 + x[i].abs());
        y[i] = x[i] + step;
        let fp = problem.value(&y)?;
        y[i] = x[i] - step;
        let fm = problem.value(&y)?;
        y[i] = x[i];
        fd_g[i] = (fp - fm) / (2.0 * step);
    }
    let gscale = g.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let ge = g
        .iter()
        .zip(&fd_g)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs() / gscale));

    let mut fd_h = vec![0.0; n * n];
    let mut gp;
    let mut gm;
    for j in 0..n {
        let step = f64::EPSILON.cbrt() * (1.0 + x[j].abs());
        y[j] = x[j] + step;
        gp = problem.gradient(&y)?;
        y[j] = x[j] - step;
        gm = problem.gradient(&y)?;
        y[j] = x[j];
        for i in 0..n {
            fd_h[i * n + j] = (gp[i] - gm[i]) / (2.0 * step);
        }
    }
    let hscale = h.data.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let he = h
        .data
        .iter()
        .zip(&fd_h)
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs() / hscale));
    Ok((ge, he))
}

/// Objective from plain function pointers.
pub struct FnObjective {
    pub value: fn(&[f64]) -> f64,
    pub gradient: fn(&[f64], &mut [f64]),
    pub hessian: Option<fn(&[f64], &mut [f64])>,
}

impl Objective for FnObjective {
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        (self.gradient)(x, g)
    }

    fn hessian(&self, x: &[f64], h: &mut [f64]) {
        match self.hessian {
            Some(hf) => hf(x, h),
            None => fd_hessian(|y, g| (self.gradient)(y, g), x, h),
        }
    }
}

/// `f(x) = Σ r_i(x)²` with `m` residuals and a row-major `m × n` Jacobian.
pub struct SumOfSquares {
    pub m: fn(usize) -> usize,
    pub residuals: fn(&[f64], &mut [f64]),
    pub jacobian: fn(&[f64], &mut [f64]),
}

impl SumOfSquares {
    fn residual_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; (self.m)(x.len())];
        (self.residuals)(x, &mut r);
        r
    }
}

impl Objective for SumOfSquares {
    fn value(&self, x: &[f64]) -> f64 {
        self.residual_vec(x).iter().map(|r| r * r).sum()
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let n = x.len();
        let r = self.residual_vec(x);
        let mut j = vec![0.0; r.len() * n];
        (self.jacobian)(x, &mut j);
        g.iter_mut().for_each(|v| *v = 0.0);
        for (i, ri) in r.iter().enumerate() {
            let row = &j[i * n..(i + 1) * n];
            for (gk, jk) in g.iter_mut().zip(row) {
                *gk += 2.0 * ri * jk;
            }
        }
    }

    /// `2(JᵀJ + Σ r_i ∇²r_i)`, the second term by central differences of
    /// the Jacobian. Differencing `J` rather than `2Jᵀr` avoids cancellation
    /// when the residuals are large.
    fn hessian(&self, x: &[f64], h: &mut [f64]) {
        let n = x.len();
        let r = self.residual_vec(x);
        let m = r.len();
        let mut j = vec![0.0; m * n];
        (self.jacobian)(x, &mut j);
        for a in 0..n {
            for b in 0..n {
                h[a * n + b] = 2.0 * (0..m).map(|i| j[i * n + a] * j[i * n + b]).sum::<f64>();
            }
        }
        let mut y = x.to_vec();
        let mut jp = vec![0.0; m * n];
        let mut jm = vec![0.0; m * n];
        for k in 0..n {
            let step = f64::EPSILON.sqrt() * (1.0 + x[k].abs());
            y[k] = x[k] + step;
            let xp = y[k];
            (self.jacobian)(&y, &mut jp);
            y[k] = x[k] - step;
            let xm = y[k];
            (self.jacobian)(&y, &mut jm);
            y[k] = x[k];
            // the representable step, not the nominal one
            let width = xp - xm;
            for a in 0..n {
                let d: f64 = (0..m).map(|i| r[i] * (jp[i * n + a] - jm[i * n + a])).sum();
                h[a * n + k] += 2.0 * d / width;
            }
        }
        for a in 0..n {
            for b in 0..a {
                let v = 0.5 * (h[a * n + b] + h[b * n + a]);
                h[a * n + b] = v;
                h[b * n + a] = v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_square() -> Problem {
        let obj = FnObjective {
            value: |x| 0.5 * x[0] * x[0],
            gradient: |x, g| g[0] = x[0],
            hessian: Some(|_, h| h[0] = 1.0),
        };
        Problem::new("half-square", vec![3.0], Arc::new(obj))
    }

    #[test]
    fn quadratic_value_gradient_hessian() {
        let p = half_square();
        let ev = evaluate(&p, &[3.0], Want::ALL).unwrap();
        assert_eq!(ev.value, Some(4.5));
        assert_eq!(ev.gradient.as_deref(), Some(&[3.0][..]));
        assert_eq!(ev.hessian.unwrap().data, vec![1.0]);
    }

    #[test]
    fn only_requested_quantities_are_returned() {
        let p = half_square();
        let ev = evaluate(&p, &[1.0], Want::GRADIENT).unwrap();
        assert!(ev.value.is_none());
        assert!(ev.hessian.is_none());
        assert!(ev.gradient.is_some());
    }

    #[test]
    fn dimension_mismatch() {
        let p = half_square();
        assert_eq!(
            evaluate(&p, &[1.0, 2.0], Want::VALUE),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn empty_request_rejected() {
        let p = half_square();
        assert!(matches!(
            evaluate(&p, &[1.0], Want::default()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn overflow_is_reported() {
        let obj = FnObjective {
            value: |x| (x[0] * 1000.0).exp(),
            gradient: |x, g| g[0] = 1000.0 * (x[0] * 1000.0).exp(),
            hessian: None,
        };
        let p = Problem::new("exp", vec![0.0], Arc::new(obj));
        assert_eq!(
            p.gradient(&[10.0]),
            Err(Error::NonFiniteValue { what: "gradient" })
        );
        assert!(p.value(&[0.0]).is_ok());
    }

    #[test]
    fn fd_hessian_of_quadratic_is_symmetric() {
        let mut h = vec![0.0; 4];
        // f = x0² + 3 x0 x1 + 2 x1²
        fd_hessian(
            |x, g| {
                g[0] = 2.0 * x[0] + 3.0 * x[1];
                g[1] = 3.0 * x[0] + 4.0 * x[1];
            },
            &[0.3, -1.7],
            &mut h,
        );
        for (a, b) in h.iter().zip([2.0, 3.0, 3.0, 4.0]) {
            assert!((a - b).abs() < 1e-7);
        }
        assert_eq!(h[1], h[2]);
    }
}
