//! Generalized Cauchy point and trust-region step computation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dot, norm2, sgn, SymmetricOperator};

/// Norm defining the trust region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    /// Box `|s_i| ≤ Δ_i`.
    Inf,
    /// Ball `‖s‖₂ ≤ ‖Δ‖₂`.
    Two,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Inf => "inf",
            Norm::Two => "2",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" => Ok(Norm::Inf),
            "2" | "two" => Ok(Norm::Two),
            _ => Err(Error::UnknownTag(s.to_string())),
        }
    }
}

/// Trust region of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrustRegion {
    pub norm: Norm,
    /// `Δ_i = |g_i| / w_i`.
    pub radii: Vec<f64>,
    /// `‖Δ‖₂`, the ball radius of the two-norm variant.
    pub radius: f64,
}

impl TrustRegion {
    /// Radii `Δ_i = |g_i| / w_i`.
    pub fn from_scaling(g: &[f64], w: &[f64], norm: Norm) -> Result<Self> {
        check_dim(g.len(), w.len())?;
        if !g.iter().chain(w).all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput { what: "gradient or scaling" });
        }
        if w.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter("scaling factors must be positive".into()));
        }
        let radii: Vec<f64> = g.iter().zip(w).map(|(gi, wi)| gi.abs() / wi).collect();
        let radius = norm2(&radii);
        Ok(Self { norm, radii, radius })
    }

    /// Whether `s` lies in the region, with no tolerance.
    pub fn contains(&self, s: &[f64]) -> bool {
        match self.norm {
            Norm::Inf => s.iter().zip(&self.radii).all(|(si, di)| si.abs() <= *di),
            Norm::Two => norm2(s) <= self.radius,
        }
    }
}

/// `gᵀs + ½ sᵀBs`
pub fn model_value<B: SymmetricOperator + ?Sized>(g: &[f64], b: &B, s: &[f64]) -> f64 {
    dot(g, s) + 0.5 * b.quad(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub s_l: Vec<f64>,
    pub gamma: f64,
    pub s_q: Vec<f64>,
    /// `−(gᵀs_Q + ½ s_Qᵀ B s_Q)`, nonnegative.
    pub qdec: f64,
}

/// Generalized Cauchy point: `s_L = −sgn(g)Δ` and `s_Q = γ s_L`.
pub fn cauchy_point<B: SymmetricOperator + ?Sized>(
    g: &[f64],
    b: &B,
    tr: &TrustRegion,
) -> Result<CauchyData> {
    check_dim(tr.radii.len(), g.len())?;
    check_dim(b.dim(), g.len())?;
    if !g.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput { what: "gradient" });
    }
    let s_l: Vec<f64> = g.iter().zip(&tr.radii).map(|(gi, di)| -sgn(*gi) * di).collect();
    let curv = b.quad(&s_l);
    let gamma = if curv > 0.0 {
        (dot(g, &s_l).abs() / curv).min(1.0)
    } else {
        1.0
    };
    let s_q: Vec<f64> = s_l.iter().map(|v| gamma * v).collect();
    let qdec = -model_value(g, b, &s_q);
    if !qdec.is_finite() {
        return Err(Error::NonFiniteInput { what: "model" });
    }
    Ok(CauchyData { s_l, gamma, s_q, qdec })
}

/// Outcome of [`solve_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub s: Vec<f64>,
    pub cg_iters: usize,
    /// The CG step failed the Cauchy fraction test and `s_Q` was returned.
    pub fallback: bool,
}

/// Trust-region step satisfying `|s_i| ≤ Δ_i` (or `‖s‖₂ ≤ ‖Δ‖₂`) and
/// `m(s) ≤ τ m(s_Q)`.
pub fn solve_tr_step<B: SymmetricOperator + ?Sized>(
    g: &[f64],
    b: &B,
    tr: &TrustRegion,
    tau: f64,
    cg_max: usize,
) -> Result<Vec<f64>> {
    let cauchy = cauchy_point(g, b, tr)?;
    Ok(solve_step(g, b, tr, tau, cg_max, &cauchy)?.s)
}

/// As [`solve_tr_step`], reusing an already computed Cauchy point.
pub fn solve_step<B: SymmetricOperator + ?Sized>(
    g: &[f64],
    b: &B,
    tr: &TrustRegion,
    tau: f64,
    cg_max: usize,
    cauchy: &CauchyData,
) -> Result<StepOutcome> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must lie in (0,1]")));
    }
    if !tr.radii.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteInput { what: "trust-region radii" });
    }
    let tol = f64::max(1e-12, 1e-5 * norm2(g));
    let (s, cg_iters) = match tr.norm {
        Norm::Inf => projected_cg(g, b, &tr.radii, tol, cg_max),
        Norm::Two => steihaug_cg(g, b, tr.radius, tol, cg_max),
    };
    let ok = s.iter().all(|v| v.is_finite())
        && tr.contains(&s)
        && model_value(g, b, &s) <= tau * model_value(g, b, &cauchy.s_q);
    if ok {
        Ok(StepOutcome { s, cg_iters, fallback: false })
    } else {
        Ok(StepOutcome { s: cauchy.s_q.clone(), cg_iters, fallback: true })
    }
}

fn clamp_into_box(s: &mut [f64], radii: &[f64]) {
    for (si, di) in s.iter_mut().zip(radii) {
        *si = si.clamp(-di, *di);
    }
}

/// Truncated CG on the box, restarted in the reduced space whenever a face
/// is reached. Fixed coordinates whose multiplier has the wrong sign are
/// released at restarts.
fn projected_cg<B: SymmetricOperator + ?Sized>(
    g: &[f64],
    b: &B,
    radii: &[f64],
    tol: f64,
    cg_max: usize,
) -> (Vec<f64>, usize) {
    let n = g.len();
    let mut s: Vec<f64> = vec![0.0; n];
    // coordinates with a zero radius can never move
    let mut free: Vec<bool> = radii.iter().map(|&d| d > 0.0).collect();
    let mut r = g.to_vec();
    let mut iters = 0;
    let mut q = vec![0.0; n];
    let mut restarts = 0;

    'outer: loop {
        restarts += 1;
        if restarts > 4 * n + 8 {
            break;
        }
        let rr_free = |r: &[f64], free: &[bool]| -> f64 {
            r.iter().zip(free).filter(|(_, f)| **f).map(|(v, _)| v * v).sum()
        };
        let mut rr = rr_free(&r, &free);
        if rr.sqrt() <= tol {
            // reduced problem solved: release faces the model wants to leave
            let mut released = false;
            for i in 0..n {
                if !free[i] && radii[i] > 0.0 && s[i].abs() == radii[i] && r[i] * s[i] > 0.0 {
                    free[i] = true;
                    released = true;
                }
            }
            if released && iters < cg_max {
                continue 'outer;
            }
            break;
        }
        let mut p: Vec<f64> = (0..n).map(|i| if free[i] { -r[i] } else { 0.0 }).collect();
        loop {
            if iters >= cg_max {
                break 'outer;
            }
            iters += 1;
            b.apply_into(&p, &mut q);
            let curv = dot(&p, &q);
            let mut alpha_max = f64::INFINITY;
            for i in 0..n {
                if free[i] && p[i] != 0.0 {
                    let room = (sgn(p[i]) * radii[i] - s[i]) / p[i];
                    alpha_max = alpha_max.min(room.max(0.0));
                }
            }
            let alpha = if curv > 0.0 { rr / curv } else { f64::INFINITY };
            if alpha >= alpha_max {
                // move to the nearest face and fix every coordinate reaching it
                if alpha_max == f64::INFINITY {
                    break 'outer;
                }
                let cut = alpha_max * (1.0 + 1e-12);
                let hit: Vec<usize> = (0..n)
                    .filter(|&i| {
                        free[i] && p[i] != 0.0 && (sgn(p[i]) * radii[i] - s[i]) / p[i] <= cut
                    })
                    .collect();
                axpy(alpha_max, &p, &mut s);
                for i in hit {
                    s[i] = sgn(p[i]) * radii[i];
                    free[i] = false;
                }
                clamp_into_box(&mut s, radii);
                r = b.apply(&s);
                axpy(1.0, g, &mut r);
                continue 'outer;
            }
            axpy(alpha, &p, &mut s);
            axpy(alpha, &q, &mut r);
            clamp_into_box(&mut s, radii);
            let rr_new = rr_free(&r, &free);
            if rr_new.sqrt() <= tol {
                continue 'outer;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = if free[i] { -r[i] + beta * p[i] } else { 0.0 };
            }
        }
    }
    (s, iters)
}

/// Positive root `t` of `‖s + t p‖ = radius`.
fn to_sphere(s: &[f64], p: &[f64], radius: f64) -> f64 {
    let pp = dot(p, p);
    let sp = dot(s, p);
    let ss = dot(s, s);
    let c = ss - radius * radius;
    let disc = (sp * sp - pp * c).max(0.0);
    // numerically stable form of (−sp + √disc)/pp
    if sp > 0.0 {
        -c / (sp + disc.sqrt())
    } else {
        (-sp + disc.sqrt()) / pp
    }
}

/// Steihaug truncated CG on the ball of radius `radius`.
fn steihaug_cg<B: SymmetricOperator + ?Sized>(
    g: &[f64],
    b: &B,
    radius: f64,
    tol: f64,
    cg_max: usize,
) -> (Vec<f64>, usize) {
    let n = g.len();
    let mut s: Vec<f64> = vec![0.0; n];
    if radius == 0.0 {
        return (s, 0);
    }
    let mut r = g.to_vec();
    let mut rr = dot(&r, &r);
    let mut p: Vec<f64> = r.iter().map(|v| -v).collect();
    let mut q = vec![0.0; n];
    let mut iters = 0;
    while rr.sqrt() > tol && iters < cg_max {
        iters += 1;
        b.apply_into(&p, &mut q);
        let curv = dot(&p, &q);
        let alpha = if curv > 0.0 { rr / curv } else { f64::INFINITY };
        let mut trial = s.clone();
        if alpha.is_finite() {
            axpy(alpha, &p, &mut trial);
        }
        if !alpha.is_finite() || norm2(&trial) >= radius {
            let t = to_sphere(&s, &p, radius);
            axpy(t, &p, &mut s);
            break;
        }
        s = trial;
        axpy(alpha, &q, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = -r[i] + beta * p[i];
        }
    }
    // pull back rounding excursions outside the ball
    let shrink = 1.0 - f64::EPSILON;
    let mut guard = 0;
    while norm2(&s) > radius && guard < 64 {
        let nrm = norm2(&s);
        let c = if guard == 0 { radius / nrm } else { shrink };
        s.iter_mut().for_each(|v| *v *= c);
        guard += 1;
    }
    (s, iters)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseSym;

    fn box_tr(radii: Vec<f64>) -> TrustRegion {
        let radius = norm2(&radii);
        TrustRegion { norm: Norm::Inf, radii, radius }
    }

    #[test]
    fn stationary_point() {
        let b = DenseSym::identity(2);
        let tr = TrustRegion::from_scaling(&[0.0, 0.0], &[1.0, 1.0], Norm::Inf).unwrap();
        let c = cauchy_point(&[0.0, 0.0], &b, &tr).unwrap();
        assert_eq!(c.s_l, vec![0.0, 0.0]);
        assert_eq!(c.s_q, vec![0.0, 0.0]);
        assert_eq!(c.qdec, 0.0);
    }

    #[test]
    fn cauchy_positive_curvature() {
        let b = DenseSym::from_diag(&[4.0]);
        let tr = TrustRegion::from_scaling(&[2.0], &[1.0], Norm::Inf).unwrap();
        let c = cauchy_point(&[2.0], &b, &tr).unwrap();
        assert_eq!(c.s_l, vec![-2.0]);
        assert_eq!(c.gamma, 0.25);
        assert_eq!(c.s_q, vec![-0.5]);
        assert_eq!(c.qdec, 0.5);
        // line-search oracle: minimize 2t·(−2) + ½·16 t² on a fine grid of [0, 1]
        let best = (0..=10000)
            .map(|i| i as f64 / 10000.0)
            .min_by(|a, b| {
                let q = |t: f64| -4.0 * t + 8.0 * t * t;
                q(*a).partial_cmp(&q(*b)).unwrap()
            })
            .unwrap();
        assert_eq!(best, 0.25);
    }

    #[test]
    fn cauchy_negative_curvature() {
        let b = DenseSym::from_diag(&[-2.0]);
        let tr = TrustRegion::from_scaling(&[1.0], &[1.0], Norm::Inf).unwrap();
        let c = cauchy_point(&[1.0], &b, &tr).unwrap();
        assert_eq!(c.gamma, 1.0);
        assert_eq!(c.s_q, vec![-1.0]);
        // exhaustive γ grid: the model keeps decreasing up to γ = 1
        let q = |t: f64| -t - t * t;
        assert!((0..100).all(|i| q(i as f64 / 100.0) > q(1.0)));
    }

    #[test]
    fn zero_model_gives_linear_minimizer() {
        let b = DenseSym::zeros(3);
        let g = [1.5, -0.25, 0.0];
        let tr = TrustRegion::from_scaling(&g, &[2.0, 0.5, 1.0], Norm::Inf).unwrap();
        let s = solve_tr_step(&g, &b, &tr, 0.1, 15).unwrap();
        let c = cauchy_point(&g, &b, &tr).unwrap();
        assert_eq!(s, c.s_l);
        assert_eq!(s, vec![-0.75, 0.5, 0.0]);
    }

    #[test]
    fn interior_newton_point() {
        let b = DenseSym::identity(2);
        let s = solve_tr_step(&[1.0, 1.0], &b, &box_tr(vec![10.0, 10.0]), 0.1, 10).unwrap();
        assert!((s[0] + 1.0).abs() < 1e-14 && (s[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn one_face_active() {
        let b = DenseSym::identity(2);
        let s = solve_tr_step(&[1.0, 1.0], &b, &box_tr(vec![0.5, 10.0]), 0.1, 10).unwrap();
        assert_eq!(s[0], -0.5);
        assert!((s[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn two_norm_zero_model() {
        let b = DenseSym::zeros(2);
        let g = [3.0, 4.0];
        let tr = TrustRegion::from_scaling(&g, &[2.0, 2.0], Norm::Two).unwrap();
        let s = solve_tr_step(&g, &b, &tr, 0.1, 10).unwrap();
        assert!(norm2(&s) <= tr.radius);
        assert!((s[0] + 1.5).abs() < 1e-14 && (s[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn two_norm_interior_and_negative_curvature() {
        let b = DenseSym::identity(2);
        let g = [0.1, 0.2];
        let tr = TrustRegion { norm: Norm::Two, radii: vec![1.0, 1.0], radius: 1.0 };
        let s = solve_tr_step(&g, &b, &tr, 0.1, 10).unwrap();
        assert!((s[0] + 0.1).abs() < 1e-14 && (s[1] + 0.2).abs() < 1e-14);

        let b = DenseSym::from_diag(&[-1.0, -1.0]);
        let s = solve_tr_step(&g, &b, &tr, 0.1, 10).unwrap();
        assert!((norm2(&s) - 1.0).abs() < 1e-14 && norm2(&s) <= 1.0);
    }

    #[test]
    fn bad_tau_rejected() {
        let b = DenseSym::identity(1);
        assert!(solve_tr_step(&[1.0], &b, &box_tr(vec![1.0]), 0.0, 5).is_err());
        assert!(solve_tr_step(&[f64::NAN], &b, &box_tr(vec![1.0]), 0.1, 5).is_err());
    }

    #[test]
    fn norm_tags() {
        assert_eq!("inf".parse::<Norm>().unwrap(), Norm::Inf);
        assert_eq!("2".parse::<Norm>().unwrap(), Norm::Two);
        assert!("1".parse::<Norm>().is_err());
    }
}
