//! Numerical checks of the complexity bounds on recorded runs.

use serde::{Deserialize, Serialize};

use crate::driver::{RunRecord, TraceRow};
use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf, sub};
use crate::problem::{Oracle, Problem};
use crate::scaling::ScalingStrategy;
use crate::sharpness::lambert_wm1;

use super::series::{series_bounds_hold, SeriesForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    MuLtHalf,
    MuEqHalf,
    MuGtHalf,
    /// Divergent scaling `ς(k+1)^ν ≤ w ≤ κ_w(k+1)^μ`.
    Ming,
}

impl Regime {
    pub fn for_strategy(s: &ScalingStrategy) -> Regime {
        if s.kind.is_maxg() {
            Regime::Ming
        } else if s.mu < 0.5 {
            Regime::MuLtHalf
        } else if s.mu == 0.5 {
            Regime::MuEqHalf
        } else {
            Regime::MuGtHalf
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::MuLtHalf => "mu_lt_half",
            Regime::MuEqHalf => "mu_eq_half",
            Regime::MuGtHalf => "mu_gt_half",
            Regime::Ming => "ming",
        }
    }
}

/// Problem and algorithm constants entering the bounds, with the derived
/// `κ` values. Constants that do not apply to the regime are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryConstants {
    pub n: usize,
    pub mu: f64,
    pub nu: f64,
    pub varsigma: f64,
    pub vartheta: f64,
    pub tau: f64,
    pub kappa_b: f64,
    pub l: f64,
    pub kappa_g: f64,
    pub gamma0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: Option<f64>,
    pub kappa4: f64,
    pub kappa5: Option<f64>,
    pub kappa6: Option<f64>,
    pub kappa7: Option<f64>,
    pub kappa8: Option<f64>,
    /// Lower bound `ς_min` on the scaling factors.
    pub varsigma_min: f64,
    pub theta: f64,
    pub j_theta: f64,
    pub kappa_w: f64,
    pub kappa_diamond: f64,
}

impl TheoryConstants {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        strategy: &ScalingStrategy,
        tau: f64,
        kappa_b: f64,
        l: f64,
        kappa_g: f64,
        gamma0: f64,
    ) -> Result<Self> {
        strategy.validate()?;
        let ok = n >= 1
            && tau > 0.0
            && tau <= 1.0
            && kappa_b >= 1.0
            && l >= 0.0
            && kappa_g > 0.0
            && gamma0 >= 0.0
            && [tau, kappa_b, l, kappa_g, gamma0].iter().all(|v| v.is_finite());
        if !ok {
            return Err(Error::MissingConstants(format!(
                "invalid inputs: n={n} tau={tau} kappa_b={kappa_b} L={l} kappa_g={kappa_g} gamma0={gamma0}"
            )));
        }
        let (mu, nu, vs, vt) = (strategy.mu, strategy.nu, strategy.varsigma, strategy.vartheta);
        let nf = n as f64;
        let kbl = kappa_b * (kappa_b + l);

        let kappa1 = kappa_g.powf(2.0 * mu) * kappa_b / (tau * vs.powf(mu) * vt.sqrt());
        let kappa2 = nf * kappa1 * (kappa_b + l) / vt;
        let kappa4 = 2.0 * kappa1 * gamma0;

        let (mut kappa3, mut kappa5, mut kappa6, mut kappa7, mut kappa8) = (None, None, None, None, None);
        if mu < 0.5 {
            let t2 = (4.0 * nf * kbl / ((1.0 - 2.0 * mu) * tau * vs.powf(mu) * vt.powf(1.5)))
                .powf(1.0 / mu);
            let t3 = (2f64.powf(2.0 * mu) * vt * (1.0 - 2.0 * mu) * gamma0 / (nf * (kappa_b + l)))
                .powf(1.0 / (1.0 - 2.0 * mu));
            kappa3 = Some(vs.max(t2).max(t3));
            kappa5 = Some(
                kappa2 / (1.0 - 2.0 * mu)
                    * ((vs + kappa_g * kappa_g).powf(1.0 - 2.0 * mu) - vs.powf(1.0 - 2.0 * mu)),
            );
        } else if mu == 0.5 {
            let c = 8.0 * nf * kbl / (tau * vs.sqrt() * vt.powf(1.5));
            let w = lambert_wm1(-1.0 / c)?;
            let t2 = 0.5 * (2.0 * gamma0 * vt / (nf * (kappa_b + l))).exp();
            let t3 = 0.5 * c * c * w * w;
            kappa6 = Some(vs.max(t2).max(t3));
        } else {
            let inner = gamma0 + nf * (kappa_b + l) * vs.powf(1.0 - 2.0 * mu) / (2.0 * vt * (2.0 * mu - 1.0));
            kappa7 = Some(
                (2f64.powf(1.0 + mu) * kappa_b / (tau * vs.powf(mu) * vt.sqrt()) * inner)
                    .powf(1.0 / (1.0 - mu)),
            );
            kappa8 = Some(kappa4 + kappa2 * vs.powf(1.0 - 2.0 * mu) / (2.0 * mu - 1.0));
        }

        let varsigma_min = strategy.varsigma_min();
        let theta = 0.5 * tau * varsigma_min;
        let j_theta = (kbl / (varsigma_min * (tau * varsigma_min - theta))).powf(1.0 / nu);
        let kappa_w = kappa_g;
        let kappa_diamond = 2.0 * kappa_w * kappa_b / theta
            * (gamma0
                + nf * (j_theta + 1.0) * kappa_g * kappa_g * (kappa_b + l)
                    / (2.0 * varsigma_min * varsigma_min));

        let c = TheoryConstants {
            n,
            mu,
            nu,
            varsigma: vs,
            vartheta: vt,
            tau,
            kappa_b,
            l,
            kappa_g,
            gamma0,
            kappa1,
            kappa2,
            kappa3,
            kappa4,
            kappa5,
            kappa6,
            kappa7,
            kappa8,
            varsigma_min,
            theta,
            j_theta,
            kappa_w,
            kappa_diamond,
        };
        Ok(c)
    }

    /// Constants for a recorded noiseless run: `κ_g` and `κ_B` from the
    /// trace, `Γ₀ = f(x₀) − f_low`.
    pub fn from_run(record: &RunRecord, problem: &Problem, l: f64, f_low: f64) -> Result<Self> {
        let trace = record
            .trace
            .as_ref()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| Error::MissingConstants("run has no trace".into()))?;
        let cfg = &record.config;
        let gmax = trace.iter().map(|r| norm_inf(&r.g)).fold(0.0, f64::max);
        let kappa_g = f64::max(1.0, (cfg.scaling.varsigma + gmax * gmax).sqrt());
        let kappa_b = trace.iter().map(|r| r.b_norm).fold(1.0, f64::max);
        let gamma0 = problem.value(&problem.x0)? - f_low;
        Self::new(problem.n(), &cfg.scaling, cfg.tau, kappa_b, l, kappa_g, gamma0)
    }

    /// `κ∘` of the `O(1/√(k+1))` bound on the smallest gradient.
    pub fn kappa_circ(&self, regime: Regime) -> Result<f64> {
        let v = match regime {
            Regime::MuLtHalf => self.kappa3,
            Regime::MuEqHalf => self.kappa6,
            Regime::MuGtHalf => self.kappa7,
            Regime::Ming => None,
        };
        v.filter(|v| v.is_finite() && *v > 0.0)
            .ok_or_else(|| Error::MissingConstants(format!("no finite kappa for {}", regime.as_str())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryViolation {
    pub k: usize,
    pub bound: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub problem: String,
    pub variant: String,
    pub regime: Regime,
    pub constants: TheoryConstants,
    pub iterations: usize,
    /// Number of inequalities evaluated.
    pub checked: usize,
    pub violation_count: usize,
    /// The first few violations.
    pub violations: Vec<TheoryViolation>,
    /// The logarithmic series bound applied to `a_j = ‖g_j‖²`, `ξ = ς`.
    pub series_spot: bool,
}

impl TheoryReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0 && self.series_spot
    }
}

const KEPT_VIOLATIONS: usize = 20;

struct Tally {
    checked: usize,
    count: usize,
    kept: Vec<TheoryViolation>,
}

impl Tally {
    fn check(&mut self, k: usize, bound: &str, lhs: f64, rhs: f64) {
        self.checked += 1;
        if !(lhs <= rhs) {
            self.count += 1;
            if self.kept.len() < KEPT_VIOLATIONS {
                self.kept.push(TheoryViolation { k, bound: bound.to_string(), lhs, rhs });
            }
        }
    }
}

/// Check the gradient bounds of `regime` at every iteration of `record`.
///
/// For the adaptive regimes this covers the `κ∘/√(k+1)` bound on the
/// smallest gradient and both terms of the bound on the average squared
/// gradient. For the divergent regime, the average over `(j_θ, k]` is
/// checked for every `k > j_θ`.
pub fn theory_check(record: &RunRecord, constants: &TheoryConstants, regime: Regime) -> Result<TheoryReport> {
    let trace = record
        .trace
        .as_ref()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| Error::MissingConstants("theory checks need a traced run".into()))?;
    let c = constants;
    let mut t = Tally { checked: 0, count: 0, kept: Vec::new() };

    let g2: Vec<f64> = trace.iter().map(|r| r.gnorm * r.gnorm).collect();
    let kappa_circ = match regime {
        Regime::Ming => None,
        r => Some(c.kappa_circ(r)?),
    };
    let mut gmin = f64::INFINITY;
    let mut sum = 0.0;
    for (k, row) in trace.iter().enumerate() {
        let kp1 = (k + 1) as f64;
        gmin = gmin.min(row.gnorm);
        sum += g2[k];
        let avg = sum / kp1;
        match regime {
            Regime::MuLtHalf => {
                t.check(k, "min-gradient", gmin * kp1.sqrt(), kappa_circ.unwrap());
                t.check(k, "average-first", avg, c.kappa3.unwrap() / kp1);
                let second = c.kappa4 / kp1.powf(1.0 - c.mu) + c.kappa5.unwrap() / kp1.powf(c.mu);
                t.check(k, "average-second", avg, second);
            }
            Regime::MuEqHalf => {
                t.check(k, "min-gradient", gmin * kp1.sqrt(), kappa_circ.unwrap());
                t.check(k, "average-first", avg, c.kappa6.unwrap() / kp1);
                let second = c.kappa4 / kp1.sqrt()
                    + c.kappa2 * (kp1 * c.kappa_g * c.kappa_g / c.varsigma).ln_1p() / kp1.sqrt();
                t.check(k, "average-second", avg, second);
            }
            Regime::MuGtHalf => {
                t.check(k, "min-gradient", gmin * kp1.sqrt(), kappa_circ.unwrap());
                t.check(k, "average-first", avg, c.kappa7.unwrap() / kp1);
                t.check(k, "average-second", avg, c.kappa8.unwrap() / kp1.powf(1.0 - c.mu));
            }
            Regime::Ming => {
                let kf = k as f64;
                if kf > c.j_theta {
                    let first = c.j_theta.floor() as usize + 1;
                    let tail: f64 = g2[first..=k].iter().sum();
                    let avg_tail = tail / (k + 1 - first) as f64;
                    t.check(k, "tail-average", avg_tail, c.kappa_diamond * kp1.powf(c.mu) / (kf - c.j_theta));
                    t.check(
                        k,
                        "tail-average-coarse",
                        avg_tail,
                        2.0 * c.kappa_diamond * (c.j_theta + 1.0) / kf.powf(1.0 - c.mu),
                    );
                }
            }
        }
    }

    let mut b = Vec::with_capacity(g2.len());
    let mut acc = 0.0;
    for a in &g2 {
        acc += a;
        b.push(acc);
    }
    let series_spot = series_bounds_hold(&g2, &b, c.varsigma, SeriesForm::Log, 1e-12);

    Ok(TheoryReport {
        problem: record.problem.clone(),
        variant: record.variant.clone(),
        regime,
        constants: c.clone(),
        iterations: trace.len(),
        checked: t.checked,
        violation_count: t.count,
        violations: t.kept,
        series_spot,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdecreaseReport {
    pub checked: usize,
    pub violations: usize,
    /// Smallest `lhs − rhs` over the run.
    pub worst_margin: f64,
    pub kappa_b: f64,
    pub l: f64,
    pub varsigma_min: f64,
}

/// Largest `‖g_{j+1} − g_j‖/‖s_j‖` along a trace.
pub fn empirical_lipschitz(trace: &[TraceRow]) -> f64 {
    trace
        .windows(2)
        .filter(|w| norm2(&w[0].s) > 0.0)
        .map(|w| norm2(&sub(&w[1].g, &w[0].g)) / norm2(&w[0].s))
        .fold(0.0, f64::max)
}

/// Check the guaranteed decrease
/// `f(x₀) − f(x_{k+1}) ≥ Σ_{j≤k} Σ_i g_{ij}²/(2κ_B w_{ij})·(τς_min − κ_B(κ_B+L)/w_{ij})`
/// at every iteration of an instrumented, traced run, with absolute slack `1e-8`.
///
/// `l = None` uses the empirical Lipschitz estimate of the run.
pub fn check_fdecrease(record: &RunRecord, l: Option<f64>) -> Result<FdecreaseReport> {
    let trace = record
        .trace
        .as_ref()
        .filter(|t| !t.is_empty())
        .ok_or_else(|| Error::MissingConstants("decrease check needs a traced run".into()))?;
    let fs: Vec<f64> = trace
        .iter()
        .map(|r| r.f)
        .collect::<Option<_>>()
        .ok_or_else(|| Error::MissingConstants("decrease check needs recorded values".into()))?;
    let cfg = &record.config;
    let kappa_b = trace.iter().map(|r| r.b_norm).fold(1.0, f64::max);
    let l = l.unwrap_or_else(|| empirical_lipschitz(trace));
    let varsigma_min = cfg.scaling.varsigma_min();
    let kbl = kappa_b * (kappa_b + l);
    let mut rep = FdecreaseReport { checked: 0, violations: 0, worst_margin: f64::INFINITY, kappa_b, l, varsigma_min };
    let mut rhs = 0.0;
    for k in 0..trace.len() - 1 {
        let row = &trace[k];
        for (gi, wi) in row.g.iter().zip(&row.w) {
            rhs += gi * gi / (2.0 * kappa_b * wi) * (cfg.tau * varsigma_min - kbl / wi);
        }
        let lhs = fs[0] - fs[k + 1];
        rep.checked += 1;
        rep.worst_margin = rep.worst_margin.min(lhs - rhs);
        if lhs < rhs - 1e-8 {
            rep.violations += 1;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::{astr1, Variant};
    use crate::problem::testbed::quadratic_testbed;
    use crate::scaling::ScalingKind;

    fn traced(variant: Variant, n: usize, iters: usize) -> (RunRecord, Problem) {
        let p = quadratic_testbed(n, None);
        let mut cfg = variant.config();
        cfg.max_iter = iters;
        cfg.trace = true;
        cfg.instrument = true;
        (astr1(&p, &cfg).unwrap(), p)
    }

    #[test]
    fn constants_are_finite_and_positive() {
        for mu in [0.25, 0.5, 0.75] {
            let s = ScalingStrategy::new(ScalingKind::AdagradComp).with_mu(mu);
            let c = TheoryConstants::new(5, &s, 0.1, 1.0, 1.0, 2.0, 3.0).unwrap();
            let k = c.kappa_circ(Regime::for_strategy(&s)).unwrap();
            assert!(k.is_finite() && k > 0.0);
            assert!(c.kappa1 > 0.0 && c.kappa2 > 0.0 && c.kappa4 > 0.0);
        }
    }

    #[test]
    fn kappa6_by_hand() {
        let s = ScalingStrategy::new(ScalingKind::AdagradComp);
        let c = TheoryConstants::new(1, &s, 0.1, 1.0, 1.0, 1.0, 0.5).unwrap();
        // 8nκB(κB+L)/(τ√ς) = 16/(0.1·0.1) = 1600
        let w = lambert_wm1(-1.0 / 1600.0).unwrap();
        assert!((c.kappa6.unwrap() - 0.5 * 1600.0f64.powi(2) * w * w).abs() < 1e-6);
    }

    #[test]
    fn ming_threshold_is_huge_on_the_testbed() {
        let s = ScalingStrategy::new(ScalingKind::MaxgComp);
        let c = TheoryConstants::new(1, &s, 0.1, 1.0, 1.0, 1.0, 0.5).unwrap();
        assert!((c.theta - 5e-4).abs() < 1e-18);
        assert!(c.j_theta > 1e50);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let s = ScalingStrategy::new(ScalingKind::AdagradComp);
        assert!(matches!(
            TheoryConstants::new(1, &s, 0.1, 0.5, 1.0, 1.0, 0.5),
            Err(Error::MissingConstants(_))
        ));
    }

    #[test]
    fn adagi1_on_one_dimensional_quadratic() {
        let (rec, p) = traced(Variant::Adagi1, 1, 10_000);
        let c = TheoryConstants::from_run(&rec, &p, 1.0, 0.0).unwrap();
        let rep = theory_check(&rec, &c, Regime::MuEqHalf).unwrap();
        assert!(rep.passed(), "{:?}", rep.violations);
        assert!(rep.checked >= 3);
    }

    #[test]
    fn first_iteration_only() {
        let (mut rec, p) = traced(Variant::Adagi1, 2, 1);
        rec.trace.as_mut().unwrap().truncate(1);
        let c = TheoryConstants::from_run(&rec, &p, 1.0, 0.0).unwrap();
        let rep = theory_check(&rec, &c, Regime::MuEqHalf).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.passed());
    }

    #[test]
    fn untraced_run_has_no_constants() {
        let p = quadratic_testbed(1, None);
        let rec = astr1(&p, &Variant::Adagi1.config()).unwrap();
        assert!(matches!(TheoryConstants::from_run(&rec, &p, 1.0, 0.0), Err(Error::MissingConstants(_))));
    }

    #[test]
    fn fdecrease_on_testbed() {
        for v in Variant::SCALING_ONLY {
            let (rec, _) = traced(v, 5, 500);
            let rep = check_fdecrease(&rec, Some(1.0)).unwrap();
            assert_eq!(rep.violations, 0, "{v}");
            assert!(rep.checked > 0);
        }
    }

    #[test]
    fn fdecrease_needs_values() {
        let p = quadratic_testbed(1, None);
        let mut cfg = Variant::Adagi1.config();
        cfg.trace = true;
        let rec = astr1(&p, &cfg).unwrap();
        assert!(matches!(check_fdecrease(&rec, None), Err(Error::MissingConstants(_))));
    }
}
