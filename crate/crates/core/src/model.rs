//! Bounded symmetric Hessian approximations `B_k` for the quadratic model.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, DenseSym, SymmetricOperator};

/// Curvature safeguard: a secant pair is used only if `yᵀs ≥ 1e-15‖s‖²`.
pub const CURVATURE_TOL: f64 = 1e-15;

/// Default cap on `‖B_k‖₂`.
pub const DEFAULT_KAPPA_B: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    /// `B_k = 0`.
    Zero,
    /// Scalar multiple of the identity from the latest secant pair.
    Bb,
    /// Limited-memory BFGS with the given number of pairs.
    Lbfgs(usize),
    /// The Hessian of the objective at the current iterate.
    Exact,
}

impl ModelKind {
    pub fn tag(self) -> String {
        match self {
            ModelKind::Zero => "none".into(),
            ModelKind::Bb => "bb".into(),
            ModelKind::Lbfgs(m) => format!("lbfgs{m}"),
            ModelKind::Exact => "exact".into(),
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" | "zero" => Ok(ModelKind::Zero),
            "bb" => Ok(ModelKind::Bb),
            "exact" => Ok(ModelKind::Exact),
            _ => s
                .strip_prefix("lbfgs")
                .and_then(|m| m.parse::<usize>().ok())
                .filter(|&m| m > 0)
                .map(ModelKind::Lbfgs)
                .ok_or_else(|| Error::UnknownTag(s.to_string())),
        }
    }
}

#[derive(Debug, Clone)]
struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    ys: f64,
    /// `B_{j-1} s_j`, where `B_{j-1}` includes the updates of the older pairs.
    bs: Vec<f64>,
    sbs: f64,
}

/// The Hessian approximation of one run.
///
/// After every change the operator is rescaled, if needed, so that its
/// spectral norm does not exceed `kappa_b`.
#[derive(Debug, Clone)]
pub struct HessianModel {
    pub kind: ModelKind,
    pub kappa_b: f64,
    n: usize,
    /// BB scalar, or the L-BFGS base `σ` in `B_0 = σI`.
    sigma: f64,
    pairs: VecDeque<Pair>,
    dense: Option<DenseSym>,
    /// Factor applied by the cap (1 when inactive).
    scale: f64,
    /// Spectral norm (or upper bound) of the operator after capping.
    norm: f64,
}

impl HessianModel {
    pub fn new(kind: ModelKind, n: usize, kappa_b: f64) -> Result<Self> {
        if !(kappa_b >= 1.0 && kappa_b.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa_b = {kappa_b} must be >= 1")));
        }
        if let ModelKind::Lbfgs(0) = kind {
            return Err(Error::InvalidParameter("lbfgs needs at least one pair".into()));
        }
        Ok(Self {
            kind,
            kappa_b,
            n,
            sigma: 0.0,
            pairs: VecDeque::new(),
            dense: None,
            scale: 1.0,
            norm: 0.0,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    /// Bound on `‖B‖₂` after capping (exact for zero, bb and exact kinds).
    pub fn norm_bound(&self) -> f64 {
        self.norm
    }

    /// Factor applied by the cap at the last update.
    pub fn cap_scale(&self) -> f64 {
        self.scale
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Absorb the secant pair `(s, y)` with `y = g_{k+1} − g_k`.
    ///
    /// No-op for the zero and exact kinds.
    pub fn update(&mut self, s: &[f64], y: &[f64]) -> Result<()> {
        check_dim(self.n, s.len())?;
        check_dim(self.n, y.len())?;
        if !s.iter().chain(y).all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput { what: "secant pair" });
        }
        let ss = dot(s, s);
        let ys = dot(y, s);
        let admissible = ss > 0.0 && ys >= CURVATURE_TOL * ss && (ss / ys).is_finite();
        match self.kind {
            ModelKind::Zero | ModelKind::Exact => return Ok(()),
            ModelKind::Bb => {
                if admissible {
                    self.sigma = ss / ys;
                }
            }
            ModelKind::Lbfgs(m) => {
                if admissible {
                    self.sigma = ss / ys;
                    if self.pairs.len() == m {
                        self.pairs.pop_front();
                    }
                    self.pairs.push_back(Pair {
                        s: s.to_vec(),
                        y: y.to_vec(),
                        ys,
                        bs: vec![],
                        sbs: 0.0,
                    });
                    self.rebuild();
                }
            }
        }
        self.enforce_cap();
        Ok(())
    }

    /// Install the Hessian at the current iterate (exact kind only).
    pub fn set_exact(&mut self, h: DenseSym) -> Result<()> {
        check_dim(self.n, h.n)?;
        if !h.data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput { what: "hessian" });
        }
        if self.kind != ModelKind::Exact {
            return Err(Error::ConfigMismatch(format!(
                "set_exact on a {} model",
                self.kind
            )));
        }
        self.dense = Some(h);
        self.enforce_cap();
        Ok(())
    }

    /// Recompute the `B_{j-1} s_j` products of the unrolled BFGS form.
    fn rebuild(&mut self) {
        let n = self.n;
        for j in 0..self.pairs.len() {
            let mut bs = vec![0.0; n];
            self.apply_raw_prefix(&self.pairs[j].s, &mut bs, j);
            let sbs = dot(&self.pairs[j].s, &bs);
            let p = &mut self.pairs[j];
            p.bs = bs;
            p.sbs = sbs;
        }
        // drop pairs whose B_{j-1}-curvature vanished (cannot happen with σ > 0
        // in exact arithmetic, but guards the division below)
        self.pairs.retain(|p| p.sbs > 0.0 && p.sbs.is_finite());
    }

    /// `B v` using the base and the first `count` pairs, before capping.
    fn apply_raw_prefix(&self, v: &[f64], out: &mut [f64], count: usize) {
        for (o, vi) in out.iter_mut().zip(v) {
            *o = self.sigma * vi;
        }
        for p in self.pairs.iter().take(count) {
            let a = dot(&p.bs, v) / p.sbs;
            let b = dot(&p.y, v) / p.ys;
            for i in 0..out.len() {
                out[i] += b * p.y[i] - a * p.bs[i];
            }
        }
    }

    fn apply_raw(&self, v: &[f64], out: &mut [f64]) {
        match self.kind {
            ModelKind::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            ModelKind::Bb => {
                for (o, vi) in out.iter_mut().zip(v) {
                    *o = self.sigma * vi;
                }
            }
            ModelKind::Lbfgs(_) => self.apply_raw_prefix(v, out, self.pairs.len()),
            ModelKind::Exact => match &self.dense {
                Some(h) => h.apply_into(v, out),
                None => out.iter_mut().for_each(|o| *o = 0.0),
            },
        }
    }

    fn raw_dense(&self) -> DenseSym {
        let n = self.n;
        let mut m = DenseSym::zeros(n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply_raw(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                m.data[i * n + j] = col[i];
            }
        }
        // symmetrize rounding noise
        for i in 0..n {
            for j in 0..i {
                let a = 0.5 * (m.data[i * n + j] + m.data[j * n + i]);
                m.data[i * n + j] = a;
                m.data[j * n + i] = a;
            }
        }
        m
    }

    fn enforce_cap(&mut self) {
        let raw_norm = match self.kind {
            ModelKind::Zero => 0.0,
            ModelKind::Bb => self.sigma.abs(),
            ModelKind::Lbfgs(_) => {
                // B is positive semidefinite and each update adds at most ‖y‖²/yᵀs
                let bound = self.sigma.abs()
                    + self.pairs.iter().map(|p| dot(&p.y, &p.y) / p.ys).sum::<f64>();
                if bound <= self.kappa_b {
                    bound
                } else {
                    self.raw_dense().spectral_norm()
                }
            }
            ModelKind::Exact => self.dense.as_ref().map_or(0.0, |h| h.spectral_norm()),
        };
        if raw_norm > self.kappa_b {
            self.scale = self.kappa_b / raw_norm;
            self.norm = self.kappa_b;
        } else {
            self.scale = 1.0;
            self.norm = raw_norm;
        }
    }

    /// Dense copy of the capped operator.
    pub fn to_dense(&self) -> DenseSym {
        let mut m = self.raw_dense();
        m.scale(self.scale);
        m
    }
}

impl SymmetricOperator for HessianModel {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_into(&self, v: &[f64], out: &mut [f64]) {
        self.apply_raw(v, out);
        if self.scale != 1.0 {
            out.iter_mut().for_each(|o| *o *= self.scale);
        }
    }
}

/// Matrix-free product `B v` with a dimension check.
pub fn apply_model(model: &HessianModel, v: &[f64]) -> Result<Vec<f64>> {
    check_dim(model.n, v.len())?;
    Ok(model.apply(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::power_norm_estimate;
    use proptest::prelude::*;

    /// Dense BFGS update of the direct matrix, used as an oracle.
    fn dense_bfgs(b: &mut [f64], n: usize, s: &[f64], y: &[f64]) {
        let mut bs = vec![0.0; n];
        for i in 0..n {
            bs[i] = (0..n).map(|j| b[i * n + j] * s[j]).sum();
        }
        let sbs = dot(s, &bs);
        let ys = dot(y, s);
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] += y[i] * y[j] / ys - bs[i] * bs[j] / sbs;
            }
        }
    }

    #[test]
    fn bb_half_identity() {
        let mut m = HessianModel::new(ModelKind::Bb, 2, DEFAULT_KAPPA_B).unwrap();
        m.update(&[1.0, 0.0], &[2.0, 0.0]).unwrap();
        assert_eq!(m.apply(&[2.0, 4.0]), vec![1.0, 2.0]);
        assert_eq!(m.norm_bound(), 0.5);
    }

    #[test]
    fn bb_skips_flat_curvature() {
        let mut m = HessianModel::new(ModelKind::Bb, 2, DEFAULT_KAPPA_B).unwrap();
        m.update(&[1.0, 0.0], &[2.0, 0.0]).unwrap();
        m.update(&[1.0, 0.0], &[1e-20, 5.0]).unwrap();
        assert_eq!(m.apply(&[2.0, 4.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn zero_model_stays_zero() {
        let mut m = HessianModel::new(ModelKind::Zero, 2, DEFAULT_KAPPA_B).unwrap();
        m.update(&[1.0, 2.0], &[3.0, 1.0]).unwrap();
        assert_eq!(m.apply(&[5.0, -3.0]), vec![0.0, 0.0]);
        assert!(m.is_zero());
    }

    #[test]
    fn lbfgs_single_pair_matches_dense_oracle() {
        let mut m = HessianModel::new(ModelKind::Lbfgs(3), 2, DEFAULT_KAPPA_B).unwrap();
        m.update(&[1.0, 0.0], &[1.0, 0.0]).unwrap();
        let mut dense = vec![1.0, 0.0, 0.0, 1.0];
        dense_bfgs(&mut dense, 2, &[1.0, 0.0], &[1.0, 0.0]);
        let bv = m.apply(&[1.0, 0.0]);
        assert_eq!(bv, vec![1.0, 0.0]);
        assert_eq!(m.to_dense().data, dense);
    }

    #[test]
    fn cap_is_enforced() {
        let mut m = HessianModel::new(ModelKind::Bb, 2, 10.0).unwrap();
        m.update(&[1.0, 0.0], &[1e-3, 0.0]).unwrap();
        assert_eq!(m.norm_bound(), 10.0);
        assert!((m.apply(&[1.0, 0.0])[0] - 10.0).abs() < 1e-12);

        let mut e = HessianModel::new(ModelKind::Exact, 2, 10.0).unwrap();
        e.set_exact(DenseSym::from_diag(&[-40.0, 2.0])).unwrap();
        let d = e.to_dense();
        assert!((d.get(0, 0) + 10.0).abs() < 1e-12);
        assert!((d.get(1, 1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tags() {
        for (t, k) in [
            ("none", ModelKind::Zero),
            ("bb", ModelKind::Bb),
            ("lbfgs3", ModelKind::Lbfgs(3)),
            ("exact", ModelKind::Exact),
        ] {
            assert_eq!(t.parse::<ModelKind>().unwrap(), k);
            assert_eq!(k.tag(), t);
        }
        assert!("lbfgs0".parse::<ModelKind>().is_err());
        assert!("sr1".parse::<ModelKind>().is_err());
    }

    #[test]
    fn non_finite_pair_rejected() {
        let mut m = HessianModel::new(ModelKind::Bb, 1, DEFAULT_KAPPA_B).unwrap();
        assert!(matches!(m.update(&[f64::NAN], &[1.0]), Err(Error::NonFiniteInput { .. })));
        assert!(apply_model(&m, &[1.0, 2.0]).is_err());
    }

    fn pairs(n: usize) -> impl Strategy<Value = Vec<(Vec<f64>, Vec<f64>)>> {
        prop::collection::vec(
            (prop::collection::vec(-2.0..2.0f64, n), prop::collection::vec(-2.0..2.0f64, n)),
            1..7,
        )
    }

    proptest! {
        #[test]
        fn lbfgs_matches_dense_recursion(n in 1usize..=6, seed_pairs in pairs(6), probe in prop::collection::vec(-1.0..1.0f64, 6)) {
            let mut m = HessianModel::new(ModelKind::Lbfgs(3), n, 1e12).unwrap();
            let mut accepted: Vec<(Vec<f64>, Vec<f64>)> = vec![];
            for (s, y) in &seed_pairs {
                let (s, y) = (&s[..n], &y[..n]);
                // make the pair curvature-positive
                let y: Vec<f64> = y.iter().zip(s).map(|(a, b)| a + 3.0 * b).collect();
                m.update(s, &y).unwrap();
                let ss = dot(s, s);
                if ss > 0.0 && dot(&y, s) >= CURVATURE_TOL * ss {
                    accepted.push((s.to_vec(), y));
                    if accepted.len() > 3 {
                        accepted.remove(0);
                    }
                }
            }
            prop_assume!(!accepted.is_empty());
            let (ls, ly) = accepted.last().unwrap();
            let sigma = dot(ls, ls) / dot(ly, ls);
            let mut dense = vec![0.0; n * n];
            for i in 0..n {
                dense[i * n + i] = sigma;
            }
            for (s, y) in &accepted {
                dense_bfgs(&mut dense, n, s, y);
            }
            let v = &probe[..n];
            let bv = m.apply(v);
            let scale = dense.iter().fold(1.0_f64, |a, x| a.max(x.abs()));
            for i in 0..n {
                let want: f64 = (0..n).map(|j| dense[i * n + j] * v[j]).sum();
                prop_assert!((bv[i] - want).abs() <= 1e-10 * scale, "{} vs {}", bv[i], want);
            }
            // secant condition for the newest pair
            let bs = m.apply(ls);
            for i in 0..n {
                prop_assert!((bs[i] - ly[i]).abs() <= 1e-10 * crate::linalg::norm_inf(ly).max(1.0));
            }
        }

        #[test]
        fn symmetric_and_capped(seed_pairs in pairs(4), u in prop::collection::vec(-1.0..1.0f64, 4), v in prop::collection::vec(-1.0..1.0f64, 4), kind in 0usize..3) {
            let kind = [ModelKind::Bb, ModelKind::Lbfgs(3), ModelKind::Exact][kind];
            let mut m = HessianModel::new(kind, 4, 5.0).unwrap();
            for (s, y) in &seed_pairs {
                if kind == ModelKind::Exact {
                    let mut h = DenseSym::zeros(4);
                    for i in 0..4 {
                        for j in 0..4 {
                            h.data[i * 4 + j] = 10.0 * (s[i] * s[j] + y[i] * y[j]) - 3.0 * (i == j) as u8 as f64;
                        }
                    }
                    m.set_exact(h).unwrap();
                } else {
                    m.update(s, y).unwrap();
                }
                let a = dot(&u, &m.apply(&v));
                let b = dot(&v, &m.apply(&u));
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300) + 1e-14);
                let est = power_norm_estimate(&m, 30);
                prop_assert!(est <= 5.0 * (1.0 + 1e-8), "estimate {}", est);
            }
        }
    }
}
