//! Scaling factors `w_{i,k}` that turn gradients into trust-region radii.
//!
//! All rules share one interface: feed the gradient of iteration `k`, get the
//! positive vector `w_k`. The `-comp` kinds keep one accumulator per
//! coordinate, the `-agg` kinds share a scalar built from `‖g‖₂`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::norm2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingKind {
    AdagradAgg,
    AdagradComp,
    EwmaAgg,
    EwmaComp,
    MaxgAgg,
    MaxgComp,
}

impl ScalingKind {
    pub const ALL: [ScalingKind; 6] = [
        ScalingKind::AdagradAgg,
        ScalingKind::AdagradComp,
        ScalingKind::EwmaAgg,
        ScalingKind::EwmaComp,
        ScalingKind::MaxgAgg,
        ScalingKind::MaxgComp,
    ];

    pub fn is_componentwise(self) -> bool {
        matches!(self, Self::AdagradComp | Self::EwmaComp | Self::MaxgComp)
    }

    pub fn is_maxg(self) -> bool {
        matches!(self, Self::MaxgAgg | Self::MaxgComp)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::AdagradAgg => "adagrad-agg",
            Self::AdagradComp => "adagrad-comp",
            Self::EwmaAgg => "ewma-agg",
            Self::EwmaComp => "ewma-comp",
            Self::MaxgAgg => "maxg-agg",
            Self::MaxgComp => "maxg-comp",
        }
    }
}

impl fmt::Display for ScalingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScalingKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// A scaling rule with its parameters.
///
/// `nu` is only read by the maxg kinds and `beta2` only by the ewma kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingStrategy {
    pub kind: ScalingKind,
    pub mu: f64,
    pub nu: f64,
    pub varsigma: f64,
    pub vartheta: f64,
    pub beta2: f64,
}

impl ScalingStrategy {
    /// Default parameters: `ς = 0.01`, `ϑ = 1`, `β₂ = 0.9`, `μ = ½` for the
    /// adagrad and ewma kinds, `μ = ν = 0.1` for the maxg kinds.
    pub fn new(kind: ScalingKind) -> Self {
        let (mu, nu) = if kind.is_maxg() { (0.1, 0.1) } else { (0.5, 0.5) };
        Self { kind, mu, nu, varsigma: 0.01, vartheta: 1.0, beta2: 0.9 }
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v}")));
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return bad("mu must lie in (0,1), got mu", self.mu);
        }
        if !(self.varsigma > 0.0 && self.varsigma <= 1.0) {
            return bad("varsigma must lie in (0,1], got varsigma", self.varsigma);
        }
        if !(self.vartheta > 0.0 && self.vartheta <= 1.0) {
            return bad("vartheta must lie in (0,1], got vartheta", self.vartheta);
        }
        if self.kind.is_maxg() && !(self.nu > 0.0 && self.nu <= self.mu) {
            return bad("nu must satisfy 0 < nu <= mu, got nu", self.nu);
        }
        if matches!(self.kind, ScalingKind::EwmaAgg | ScalingKind::EwmaComp)
            && !(self.beta2 > 0.0 && self.beta2 < 1.0)
        {
            return bad("beta2 must lie in (0,1), got beta2", self.beta2);
        }
        Ok(())
    }

    /// Guaranteed lower bound on every `w_{i,k}`.
    pub fn floor(&self, k: usize) -> f64 {
        if self.kind.is_maxg() {
            self.varsigma * ((k + 1) as f64).powf(self.nu)
        } else {
            self.varsigma.powf(self.mu) * self.vartheta.sqrt()
        }
    }

    /// The iteration-independent floor `ς_min` used in the decrease lemma.
    pub fn varsigma_min(&self) -> f64 {
        self.floor(0)
    }
}

/// Accumulators of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingState {
    pub strategy: ScalingStrategy,
    pub n: usize,
    /// Index expected by the next update.
    pub k: usize,
    /// Per-coordinate sums of squares, discounted sums or running maxima.
    pub acc: Vec<f64>,
    /// Shared scalar accumulator of the aggregated kinds.
    pub agg: f64,
}

impl ScalingState {
    pub fn new(strategy: ScalingStrategy, n: usize) -> Result<Self> {
        strategy.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let start = if strategy.kind.is_maxg() { strategy.varsigma } else { 0.0 };
        let acc = if strategy.kind.is_componentwise() { vec![start; n] } else { vec![] };
        Ok(Self { strategy, n, k: 0, acc, agg: start })
    }

    /// Absorb `g_k` and return `w_k`.
    pub fn update(&mut self, g: &[f64], k: usize) -> Result<Vec<f64>> {
        check_dim(self.n, g.len())?;
        if !g.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteInput { what: "gradient" });
        }
        if k != self.k {
            return Err(Error::InvalidParameter(format!(
                "scaling updates must be consecutive: expected k = {}, got {k}",
                self.k
            )));
        }
        let s = self.strategy;
        let n = g.len();
        let w = match s.kind {
            ScalingKind::AdagradComp => {
                for (a, gi) in self.acc.iter_mut().zip(g) {
                    *a += gi * gi;
                }
                self.acc.iter().map(|a| (s.varsigma + a).powf(s.mu)).collect()
            }
            ScalingKind::EwmaComp => {
                for (a, gi) in self.acc.iter_mut().zip(g) {
                    *a = s.beta2 * *a + gi * gi;
                }
                self.acc.iter().map(|a| (s.varsigma + a).powf(s.mu)).collect()
            }
            ScalingKind::MaxgComp => {
                let growth = ((k + 1) as f64).powf(s.nu);
                for (a, gi) in self.acc.iter_mut().zip(g) {
                    *a = a.max(gi.abs());
                }
                self.acc.iter().map(|a| growth * a).collect()
            }
            ScalingKind::AdagradAgg => {
                let g2: f64 = g.iter().map(|v| v * v).sum();
                self.agg += g2;
                vec![(s.varsigma + self.agg).powf(s.mu); n]
            }
            ScalingKind::EwmaAgg => {
                let g2: f64 = g.iter().map(|v| v * v).sum();
                self.agg = s.beta2 * self.agg + g2;
                vec![(s.varsigma + self.agg).powf(s.mu); n]
            }
            ScalingKind::MaxgAgg => {
                self.agg = self.agg.max(norm2(g));
                vec![((k + 1) as f64).powf(s.nu) * self.agg; n]
            }
        };
        self.k += 1;
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn adagrad_comp_first_step() {
        let mut st = ScalingState::new(ScalingStrategy::new(ScalingKind::AdagradComp), 2).unwrap();
        let w = st.update(&[3.0, 0.0], 0).unwrap();
        assert!((w[0] - 9.01_f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 3.0016662).abs() < 1e-7);
        assert!((w[1] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn init_states() {
        let st = ScalingState::new(ScalingStrategy::new(ScalingKind::AdagradComp), 3).unwrap();
        assert_eq!(st.acc, vec![0.0; 3]);
        assert_eq!(st.k, 0);
        let st = ScalingState::new(ScalingStrategy::new(ScalingKind::MaxgComp), 2).unwrap();
        assert_eq!(st.acc, vec![0.01; 2]);
    }

    #[test]
    fn invalid_parameters() {
        let mut s = ScalingStrategy::new(ScalingKind::EwmaAgg);
        s.beta2 = 1.2;
        assert!(matches!(ScalingState::new(s, 2), Err(Error::InvalidParameter(_))));
        let s = ScalingStrategy::new(ScalingKind::MaxgComp).with_nu(0.2);
        assert!(ScalingState::new(s, 2).is_err());
        let s = ScalingStrategy::new(ScalingKind::AdagradComp).with_mu(1.0);
        assert!(ScalingState::new(s, 2).is_err());
    }

    #[test]
    fn zero_gradients_sit_on_floor() {
        let mut st = ScalingState::new(ScalingStrategy::new(ScalingKind::AdagradComp), 2).unwrap();
        for k in 0..5 {
            let w = st.update(&[0.0, 0.0], k).unwrap();
            assert!(w.iter().all(|&v| (v - 0.1).abs() < 1e-15));
        }
    }

    #[test]
    fn maxg_comp_history() {
        let mut st = ScalingState::new(ScalingStrategy::new(ScalingKind::MaxgComp), 2).unwrap();
        st.update(&[2.0, 0.005], 0).unwrap();
        let w = st.update(&[1.0, -0.001], 1).unwrap();
        let c = 2f64.powf(0.1);
        assert!((c - 1.0717735).abs() < 1e-7);
        assert!((w[0] - 2.1435469).abs() < 1e-7);
        assert!((w[1] - 0.010717735).abs() < 1e-9);
    }

    #[test]
    fn errors() {
        let mut st = ScalingState::new(ScalingStrategy::new(ScalingKind::EwmaComp), 2).unwrap();
        assert!(matches!(
            st.update(&[1.0], 0),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(matches!(
            st.update(&[f64::NAN, 1.0], 0),
            Err(Error::NonFiniteInput { .. })
        ));
        assert!(st.update(&[1.0, 1.0], 3).is_err());
    }

    #[test]
    fn tags_round_trip() {
        for k in ScalingKind::ALL {
            assert_eq!(k.as_str().parse::<ScalingKind>().unwrap(), k);
        }
        assert!("adam".parse::<ScalingKind>().is_err());
    }

    fn gradients() -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(-50.0..50.0f64, 4), 1..20)
    }

    proptest! {
        #[test]
        fn floors_hold(gs in gradients(), kind in 0usize..6) {
            let strategy = ScalingStrategy::new(ScalingKind::ALL[kind]);
            let mut st = ScalingState::new(strategy, 4).unwrap();
            for (k, g) in gs.iter().enumerate() {
                let w = st.update(g, k).unwrap();
                for wi in w {
                    prop_assert!(wi >= strategy.floor(k) * (1.0 - 1e-15));
                }
            }
        }

        #[test]
        fn adagrad_upper_sandwich_and_monotone(gs in gradients()) {
            let strategy = ScalingStrategy::new(ScalingKind::AdagradComp);
            let mut st = ScalingState::new(strategy, 4).unwrap();
            let mut total = 0.0;
            let mut prev = st.acc.clone();
            for (k, g) in gs.iter().enumerate() {
                total += g.iter().map(|v| v * v).sum::<f64>();
                let w = st.update(g, k).unwrap();
                for wi in w {
                    prop_assert!(wi <= (0.01 + total).sqrt() * (1.0 + 1e-14));
                }
                for (a, b) in st.acc.iter().zip(&prev) {
                    prop_assert!(a >= b);
                }
                prev = st.acc.clone();
            }
        }

        #[test]
        fn maxg_upper_sandwich(gs in gradients(), comp in any::<bool>()) {
            let kind = if comp { ScalingKind::MaxgComp } else { ScalingKind::MaxgAgg };
            let strategy = ScalingStrategy::new(kind);
            let kappa_g = gs
                .iter()
                .map(|g| if comp { crate::linalg::norm_inf(g) } else { norm2(g) })
                .fold(strategy.varsigma, f64::max);
            let mut st = ScalingState::new(strategy, 4).unwrap();
            for (k, g) in gs.iter().enumerate() {
                let w = st.update(g, k).unwrap();
                for wi in w {
                    prop_assert!(wi <= kappa_g * ((k + 1) as f64).powf(strategy.mu) * (1.0 + 1e-14));
                }
            }
        }

        #[test]
        fn permutation_equivariance(gs in gradients(), kind in 0usize..6, rot in 0usize..4) {
            let strategy = ScalingStrategy::new(ScalingKind::ALL[kind]);
            let mut a = ScalingState::new(strategy, 4).unwrap();
            let mut b = ScalingState::new(strategy, 4).unwrap();
            for (k, g) in gs.iter().enumerate() {
                let mut pg = g.clone();
                pg.rotate_left(rot);
                let wa = a.update(g, k).unwrap();
                let mut wb = b.update(&pg, k).unwrap();
                wb.rotate_right(rot);
                for (x, y) in wa.iter().zip(&wb) {
                    prop_assert!((x - y).abs() <= 1e-12 * x.abs());
                }
            }
        }
    }
}
