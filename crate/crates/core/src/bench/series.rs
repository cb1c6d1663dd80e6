//! Randomized checks of the summation bounds behind the complexity results.
//!
//! For `a_j ≥ 0`, `ξ > 0` and `b_j ≥ b_{j−1} + a_j` (with `b_{−1} = 0`):
//! `Σ a_j/(ξ+b_j)^α ≤ ((ξ+b_k)^{1−α} − ξ^{1−α})/(1−α)` for `α ≠ 1`,
//! `≤ log((ξ+b_k)/ξ)` for `α = 1`, and the two cruder corollaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesForm {
    /// The bound for `α ≠ 1`.
    General(f64),
    /// The logarithmic bound for `α = 1`.
    Log,
    /// `(ξ+b_k)^{1−α}/(1−α)` for `α < 1`.
    BelowOne(f64),
    /// `ξ^{1−α}/(α−1)` for `α > 1`.
    AboveOne(f64),
}

impl SeriesForm {
    fn alpha(self) -> f64 {
        match self {
            SeriesForm::General(a) | SeriesForm::BelowOne(a) | SeriesForm::AboveOne(a) => a,
            SeriesForm::Log => 1.0,
        }
    }

    /// Right-hand side for final partial sum `b_k`.
    pub fn bound(self, xi: f64, b_k: f64) -> f64 {
        let a = self.alpha();
        match self {
            // ξ^{1−α}·expm1((1−α)·log1p(b/ξ)) avoids cancellation for small b
            SeriesForm::General(_) => {
                xi.powf(1.0 - a) * ((1.0 - a) * (b_k / xi).ln_1p()).exp_m1() / (1.0 - a)
            }
            SeriesForm::Log => (b_k / xi).ln_1p(),
            SeriesForm::BelowOne(_) => (xi + b_k).powf(1.0 - a) / (1.0 - a),
            SeriesForm::AboveOne(_) => xi.powf(1.0 - a) / (a - 1.0),
        }
    }
}

/// Whether `Σ a_j/(ξ+b_j)^α` respects `form` within `rel_slack`.
pub fn series_bounds_hold(a: &[f64], b: &[f64], xi: f64, form: SeriesForm, rel_slack: f64) -> bool {
    let alpha = form.alpha();
    let lhs: f64 = a.iter().zip(b).map(|(aj, bj)| aj / (xi + bj).powf(alpha)).sum();
    let rhs = form.bound(xi, b.last().copied().unwrap_or(0.0));
    lhs <= rhs + rel_slack * rhs.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SeriesReport {
    pub sequences: usize,
    pub checks: usize,
    pub violations: usize,
}

/// Draw `count` random sequences (length at most `max_len`) and test the
/// bounds for `α ∈ {0.3, 1.7}`, `α = 1` and both corollaries.
pub fn series_check(count: usize, max_len: usize, seed: u64) -> SeriesReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SeriesReport::default();
    let forms = [
        SeriesForm::General(0.3),
        SeriesForm::General(1.7),
        SeriesForm::Log,
        SeriesForm::BelowOne(0.3),
        SeriesForm::AboveOne(1.7),
    ];
    for i in 0..count {
        let len = rng.random_range(1..=max_len.max(1));
        let xi = if i % 2 == 0 { 0.01 } else { 1.0 };
        let mut a = Vec::with_capacity(len);
        let mut b = Vec::with_capacity(len);
        let mut acc = 0.0;
        for _ in 0..len {
            let aj = if rng.random_bool(0.1) { 0.0 } else { 10f64.powf(rng.random_range(-3.0..3.0)) };
            // b_j may exceed the plain partial sum
            let extra = if rng.random_bool(0.2) { rng.random_range(0.0..1.0) } else { 0.0 };
            acc += aj + extra;
            a.push(aj);
            b.push(acc);
        }
        rep.sequences += 1;
        for form in forms {
            rep.checks += 1;
            if !series_bounds_hold(&a, &b, xi, form, 1e-12) {
                rep.violations += 1;
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_log_bound() {
        // a/(ξ+a) ≤ log(1 + a/ξ)
        assert!(series_bounds_hold(&[1.0], &[1.0], 1.0, SeriesForm::Log, 0.0));
        assert!((SeriesForm::Log.bound(1.0, 1.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn general_bound_matches_direct_formula() {
        let direct = (1.0f64 + 3.0).powf(0.7) / 0.7 - 1.0 / 0.7;
        assert!((SeriesForm::General(0.3).bound(1.0, 3.0) - direct).abs() < 1e-14);
    }

    #[test]
    fn general_bound_tends_to_log() {
        let near = SeriesForm::General(1.0 + 1e-7).bound(0.5, 2.0);
        assert!((near - SeriesForm::Log.bound(0.5, 2.0)).abs() < 1e-6);
    }

    #[test]
    fn violated_when_sum_exceeds_bound() {
        // b smaller than the partial sums breaks the hypothesis
        assert!(!series_bounds_hold(&[10.0, 10.0], &[0.0, 0.0], 1.0, SeriesForm::Log, 1e-12));
    }

    #[test]
    fn random_suite_holds() {
        let rep = series_check(200, 200, 1);
        assert_eq!(rep.checks, 1000);
        assert_eq!(rep.violations, 0);
    }
}
