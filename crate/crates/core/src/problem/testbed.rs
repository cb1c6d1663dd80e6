//! Diagonal convex quadratics used to check the complexity bounds.

use std::sync::Arc;

use super::{Objective, Problem};

/// `f(x) = ½ Σ λ_i x_i²`.
#[derive(Debug, Clone)]
pub struct DiagonalQuadratic {
    pub lambda: Vec<f64>,
}

impl Objective for DiagonalQuadratic {
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().zip(&self.lambda).map(|(v, l)| l * v * v).sum::<f64>()
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        for ((gi, xi), li) in g.iter_mut().zip(x).zip(&self.lambda) {
            *gi = li * xi;
        }
    }

    fn hessian(&self, _x: &[f64], h: &mut [f64]) {
        let n = self.lambda.len();
        h.iter_mut().for_each(|v| *v = 0.0);
        for (i, li) in self.lambda.iter().enumerate() {
            h[i * n + i] = *li;
        }
    }
}

/// Eigenvalues equally spaced in `[0.1, 1]` (a single value of 1 when `n = 1`).
pub fn testbed_spectrum(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let t = |i: usize| i as f64 / (n - 1) as f64;
    (0..n).map(|i| 0.1 * (1.0 - t(i)) + t(i)).collect()
}

/// Quadratic with the standard spectrum, started at `x0` (all ones when `None`).
///
/// Its gradient is 1-Lipschitz and its minimum value is zero.
pub fn quadratic_testbed(n: usize, x0: Option<Vec<f64>>) -> Problem {
    let lambda = testbed_spectrum(n);
    let x0 = x0.unwrap_or_else(|| vec![1.0; n]);
    Problem::new(format!("quad{n}"), x0, Arc::new(DiagonalQuadratic { lambda }))
        .with_reference(0.0, super::Provenance::Literature)
}

/// A start with alternating signs and growing magnitudes, `±3(1 + i)`.
pub fn spread_start(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i % 2 == 0 { 3.0 } else { -3.0 } * (1.0 + i as f64))
        .collect()
}

/// Separable quadratic with given curvatures.
pub fn diagonal_quadratic(lambda: Vec<f64>, x0: Vec<f64>) -> Problem {
    Problem::new(
        format!("diag{}", lambda.len()),
        x0,
        Arc::new(DiagonalQuadratic { lambda }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Oracle;

    #[test]
    fn spectrum_endpoints() {
        let s = testbed_spectrum(10);
        assert_eq!(s[0], 0.1);
        assert_eq!(s[9], 1.0);
        assert_eq!(testbed_spectrum(1), vec![1.0]);
    }

    #[test]
    fn value_at_ones() {
        let p = quadratic_testbed(2, None);
        // ½(0.1 + 1)
        assert!((p.value(&[1.0, 1.0]).unwrap() - 0.55).abs() < 1e-15);
    }
}
