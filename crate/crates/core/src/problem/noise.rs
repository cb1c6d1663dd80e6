use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Evaluation, Oracle, Problem, Want};
use crate::error::{Error, Result};

/// A problem whose oracle outputs carry relative Gaussian noise.
///
/// Every component `y` of a value, gradient or Hessian is returned as
/// `y·(1 + level·ξ)` with `ξ ~ N(0, 1)`. The draws come from a stream keyed
/// by the seed, the exact bits of the query point and the quantity, and are
/// consumed in component order. Querying the same point twice therefore
/// returns identical outputs, and the wrapper holds no mutable state.
#[derive(Debug, Clone)]
pub struct NoisyProblem {
    pub base: Problem,
    pub level: f64,
    pub seed: u64,
}

/// Wrap `problem` with relative noise of magnitude `level`.
pub fn with_noise(problem: Problem, level: f64, seed: u64) -> Result<NoisyProblem> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level {level} must be >= 0")));
    }
    Ok(NoisyProblem { base: problem, level, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Quantity {
    Value = 1,
    Gradient = 2,
    Hessian = 3,
}

pub(crate) fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn stream_key(seed: u64, x: &[f64], quantity: Quantity) -> u64 {
    let mut h = splitmix64(seed ^ (quantity as u64).rotate_left(56));
    for xi in x {
        h = splitmix64(h ^ xi.to_bits());
    }
    h
}

/// The first `count` standard-normal draws of the stream for `(seed, x, quantity)`.
pub fn noise_draws(seed: u64, x: &[f64], quantity: Quantity, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_key(seed, x, quantity));
    (0..count).map(|_| StandardNormal.sample(&mut rng)).collect()
}

impl Oracle for NoisyProblem {
    fn name(&self) -> &str {
        &self.base.name
    }

    fn dim(&self) -> usize {
        self.base.n()
    }

    fn x0(&self) -> &[f64] {
        &self.base.x0
    }

    fn evaluate(&self, x: &[f64], want: Want) -> Result<Evaluation> {
        let mut ev = self.base.evaluate(x, want)?;
        if self.level == 0.0 {
            return Ok(ev);
        }
        let level = self.level;
        if let Some(f) = ev.value.as_mut() {
            let xi = noise_draws(self.seed, x, Quantity::Value, 1)[0];
            *f *= 1.0 + level * xi;
        }
        if let Some(g) = ev.gradient.as_mut() {
            let xi = noise_draws(self.seed, x, Quantity::Gradient, g.len());
            for (gi, e) in g.iter_mut().zip(xi) {
                *gi *= 1.0 + level * e;
            }
        }
        if let Some(h) = ev.hessian.as_mut() {
            // upper triangle drawn row by row, mirrored to keep symmetry
            let n = h.n;
            let xi = noise_draws(self.seed, x, Quantity::Hessian, n * (n + 1) / 2);
            let mut t = 0;
            for i in 0..n {
                for j in i..n {
                    let v = h.data[i * n + j] * (1.0 + level * xi[t]);
                    h.data[i * n + j] = v;
                    h.data[j * n + i] = v;
                    t += 1;
                }
            }
        }
        Ok(ev)
    }
}
