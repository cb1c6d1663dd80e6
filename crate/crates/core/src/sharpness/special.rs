//! Riemann zeta on `(1, ∞)` and the lower real branch of the Lambert function.

use crate::error::{Error, Result};

// B_2, B_4, ..., B_16
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// `ζ(s)` for real `s > 1`: a partial sum followed by an Euler–Maclaurin tail.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::OutOfDomain(format!("zeta needs s > 1, got {s}")));
    }
    const N: usize = 20;
    let nf = N as f64;
    // sum small terms first
    let head: f64 = (1..N).rev().map(|k| (k as f64).powf(-s)).sum();
    let mut tail = nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s);
    // rising factorial s(s+1)…(s+2j−2) / (2j)!
    let mut coef = s / 2.0;
    let mut npow = nf.powf(-s - 1.0);
    for (j, b) in BERNOULLI.iter().enumerate() {
        if j > 0 {
            let m = 2.0 * j as f64;
            coef *= (s + m - 1.0) * (s + m) / ((m + 1.0) * (m + 2.0));
            npow /= nf * nf;
        }
        tail += b * coef * npow;
    }
    Ok(head + tail)
}

/// Lower branch `W₋₁(y)` of the Lambert function for `y ∈ [−1/e, 0)`.
///
/// Solves `w + ln(−w) = ln(−y)` for `w ≤ −1` by Newton steps kept inside a
/// shrinking bracket, falling back to bisection.
pub fn lambert_wm1(y: f64) -> Result<f64> {
    let branch = -(-1.0_f64).exp();
    if !(y < 0.0 && y >= branch) {
        return Err(Error::OutOfDomain(format!("W_-1 needs y in [-1/e, 0), got {y}")));
    }
    if y == branch {
        return Ok(-1.0);
    }
    let target = (-y).ln();
    // h is decreasing on (−∞, −1]: h(−1) = −1 − target ≥ 0 and h → −∞ below
    let h = |w: f64| w + (-w).ln() - target;
    let mut hi = -1.0;
    let mut lo = -51.0;
    while h(lo) > 0.0 {
        lo *= 2.0;
    }
    let mut w = if target < -2.0 {
        target - (-target).ln()
    } else {
        // expansion about the branch point
        -1.0 - (2.0 * (1.0 - (1.0 + target).exp()).max(0.0)).sqrt()
    };
    if !(w > lo && w < hi) {
        w = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let hw = h(w);
        if hw == 0.0 {
            break;
        }
        if hw > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let dh = 1.0 + 1.0 / w;
        let mut next = w - hw / dh;
        if !(next > lo && next < hi) || dh == 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}
