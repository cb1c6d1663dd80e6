//! The benchmark subset: low-dimensional unconstrained problems at their
//! customary dimensions and standard starting points.
//!
//! Least-squares problems are written as residuals plus Jacobian; the rest
//! carry hand-coded gradients. Hessians are analytic for the quadratics and
//! central differences of the gradient otherwise.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FnObjective, Objective, Problem, Provenance, SumOfSquares};
use crate::error::{Error, Result};

use Provenance::{Literature, ReferenceRun};

/// Names of every problem in the implemented subset, in registry order.
pub const SUITE_NAMES: &[&str] = &[
    "arglina", "argtrig", "arwhead", "bard", "beale", "biggs6", "booth", "box3", "brownal",
    "brownbs", "brownden", "broyden3d", "broydenbd", "chebyqad", "cliff", "cosine", "cube",
    "dixmaana", "dixmaanb", "dixmaanc", "dixmaand", "dixmaane", "dixmaanf", "dixmaang",
    "dixmaanh", "dixmaani", "dixmaanj", "dixmaank", "dixmaanl", "dqartic", "edensch", "eg2",
    "engval1", "engval2", "expfit", "gottfr", "helix", "hilbert", "integreq", "jensmp",
    "kowosb", "meyer3", "morebv", "nondquar", "osbornea", "osborneb", "penalty1", "penalty2",
    "powellbs", "powellsg", "rosenbr", "schmvett", "sisser", "tridia", "vardim", "watson",
    "woods", "zangwill2",
];

/// Load the named problems, or the whole subset when `names` is `None`.
pub fn load_suite(names: Option<&[&str]>) -> Result<Vec<Problem>> {
    match names {
        None => SUITE_NAMES.iter().map(|n| build(n)).collect(),
        Some(list) => list.iter().map(|n| build(n)).collect(),
    }
}

/// One row of the versioned registry manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub n: usize,
    pub x0: Vec<f64>,
    pub f_ref: Option<f64>,
    pub provenance: Option<Provenance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub problems: Vec<ManifestEntry>,
}

pub const MANIFEST_VERSION: u32 = 1;

pub fn manifest(problems: &[Problem]) -> Manifest {
    Manifest {
        version: MANIFEST_VERSION,
        problems: problems
            .iter()
            .map(|p| ManifestEntry {
                name: p.name.clone(),
                n: p.n(),
                x0: p.x0.clone(),
                f_ref: p.f_ref,
                provenance: p.f_ref_provenance,
            })
            .collect(),
    }
}

fn ls(
    name: &str,
    x0: Vec<f64>,
    m: fn(usize) -> usize,
    residuals: fn(&[f64], &mut [f64]),
    jacobian: fn(&[f64], &mut [f64]),
) -> Problem {
    Problem::new(name, x0, Arc::new(SumOfSquares { m, residuals, jacobian }))
}

fn smooth(
    name: &str,
    x0: Vec<f64>,
    value: fn(&[f64]) -> f64,
    gradient: fn(&[f64], &mut [f64]),
    hessian: Option<fn(&[f64], &mut [f64])>,
) -> Problem {
    Problem::new(name, x0, Arc::new(FnObjective { value, gradient, hessian }))
}

fn build(name: &str) -> Result<Problem> {
    let p = match name {
        "arglina" => ls("arglina", vec![1.0; 10], |n| 2 * n, arglina_r, arglina_j)
            .with_reference(10.0, Literature),
        "argtrig" => ls("argtrig", vec![0.1; 10], |n| n, argtrig_r, argtrig_j)
            .with_reference(0.0, Literature),
        "arwhead" => smooth("arwhead", vec![1.0; 10], arwhead_f, arwhead_g, None)
            .with_reference(0.0, Literature),
        "bard" => ls("bard", vec![1.0; 3], |_| 15, bard_r, bard_j)
            .with_reference(8.214877306578963e-3, Literature),
        "beale" => ls("beale", vec![1.0, 1.0], |_| 3, beale_r, beale_j)
            .with_reference(0.0, Literature),
        "biggs6" => ls("biggs6", vec![1.0, 2.0, 1.0, 1.0, 1.0, 1.0], |_| 13, biggs6_r, biggs6_j)
            .with_reference(0.0, Literature),
        "booth" => ls("booth", vec![0.0, 0.0], |_| 2, booth_r, booth_j)
            .with_reference(0.0, Literature),
        "box3" => ls("box3", vec![0.0, 10.0, 20.0], |_| 10, box3_r, box3_j)
            .with_reference(0.0, Literature),
        "brownal" => ls("brownal", vec![0.5; 10], |n| n, brownal_r, brownal_j)
            .with_reference(0.0, Literature),
        "brownbs" => ls("brownbs", vec![1.0, 1.0], |_| 3, brownbs_r, brownbs_j)
            .with_reference(0.0, Literature),
        "brownden" => ls("brownden", vec![25.0, 5.0, -5.0, -1.0], |_| 20, brownden_r, brownden_j)
            .with_reference(85822.20162635628, Literature),
        "broyden3d" => ls("broyden3d", vec![-1.0; 10], |n| n, broyden3d_r, broyden3d_j)
            .with_reference(0.0, Literature),
        "broydenbd" => ls("broydenbd", vec![-1.0; 10], |n| n, broydenbd_r, broydenbd_j)
            .with_reference(0.0, Literature),
        "chebyqad" => ls(
            "chebyqad",
            (1..=10).map(|j| j as f64 / 11.0).collect(),
            |n| n,
            chebyqad_r,
            chebyqad_j,
        )
        .with_reference(6.503954800882502e-3, ReferenceRun),
        "cliff" => smooth("cliff", vec![0.0, -1.0], cliff_f, cliff_g, None)
            .with_reference(cliff_fstar(), Literature),
        "cosine" => smooth("cosine", vec![1.0; 10], cosine_f, cosine_g, None)
            .with_reference(-9.0, Literature),
        "cube" => ls("cube", vec![-1.2, 1.0], |_| 2, cube_r, cube_j)
            .with_reference(0.0, Literature),
        d if d.starts_with("dixmaan") && d.len() == 8 => dixmaan(d)?,
        "dqartic" => smooth("dqartic", vec![2.0; 10], dqartic_f, dqartic_g, Some(dqartic_h))
            .with_reference(0.0, Literature),
        "edensch" => smooth("edensch", vec![0.0; 10], edensch_f, edensch_g, None)
            .with_reference(63.28460010526341, ReferenceRun),
        "eg2" => smooth("eg2", vec![0.0; 10], eg2_f, eg2_g, None)
            .with_reference(-9.5, Literature),
        "engval1" => smooth("engval1", vec![2.0; 10], engval1_f, engval1_g, None)
            .with_reference(9.177469957181389, ReferenceRun),
        "engval2" => ls("engval2", vec![1.0, 2.0, 0.0], |_| 5, engval2_r, engval2_j)
            .with_reference(0.0, Literature),
        "expfit" => ls("expfit", vec![0.0, 0.0], |_| 10, expfit_r, expfit_j)
            .with_reference(0.24051059399905808, ReferenceRun),
        "gottfr" => ls("gottfr", vec![0.5, 0.5], |_| 2, gottfr_r, gottfr_j)
            .with_reference(0.0, Literature),
        "helix" => ls("helix", vec![-1.0, 0.0, 0.0], |_| 3, helix_r, helix_j)
            .with_reference(0.0, Literature),
        "hilbert" => smooth("hilbert", vec![-3.0; 10], hilbert_f, hilbert_g, Some(hilbert_h))
            .with_reference(0.0, Literature),
        "integreq" => ls("integreq", bv_start(10), |n| n, integreq_r, integreq_j)
            .with_reference(0.0, Literature),
        "jensmp" => ls("jensmp", vec![0.3, 0.4], |_| 10, jensmp_r, jensmp_j)
            .with_reference(124.36218235561489, Literature),
        "kowosb" => ls("kowosb", vec![0.25, 0.39, 0.415, 0.39], |_| 11, kowosb_r, kowosb_j)
            .with_reference(3.0750560385086e-4, Literature),
        "meyer3" => ls("meyer3", vec![0.02, 4000.0, 250.0], |_| 16, meyer3_r, meyer3_j)
            .with_reference(87.9458551704, Literature),
        "morebv" => ls("morebv", bv_start(12), |n| n, morebv_r, morebv_j)
            .with_reference(0.0, Literature),
        "nondquar" => smooth(
            "nondquar",
            (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            nondquar_f,
            nondquar_g,
            None,
        )
        .with_reference(0.0, Literature),
        "osbornea" => ls("osbornea", vec![0.5, 1.5, -1.0, 0.01, 0.02], |_| 33, osbornea_r, osbornea_j)
            .with_reference(5.464894697482e-5, Literature),
        "osborneb" => ls(
            "osborneb",
            vec![1.3, 0.65, 0.65, 0.7, 0.6, 3.0, 5.0, 7.0, 2.0, 4.5, 5.5],
            |_| 65,
            osborneb_r,
            osborneb_j,
        )
        .with_reference(4.013773629354e-2, Literature),
        "penalty1" => ls("penalty1", (1..=10).map(|j| j as f64).collect(), |n| n + 1, penalty1_r, penalty1_j)
            .with_reference(7.087651467090e-5, Literature),
        "penalty2" => ls("penalty2", vec![0.5; 10], |n| 2 * n, penalty2_r, penalty2_j)
            .with_reference(2.936605374e-4, Literature),
        "powellbs" => ls("powellbs", vec![0.0, 1.0], |_| 2, powellbs_r, powellbs_j)
            .with_reference(0.0, Literature),
        "powellsg" => ls(
            "powellsg",
            (0..12).map(|i| [3.0, -1.0, 0.0, 1.0][i % 4]).collect(),
            |n| n,
            powellsg_r,
            powellsg_j,
        )
        .with_reference(0.0, Literature),
        "rosenbr" => ls(
            "rosenbr",
            (0..10).map(|i| if i % 2 == 0 { -1.2 } else { 1.0 }).collect(),
            |n| 2 * (n - 1),
            rosenbr_r,
            rosenbr_j,
        )
        .with_reference(0.0, Literature),
        "schmvett" => smooth("schmvett", vec![0.5; 3], schmvett_f, schmvett_g, None)
            .with_reference(-3.0, Literature),
        "sisser" => smooth("sisser", vec![1.0, 0.1], sisser_f, sisser_g, None)
            .with_reference(0.0, Literature),
        "tridia" => ls("tridia", vec![1.0; 10], |n| n, tridia_r, tridia_j)
            .with_reference(0.0, Literature),
        "vardim" => ls("vardim", (1..=10).map(|j| 1.0 - j as f64 / 10.0).collect(), |n| n + 2, vardim_r, vardim_j)
            .with_reference(0.0, Literature),
        "watson" => ls("watson", vec![0.0; 12], |_| 31, watson_r, watson_j)
            .with_reference(4.72238e-10, Literature),
        "woods" => ls(
            "woods",
            (0..12).map(|i| if i % 2 == 0 { -3.0 } else { -1.0 }).collect(),
            |n| 6 * (n / 4),
            woods_r,
            woods_j,
        )
        .with_reference(0.0, Literature),
        "zangwill2" => smooth("zangwill2", vec![3.0, 8.0], zangwill2_f, zangwill2_g, Some(zangwill2_h))
            .with_reference(-18.2, Literature),
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    Ok(p)
}

// ----------------------------------------------------------------------------
// least-squares problems

fn arglina_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let m = 2 * n;
    let s: f64 = x.iter().sum();
    for (i, ri) in r.iter_mut().enumerate() {
        let xi = if i < n { x[i] } else { 0.0 };
        *ri = xi - 2.0 * s / m as f64 - 1.0;
    }
}

fn arglina_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    let m = 2 * n;
    for i in 0..m {
        for k in 0..n {
            j[i * n + k] = -2.0 / m as f64 + if i == k { 1.0 } else { 0.0 };
        }
    }
}

fn argtrig_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let sc: f64 = x.iter().map(|v| v.cos()).sum();
    for i in 0..n {
        r[i] = n as f64 - sc + (i + 1) as f64 * (1.0 - x[i].cos()) - x[i].sin();
    }
}

fn argtrig_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        for k in 0..n {
            j[i * n + k] = x[k].sin();
        }
        j[i * n + i] += (i + 1) as f64 * x[i].sin() - x[i].cos();
    }
}

const BARD_Y: [f64; 15] = [
    0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39, 0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39,
];

fn bard_r(x: &[f64], r: &mut [f64]) {
    for i in 0..15 {
        let u = (i + 1) as f64;
        let v = 15.0 - i as f64;
        let w = u.min(v);
        r[i] = BARD_Y[i] - (x[0] + u / (v * x[1] + w * x[2]));
    }
}

fn bard_j(x: &[f64], j: &mut [f64]) {
    for i in 0..15 {
        let u = (i + 1) as f64;
        let v = 15.0 - i as f64;
        let w = u.min(v);
        let d = v * x[1] + w * x[2];
        j[i * 3] = -1.0;
        j[i * 3 + 1] = u * v / (d * d);
        j[i * 3 + 2] = u * w / (d * d);
    }
}

const BEALE_C: [f64; 3] = [1.5, 2.25, 2.625];

fn beale_r(x: &[f64], r: &mut [f64]) {
    for i in 0..3 {
        r[i] = BEALE_C[i] - x[0] * (1.0 - x[1].powi(i as i32 + 1));
    }
}

fn beale_j(x: &[f64], j: &mut [f64]) {
    for i in 0..3 {
        let p = i as i32 + 1;
        j[i * 2] = -(1.0 - x[1].powi(p));
        j[i * 2 + 1] = x[0] * p as f64 * x[1].powi(p - 1);
    }
}

fn biggs6_r(x: &[f64], r: &mut [f64]) {
    for i in 0..13 {
        let t = 0.1 * (i + 1) as f64;
        let y = (-t).exp() - 5.0 * (-10.0 * t).exp() + 3.0 * (-4.0 * t).exp();
        r[i] = x[2] * (-t * x[0]).exp() - x[3] * (-t * x[1]).exp() + x[5] * (-t * x[4]).exp() - y;
    }
}

fn biggs6_j(x: &[f64], j: &mut [f64]) {
    for i in 0..13 {
        let t = 0.1 * (i + 1) as f64;
        let e0 = (-t * x[0]).exp();
        let e1 = (-t * x[1]).exp();
        let e4 = (-t * x[4]).exp();
        let row = &mut j[i * 6..(i + 1) * 6];
        row[0] = -t * x[2] * e0;
        row[1] = t * x[3] * e1;
        row[2] = e0;
        row[3] = -e1;
        row[4] = -t * x[5] * e4;
        row[5] = e4;
    }
}

fn booth_r(x: &[f64], r: &mut [f64]) {
    r[0] = x[0] + 2.0 * x[1] - 7.0;
    r[1] = 2.0 * x[0] + x[1] - 5.0;
}

fn booth_j(_x: &[f64], j: &mut [f64]) {
    j.copy_from_slice(&[1.0, 2.0, 2.0, 1.0]);
}

fn box3_r(x: &[f64], r: &mut [f64]) {
    for i in 0..10 {
        let t = 0.1 * (i + 1) as f64;
        r[i] = (-t * x[0]).exp() - (-t * x[1]).exp() - x[2] * ((-t).exp() - (-10.0 * t).exp());
    }
}

fn box3_j(x: &[f64], j: &mut [f64]) {
    for i in 0..10 {
        let t = 0.1 * (i + 1) as f64;
        j[i * 3] = -t * (-t * x[0]).exp();
        j[i * 3 + 1] = t * (-t * x[1]).exp();
        j[i * 3 + 2] = -((-t).exp() - (-10.0 * t).exp());
    }
}

fn brownal_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let s: f64 = x.iter().sum();
    for i in 0..n - 1 {
        r[i] = x[i] + s - (n + 1) as f64;
    }
    r[n - 1] = x.iter().product::<f64>() - 1.0;
}

fn brownal_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for i in 0..n - 1 {
        for k in 0..n {
            j[i * n + k] = if i == k { 2.0 } else { 1.0 };
        }
    }
    for k in 0..n {
        j[(n - 1) * n + k] = x
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != k)
            .map(|(_, v)| v)
            .product();
    }
}

fn brownbs_r(x: &[f64], r: &mut [f64]) {
    r[0] = x[0] - 1e6;
    r[1] = x[1] - 2e-6;
    r[2] = x[0] * x[1] - 2.0;
}

fn brownbs_j(x: &[f64], j: &mut [f64]) {
    j.copy_from_slice(&[1.0, 0.0, 0.0, 1.0, x[1], x[0]]);
}

fn brownden_r(x: &[f64], r: &mut [f64]) {
    for i in 0..20 {
        let t = (i + 1) as f64 / 5.0;
        let a = x[0] + t * x[1] - t.exp();
        let b = x[2] + x[3] * t.sin() - t.cos();
        r[i] = a * a + b * b;
    }
}

fn brownden_j(x: &[f64], j: &mut [f64]) {
    for i in 0..20 {
        let t = (i + 1) as f64 / 5.0;
        let a = x[0] + t * x[1] - t.exp();
        let b = x[2] + x[3] * t.sin() - t.cos();
        let row = &mut j[i * 4..(i + 1) * 4];
        row[0] = 2.0 * a;
        row[1] = 2.0 * a * t;
        row[2] = 2.0 * b;
        row[3] = 2.0 * b * t.sin();
    }
}

fn broyden3d_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let prev = if i > 0 { x[i - 1] } else { 0.0 };
        let next = if i + 1 < n { x[i + 1] } else { 0.0 };
        r[i] = (3.0 - 2.0 * x[i]) * x[i] - prev - 2.0 * next + 1.0;
    }
}

fn broyden3d_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        j[i * n + i] = 3.0 - 4.0 * x[i];
        if i > 0 {
            j[i * n + i - 1] = -1.0;
        }
        if i + 1 < n {
            j[i * n + i + 1] = -2.0;
        }
    }
}

fn broydenbd_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let lo = i.saturating_sub(5);
        let hi = (i + 1).min(n - 1);
        let s: f64 = (lo..=hi).filter(|&k| k != i).map(|k| x[k] * (1.0 + x[k])).sum();
        r[i] = x[i] * (2.0 + 5.0 * x[i] * x[i]) + 1.0 - s;
    }
}

fn broydenbd_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let lo = i.saturating_sub(5);
        let hi = (i + 1).min(n - 1);
        for k in lo..=hi {
            j[i * n + k] = if k == i {
                2.0 + 15.0 * x[i] * x[i]
            } else {
                -(1.0 + 2.0 * x[k])
            };
        }
    }
}

/// Shifted Chebyshev values `T_0..T_m` and derivatives at `y ∈ [-1, 1]`.
fn chebyshev(y: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut t = vec![0.0; m + 1];
    let mut dt = vec![0.0; m + 1];
    t[0] = 1.0;
    if m >= 1 {
        t[1] = y;
        dt[1] = 1.0;
    }
    for k in 1..m {
        t[k + 1] = 2.0 * y * t[k] - t[k - 1];
        dt[k + 1] = 2.0 * t[k] + 2.0 * y * dt[k] - dt[k - 1];
    }
    (t, dt)
}

fn chebyqad_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let m = r.len();
    r.iter_mut().for_each(|v| *v = 0.0);
    for xj in x {
        let (t, _) = chebyshev(2.0 * xj - 1.0, m);
        for i in 0..m {
            r[i] += t[i + 1] / n as f64;
        }
    }
    for i in 0..m {
        let deg = i + 1;
        if deg % 2 == 0 {
            r[i] += 1.0 / ((deg * deg) as f64 - 1.0);
        }
    }
}

fn chebyqad_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    let m = n;
    for (k, xk) in x.iter().enumerate() {
        let (_, dt) = chebyshev(2.0 * xk - 1.0, m);
        for i in 0..m {
            j[i * n + k] = 2.0 * dt[i + 1] / n as f64;
        }
    }
}

fn cube_r(x: &[f64], r: &mut [f64]) {
    r[0] = 10.0 * (x[1] - x[0].powi(3));
    r[1] = 1.0 - x[0];
}

fn cube_j(x: &[f64], j: &mut [f64]) {
    j.copy_from_slice(&[-30.0 * x[0] * x[0], 10.0, -1.0, 0.0]);
}

fn engval2_r(x: &[f64], r: &mut [f64]) {
    let q = 5.0 * x[2] - x[0] + 1.0;
    r[0] = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0;
    r[1] = x[0] * x[0] + x[1] * x[1] + (x[2] - 2.0).powi(2) - 1.0;
    r[2] = x[0] + x[1] + x[2] - 1.0;
    r[3] = x[0] + x[1] - x[2] + 1.0;
    r[4] = x[0].powi(3) + 3.0 * x[1] * x[1] + q * q - 36.0;
}

fn engval2_j(x: &[f64], j: &mut [f64]) {
    let q = 5.0 * x[2] - x[0] + 1.0;
    j.copy_from_slice(&[
        2.0 * x[0],
        2.0 * x[1],
        2.0 * x[2],
        2.0 * x[0],
        2.0 * x[1],
        2.0 * (x[2] - 2.0),
        1.0,
        1.0,
        1.0,
        1.0,
        1.0,
        -1.0,
        3.0 * x[0] * x[0] - 2.0 * q,
        6.0 * x[1],
        10.0 * q,
    ]);
}

fn expfit_r(x: &[f64], r: &mut [f64]) {
    let h = 0.25;
    for i in 0..10 {
        let ih = (i + 1) as f64 * h;
        r[i] = x[0] * (ih * x[1]).exp() - ih;
    }
}

fn expfit_j(x: &[f64], j: &mut [f64]) {
    let h = 0.25;
    for i in 0..10 {
        let ih = (i + 1) as f64 * h;
        let e = (ih * x[1]).exp();
        j[i * 2] = e;
        j[i * 2 + 1] = x[0] * ih * e;
    }
}

fn gottfr_r(x: &[f64], r: &mut [f64]) {
    r[0] = x[0] - 0.1136 * (x[0] + 3.0 * x[1]) * (1.0 - x[0]);
    r[1] = x[1] + 7.5 * (2.0 * x[0] - x[1]) * (1.0 - x[1]);
}

fn gottfr_j(x: &[f64], j: &mut [f64]) {
    j[0] = 1.0 - 0.1136 * ((1.0 - x[0]) - (x[0] + 3.0 * x[1]));
    j[1] = -0.1136 * 3.0 * (1.0 - x[0]);
    j[2] = 15.0 * (1.0 - x[1]);
    j[3] = 1.0 + 7.5 * (-(1.0 - x[1]) - (2.0 * x[0] - x[1]));
}

fn helix_theta(x: &[f64]) -> f64 {
    let base = (x[1] / x[0]).atan() / (2.0 * std::f64::consts::PI);
    if x[0] < 0.0 {
        base + 0.5
    } else {
        base
    }
}

fn helix_r(x: &[f64], r: &mut [f64]) {
    r[0] = 10.0 * (x[2] - 10.0 * helix_theta(x));
    r[1] = 10.0 * ((x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0);
    r[2] = x[2];
}

fn helix_j(x: &[f64], j: &mut [f64]) {
    let rr = x[0] * x[0] + x[1] * x[1];
    let two_pi = 2.0 * std::f64::consts::PI;
    let dth0 = -x[1] / (two_pi * rr);
    let dth1 = x[0] / (two_pi * rr);
    let rho = rr.sqrt();
    j.copy_from_slice(&[
        -100.0 * dth0,
        -100.0 * dth1,
        10.0,
        10.0 * x[0] / rho,
        10.0 * x[1] / rho,
        0.0,
        0.0,
        0.0,
        1.0,
    ]);
}

fn bv_start(n: usize) -> Vec<f64> {
    let h = 1.0 / (n + 1) as f64;
    (1..=n).map(|i| {
        let t = i as f64 * h;
        t * (t - 1.0)
    })
    .collect()
}

fn integreq_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let h = 1.0 / (n + 1) as f64;
    let t: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    let c: Vec<f64> = (0..n).map(|k| (x[k] + t[k] + 1.0).powi(3)).collect();
    for i in 0..n {
        let lo: f64 = (0..=i).map(|k| t[k] * c[k]).sum();
        let hi: f64 = (i + 1..n).map(|k| (1.0 - t[k]) * c[k]).sum();
        r[i] = x[i] + 0.5 * h * ((1.0 - t[i]) * lo + t[i] * hi);
    }
}

fn integreq_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    let h = 1.0 / (n + 1) as f64;
    let t: Vec<f64> = (1..=n).map(|i| i as f64 * h).collect();
    for i in 0..n {
        for k in 0..n {
            let dc = 3.0 * (x[k] + t[k] + 1.0).powi(2);
            let w = if k <= i { (1.0 - t[i]) * t[k] } else { t[i] * (1.0 - t[k]) };
            j[i * n + k] = 0.5 * h * w * dc + if i == k { 1.0 } else { 0.0 };
        }
    }
}

fn jensmp_r(x: &[f64], r: &mut [f64]) {
    for i in 0..10 {
        let k = (i + 1) as f64;
        r[i] = 2.0 + 2.0 * k - (k * x[0]).exp() - (k * x[1]).exp();
    }
}

fn jensmp_j(x: &[f64], j: &mut [f64]) {
    for i in 0..10 {
        let k = (i + 1) as f64;
        j[i * 2] = -k * (k * x[0]).exp();
        j[i * 2 + 1] = -k * (k * x[1]).exp();
    }
}

const KOWOSB_Y: [f64; 11] = [
    0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627, 0.0456, 0.0342, 0.0323, 0.0235, 0.0246,
];
const KOWOSB_U: [f64; 11] = [4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1, 0.0833, 0.0714, 0.0625];

fn kowosb_r(x: &[f64], r: &mut [f64]) {
    for i in 0..11 {
        let u = KOWOSB_U[i];
        r[i] = KOWOSB_Y[i] - x[0] * (u * u + u * x[1]) / (u * u + u * x[2] + x[3]);
    }
}

fn kowosb_j(x: &[f64], j: &mut [f64]) {
    for i in 0..11 {
        let u = KOWOSB_U[i];
        let num = u * u + u * x[1];
        let den = u * u + u * x[2] + x[3];
        let row = &mut j[i * 4..(i + 1) * 4];
        row[0] = -num / den;
        row[1] = -x[0] * u / den;
        row[2] = x[0] * num * u / (den * den);
        row[3] = x[0] * num / (den * den);
    }
}

const MEYER_Y: [f64; 16] = [
    34780.0, 28610.0, 23650.0, 19630.0, 16370.0, 13720.0, 11540.0, 9744.0, 8261.0, 7030.0,
    6005.0, 5147.0, 4427.0, 3820.0, 3307.0, 2872.0,
];

fn meyer3_r(x: &[f64], r: &mut [f64]) {
    for i in 0..16 {
        let t = 45.0 + 5.0 * (i + 1) as f64;
        r[i] = x[0] * (x[1] / (t + x[2])).exp() - MEYER_Y[i];
    }
}

fn meyer3_j(x: &[f64], j: &mut [f64]) {
    for i in 0..16 {
        let t = 45.0 + 5.0 * (i + 1) as f64;
        let d = t + x[2];
        let e = (x[1] / d).exp();
        j[i * 3] = e;
        j[i * 3 + 1] = x[0] * e / d;
        j[i * 3 + 2] = -x[0] * e * x[1] / (d * d);
    }
}

fn morebv_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let h = 1.0 / (n + 1) as f64;
    for i in 0..n {
        let t = (i + 1) as f64 * h;
        let prev = if i > 0 { x[i - 1] } else { 0.0 };
        let next = if i + 1 < n { x[i + 1] } else { 0.0 };
        r[i] = 2.0 * x[i] - prev - next + 0.5 * h * h * (x[i] + t + 1.0).powi(3);
    }
}

fn morebv_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    let h = 1.0 / (n + 1) as f64;
    for i in 0..n {
        let t = (i + 1) as f64 * h;
        j[i * n + i] = 2.0 + 1.5 * h * h * (x[i] + t + 1.0).powi(2);
        if i > 0 {
            j[i * n + i - 1] = -1.0;
        }
        if i + 1 < n {
            j[i * n + i + 1] = -1.0;
        }
    }
}

const OSBORNEA_Y: [f64; 33] = [
    0.844, 0.908, 0.932, 0.936, 0.925, 0.908, 0.881, 0.850, 0.818, 0.784, 0.751, 0.718, 0.685,
    0.658, 0.628, 0.603, 0.580, 0.558, 0.538, 0.522, 0.506, 0.490, 0.478, 0.467, 0.457, 0.448,
    0.438, 0.431, 0.424, 0.420, 0.414, 0.411, 0.406,
];

fn osbornea_r(x: &[f64], r: &mut [f64]) {
    for i in 0..33 {
        let t = 10.0 * i as f64;
        r[i] = OSBORNEA_Y[i] - (x[0] + x[1] * (-t * x[3]).exp() + x[2] * (-t * x[4]).exp());
    }
}

fn osbornea_j(x: &[f64], j: &mut [f64]) {
    for i in 0..33 {
        let t = 10.0 * i as f64;
        let e3 = (-t * x[3]).exp();
        let e4 = (-t * x[4]).exp();
        let row = &mut j[i * 5..(i + 1) * 5];
        row[0] = -1.0;
        row[1] = -e3;
        row[2] = -e4;
        row[3] = x[1] * t * e3;
        row[4] = x[2] * t * e4;
    }
}

const OSBORNEB_Y: [f64; 65] = [
    1.366, 1.191, 1.112, 1.013, 0.991, 0.885, 0.831, 0.847, 0.786, 0.725, 0.746, 0.679, 0.608,
    0.655, 0.616, 0.606, 0.602, 0.626, 0.651, 0.724, 0.649, 0.649, 0.694, 0.644, 0.624, 0.661,
    0.612, 0.558, 0.533, 0.495, 0.500, 0.423, 0.395, 0.375, 0.372, 0.391, 0.396, 0.405, 0.428,
    0.429, 0.523, 0.562, 0.607, 0.653, 0.672, 0.708, 0.633, 0.668, 0.645, 0.632, 0.591, 0.559,
    0.597, 0.625, 0.739, 0.710, 0.729, 0.720, 0.636, 0.581, 0.428, 0.292, 0.162, 0.098, 0.054,
];

fn osborneb_r(x: &[f64], r: &mut [f64]) {
    for i in 0..65 {
        let t = i as f64 / 10.0;
        let model = x[0] * (-t * x[4]).exp()
            + x[1] * (-(t - x[8]).powi(2) * x[5]).exp()
            + x[2] * (-(t - x[9]).powi(2) * x[6]).exp()
            + x[3] * (-(t - x[10]).powi(2) * x[7]).exp();
        r[i] = OSBORNEB_Y[i] - model;
    }
}

fn osborneb_j(x: &[f64], j: &mut [f64]) {
    for i in 0..65 {
        let t = i as f64 / 10.0;
        let row = &mut j[i * 11..(i + 1) * 11];
        let e0 = (-t * x[4]).exp();
        row[0] = -e0;
        row[4] = x[0] * t * e0;
        for b in 0..3 {
            let amp = x[1 + b];
            let rate = x[5 + b];
            let centre = x[8 + b];
            let d = t - centre;
            let e = (-d * d * rate).exp();
            row[1 + b] = -e;
            row[5 + b] = amp * d * d * e;
            row[8 + b] = -amp * 2.0 * rate * d * e;
        }
    }
}

fn penalty1_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let sa = 1e-5_f64.sqrt();
    for i in 0..n {
        r[i] = sa * (x[i] - 1.0);
    }
    r[n] = x.iter().map(|v| v * v).sum::<f64>() - 0.25;
}

fn penalty1_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    let sa = 1e-5_f64.sqrt();
    for i in 0..n {
        j[i * n + i] = sa;
        j[n * n + i] = 2.0 * x[i];
    }
}

fn penalty2_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let sa = 1e-5_f64.sqrt();
    let e = |v: f64| (v / 10.0).exp();
    r[0] = x[0] - 0.2;
    for i in 1..n {
        let y = ((i + 1) as f64 / 10.0).exp() + (i as f64 / 10.0).exp();
        r[i] = sa * (e(x[i]) + e(x[i - 1]) - y);
    }
    for i in n..2 * n - 1 {
        let k = i - n + 1;
        r[i] = sa * (e(x[k]) - (-0.1_f64).exp());
    }
    r[2 * n - 1] = (0..n).map(|k| (n - k) as f64 * x[k] * x[k]).sum::<f64>() - 1.0;
}

fn penalty2_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    let sa = 1e-5_f64.sqrt();
    let de = |v: f64| (v / 10.0).exp() / 10.0;
    j[0] = 1.0;
    for i in 1..n {
        j[i * n + i] = sa * de(x[i]);
        j[i * n + i - 1] = sa * de(x[i - 1]);
    }
    for i in n..2 * n - 1 {
        let k = i - n + 1;
        j[i * n + k] = sa * de(x[k]);
    }
    for k in 0..n {
        j[(2 * n - 1) * n + k] = 2.0 * (n - k) as f64 * x[k];
    }
}

fn powellbs_r(x: &[f64], r: &mut [f64]) {
    r[0] = 1e4 * x[0] * x[1] - 1.0;
    r[1] = (-x[0]).exp() + (-x[1]).exp() - 1.0001;
}

fn powellbs_j(x: &[f64], j: &mut [f64]) {
    j.copy_from_slice(&[1e4 * x[1], 1e4 * x[0], -(-x[0]).exp(), -(-x[1]).exp()]);
}

fn powellsg_r(x: &[f64], r: &mut [f64]) {
    for b in 0..x.len() / 4 {
        let v = &x[4 * b..4 * b + 4];
        r[4 * b] = v[0] + 10.0 * v[1];
        r[4 * b + 1] = 5f64.sqrt() * (v[2] - v[3]);
        r[4 * b + 2] = (v[1] - 2.0 * v[2]).powi(2);
        r[4 * b + 3] = 10f64.sqrt() * (v[0] - v[3]).powi(2);
    }
}

fn powellsg_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for b in 0..n / 4 {
        let o = 4 * b;
        let v = &x[o..o + 4];
        let row = |r: usize| (o + r) * n + o;
        j[row(0)] = 1.0;
        j[row(0) + 1] = 10.0;
        j[row(1) + 2] = 5f64.sqrt();
        j[row(1) + 3] = -(5f64.sqrt());
        let a = v[1] - 2.0 * v[2];
        j[row(2) + 1] = 2.0 * a;
        j[row(2) + 2] = -4.0 * a;
        let c = v[0] - v[3];
        j[row(3)] = 2.0 * 10f64.sqrt() * c;
        j[row(3) + 3] = -2.0 * 10f64.sqrt() * c;
    }
}

fn rosenbr_r(x: &[f64], r: &mut [f64]) {
    for i in 0..x.len() - 1 {
        r[2 * i] = 10.0 * (x[i + 1] - x[i] * x[i]);
        r[2 * i + 1] = 1.0 - x[i];
    }
}

fn rosenbr_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for i in 0..n - 1 {
        j[2 * i * n + i] = -20.0 * x[i];
        j[2 * i * n + i + 1] = 10.0;
        j[(2 * i + 1) * n + i] = -1.0;
    }
}

fn tridia_r(x: &[f64], r: &mut [f64]) {
    r[0] = x[0] - 1.0;
    for i in 1..x.len() {
        r[i] = ((i + 1) as f64).sqrt() * (2.0 * x[i] - x[i - 1]);
    }
}

fn tridia_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    j[0] = 1.0;
    for i in 1..n {
        let c = ((i + 1) as f64).sqrt();
        j[i * n + i] = 2.0 * c;
        j[i * n + i - 1] = -c;
    }
}

fn vardim_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    let s: f64 = x.iter().enumerate().map(|(k, v)| (k + 1) as f64 * (v - 1.0)).sum();
    for i in 0..n {
        r[i] = x[i] - 1.0;
    }
    r[n] = s;
    r[n + 1] = s * s;
}

fn vardim_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    let s: f64 = x.iter().enumerate().map(|(k, v)| (k + 1) as f64 * (v - 1.0)).sum();
    for k in 0..n {
        j[k * n + k] = 1.0;
        j[n * n + k] = (k + 1) as f64;
        j[(n + 1) * n + k] = 2.0 * s * (k + 1) as f64;
    }
}

fn watson_r(x: &[f64], r: &mut [f64]) {
    let n = x.len();
    for i in 0..29 {
        let t = (i + 1) as f64 / 29.0;
        let mut s1 = 0.0;
        let mut tp = 1.0;
        for k in 1..n {
            s1 += k as f64 * x[k] * tp;
            tp *= t;
        }
        let mut s2 = 0.0;
        tp = 1.0;
        for xk in x {
            s2 += xk * tp;
            tp *= t;
        }
        r[i] = s1 - s2 * s2 - 1.0;
    }
    r[29] = x[0];
    r[30] = x[1] - x[0] * x[0] - 1.0;
}

fn watson_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for i in 0..29 {
        let t = (i + 1) as f64 / 29.0;
        let mut s2 = 0.0;
        let mut tp = 1.0;
        for xk in x {
            s2 += xk * tp;
            tp *= t;
        }
        // d/dx_k: k t^{k-1} - 2 s2 t^k  (k zero-based)
        let mut tkm1 = 0.0;
        let mut tk = 1.0;
        for k in 0..n {
            j[i * n + k] = k as f64 * tkm1 - 2.0 * s2 * tk;
            tkm1 = tk;
            tk *= t;
        }
    }
    j[29 * n] = 1.0;
    j[30 * n] = -2.0 * x[0];
    j[30 * n + 1] = 1.0;
}

fn woods_r(x: &[f64], r: &mut [f64]) {
    for b in 0..x.len() / 4 {
        let v = &x[4 * b..4 * b + 4];
        let o = 6 * b;
        r[o] = 10.0 * (v[1] - v[0] * v[0]);
        r[o + 1] = 1.0 - v[0];
        r[o + 2] = 90f64.sqrt() * (v[3] - v[2] * v[2]);
        r[o + 3] = 1.0 - v[2];
        r[o + 4] = 10f64.sqrt() * (v[1] + v[3] - 2.0);
        r[o + 5] = 0.1f64.sqrt() * (v[1] - v[3]);
    }
}

fn woods_j(x: &[f64], j: &mut [f64]) {
    let n = x.len();
    for b in 0..n / 4 {
        let c = 4 * b;
        let v = &x[c..c + 4];
        let row = |r: usize| (6 * b + r) * n + c;
        j[row(0)] = -20.0 * v[0];
        j[row(0) + 1] = 10.0;
        j[row(1)] = -1.0;
        j[row(2) + 2] = -2.0 * 90f64.sqrt() * v[2];
        j[row(2) + 3] = 90f64.sqrt();
        j[row(3) + 2] = -1.0;
        j[row(4) + 1] = 10f64.sqrt();
        j[row(4) + 3] = 10f64.sqrt();
        j[row(5) + 1] = 0.1f64.sqrt();
        j[row(5) + 3] = -(0.1f64.sqrt());
    }
}

// ----------------------------------------------------------------------------
// general smooth problems

fn arwhead_f(x: &[f64]) -> f64 {
    let n = x.len();
    let xn2 = x[n - 1] * x[n - 1];
    x[..n - 1]
        .iter()
        .map(|v| (v * v + xn2).powi(2) - 4.0 * v + 3.0)
        .sum()
}

fn arwhead_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    let xn = x[n - 1];
    g[n - 1] = 0.0;
    for i in 0..n - 1 {
        let q = x[i] * x[i] + xn * xn;
        g[i] = 4.0 * x[i] * q - 4.0;
        g[n - 1] += 4.0 * xn * q;
    }
}

fn cliff_f(x: &[f64]) -> f64 {
    (0.01 * x[0] - 0.03).powi(2) - x[0] + x[1] + (20.0 * (x[0] - x[1])).exp()
}

fn cliff_g(x: &[f64], g: &mut [f64]) {
    let e = (20.0 * (x[0] - x[1])).exp();
    g[0] = 0.02 * (0.01 * x[0] - 0.03) - 1.0 + 20.0 * e;
    g[1] = 1.0 - 20.0 * e;
}

fn cliff_fstar() -> f64 {
    // stationary point: e^{20(x0-x1)} = 1/20, x0 = 3
    let x1 = 3.0 - (0.05_f64).ln() / 20.0;
    cliff_f(&[3.0, x1])
}

fn cosine_f(x: &[f64]) -> f64 {
    x.windows(2).map(|w| (w[0] * w[0] - 0.5 * w[1]).cos()).sum()
}

fn cosine_g(x: &[f64], g: &mut [f64]) {
    g.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..x.len() - 1 {
        let s = (x[i] * x[i] - 0.5 * x[i + 1]).sin();
        g[i] -= 2.0 * x[i] * s;
        g[i + 1] += 0.5 * s;
    }
}

fn dqartic_f(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, v)| (v - (i + 1) as f64).powi(4)).sum()
}

fn dqartic_g(x: &[f64], g: &mut [f64]) {
    for (i, gi) in g.iter_mut().enumerate() {
        *gi = 4.0 * (x[i] - (i + 1) as f64).powi(3);
    }
}

fn dqartic_h(x: &[f64], h: &mut [f64]) {
    let n = x.len();
    h.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n {
        h[i * n + i] = 12.0 * (x[i] - (i + 1) as f64).powi(2);
    }
}

fn edensch_f(x: &[f64]) -> f64 {
    16.0 + x
        .windows(2)
        .map(|w| (w[0] - 2.0).powi(4) + (w[0] * w[1] - 2.0 * w[1]).powi(2) + (w[1] + 1.0).powi(2))
        .sum::<f64>()
}

fn edensch_g(x: &[f64], g: &mut [f64]) {
    g.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..x.len() - 1 {
        let (a, b) = (x[i], x[i + 1]);
        let q = a * b - 2.0 * b;
        g[i] += 4.0 * (a - 2.0).powi(3) + 2.0 * q * b;
        g[i + 1] += 2.0 * q * (a - 2.0) + 2.0 * (b + 1.0);
    }
}

fn eg2_f(x: &[f64]) -> f64 {
    let n = x.len();
    x[..n - 1].iter().map(|v| (x[0] + v * v - 1.0).sin()).sum::<f64>()
        + 0.5 * (x[n - 1] * x[n - 1]).sin()
}

fn eg2_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    g.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n - 1 {
        let c = (x[0] + x[i] * x[i] - 1.0).cos();
        g[0] += c;
        g[i] += 2.0 * x[i] * c;
    }
    g[n - 1] += x[n - 1] * (x[n - 1] * x[n - 1]).cos();
}

fn engval1_f(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| (w[0] * w[0] + w[1] * w[1]).powi(2) - 4.0 * w[0] + 3.0)
        .sum()
}

fn engval1_g(x: &[f64], g: &mut [f64]) {
    g.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..x.len() - 1 {
        let q = x[i] * x[i] + x[i + 1] * x[i + 1];
        g[i] += 4.0 * x[i] * q - 4.0;
        g[i + 1] += 4.0 * x[i + 1] * q;
    }
}

fn hilbert_f(x: &[f64]) -> f64 {
    let n = x.len();
    let mut f = 0.0;
    for i in 0..n {
        for k in 0..n {
            f += x[i] * x[k] / (i + k + 1) as f64;
        }
    }
    f
}

fn hilbert_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        g[i] = 2.0 * (0..n).map(|k| x[k] / (i + k + 1) as f64).sum::<f64>();
    }
}

fn hilbert_h(x: &[f64], h: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        for k in 0..n {
            h[i * n + k] = 2.0 / (i + k + 1) as f64;
        }
    }
}

fn nondquar_f(x: &[f64]) -> f64 {
    let n = x.len();
    let xn = x[n - 1];
    (x[0] - x[1]).powi(2)
        + (0..n - 2).map(|i| (x[i] + x[i + 1] + xn).powi(4)).sum::<f64>()
        + (x[n - 2] + xn).powi(2)
}

fn nondquar_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    let xn = x[n - 1];
    g.iter_mut().for_each(|v| *v = 0.0);
    g[0] += 2.0 * (x[0] - x[1]);
    g[1] -= 2.0 * (x[0] - x[1]);
    for i in 0..n - 2 {
        let q = 4.0 * (x[i] + x[i + 1] + xn).powi(3);
        g[i] += q;
        g[i + 1] += q;
        g[n - 1] += q;
    }
    let e = 2.0 * (x[n - 2] + xn);
    g[n - 2] += e;
    g[n - 1] += e;
}

fn schmvett_f(x: &[f64]) -> f64 {
    let a = x[0] - x[1];
    let q = (x[0] + x[2]) / x[1] - 2.0;
    -(1.0 / (1.0 + a * a)
        + (0.5 * std::f64::consts::PI * x[1] * x[2]).sin()
        + (-q * q).exp())
}

fn schmvett_g(x: &[f64], g: &mut [f64]) {
    let half_pi = 0.5 * std::f64::consts::PI;
    let a = x[0] - x[1];
    let d1 = 2.0 * a / (1.0 + a * a).powi(2);
    let c = (half_pi * x[1] * x[2]).cos();
    let q = (x[0] + x[2]) / x[1] - 2.0;
    let e = (-q * q).exp();
    let dq0 = 1.0 / x[1];
    let dq1 = -(x[0] + x[2]) / (x[1] * x[1]);
    // f = -(t1 + t2 + t3)
    g[0] = d1 + 2.0 * q * e * dq0;
    g[1] = -d1 - c * half_pi * x[2] + 2.0 * q * e * dq1;
    g[2] = -c * half_pi * x[1] + 2.0 * q * e * dq0;
}

fn sisser_f(x: &[f64]) -> f64 {
    3.0 * x[0].powi(4) - 2.0 * (x[0] * x[1]).powi(2) + 3.0 * x[1].powi(4)
}

fn sisser_g(x: &[f64], g: &mut [f64]) {
    g[0] = 12.0 * x[0].powi(3) - 4.0 * x[0] * x[1] * x[1];
    g[1] = -4.0 * x[0] * x[0] * x[1] + 12.0 * x[1].powi(3);
}

fn zangwill2_f(x: &[f64]) -> f64 {
    (16.0 * x[0] * x[0] + 16.0 * x[1] * x[1] - 8.0 * x[0] * x[1] - 56.0 * x[0] - 256.0 * x[1]
        + 991.0)
        / 15.0
}

fn zangwill2_g(x: &[f64], g: &mut [f64]) {
    g[0] = (32.0 * x[0] - 8.0 * x[1] - 56.0) / 15.0;
    g[1] = (32.0 * x[1] - 8.0 * x[0] - 256.0) / 15.0;
}

fn zangwill2_h(_x: &[f64], h: &mut [f64]) {
    h.copy_from_slice(&[32.0 / 15.0, -8.0 / 15.0, -8.0 / 15.0, 32.0 / 15.0]);
}

// ----------------------------------------------------------------------------
// Dixon–Maany family

#[derive(Debug, Clone, Copy)]
struct Dixmaan {
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    k: [i32; 4],
}

fn dixmaan(name: &str) -> Result<Problem> {
    let variant = name.as_bytes()[7];
    let beta = match variant {
        b'a' | b'e' | b'i' => 0.0,
        b'b' | b'f' | b'j' => 0.0625,
        b'c' | b'g' | b'k' => 0.125,
        b'd' | b'h' | b'l' => 0.26,
        _ => return Err(Error::UnknownProblem(name.to_string())),
    };
    let k = match variant {
        b'a'..=b'd' => [0, 0, 0, 0],
        b'e'..=b'h' => [1, 0, 0, 1],
        _ => [2, 0, 0, 2],
    };
    let obj = Dixmaan { alpha: 1.0, beta, gamma: 0.125, delta: 0.125, k };
    Ok(Problem::new(name, vec![2.0; 12], Arc::new(obj)).with_reference(1.0, Literature))
}

impl Dixmaan {
    fn w(&self, i: usize, n: usize, which: usize) -> f64 {
        ((i + 1) as f64 / n as f64).powi(self.k[which])
    }
}

impl Objective for Dixmaan {
    fn value(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let m = n / 3;
        let mut f = 1.0;
        for i in 0..n {
            f += self.alpha * x[i] * x[i] * self.w(i, n, 0);
        }
        for i in 0..n - 1 {
            let u = x[i + 1] + x[i + 1] * x[i + 1];
            f += self.beta * x[i] * x[i] * u * u * self.w(i, n, 1);
        }
        for i in 0..2 * m {
            f += self.gamma * x[i] * x[i] * x[i + m].powi(4) * self.w(i, n, 2);
        }
        for i in 0..m {
            f += self.delta * x[i] * x[i + 2 * m] * self.w(i, n, 3);
        }
        f
    }

    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        let n = x.len();
        let m = n / 3;
        g.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            g[i] += 2.0 * self.alpha * x[i] * self.w(i, n, 0);
        }
        for i in 0..n - 1 {
            let c = self.beta * self.w(i, n, 1);
            let u = x[i + 1] + x[i + 1] * x[i + 1];
            g[i] += 2.0 * c * x[i] * u * u;
            g[i + 1] += c * x[i] * x[i] * 2.0 * u * (1.0 + 2.0 * x[i + 1]);
        }
        for i in 0..2 * m {
            let c = self.gamma * self.w(i, n, 2);
            g[i] += 2.0 * c * x[i] * x[i + m].powi(4);
            g[i + m] += 4.0 * c * x[i] * x[i] * x[i + m].powi(3);
        }
        for i in 0..m {
            let c = self.delta * self.w(i, n, 3);
            g[i] += c * x[i + 2 * m];
            g[i + 2 * m] += c * x[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{derivative_errors, evaluate, Oracle, Want};

    #[test]
    fn beale_at_one_one() {
        let p = load_suite(Some(&["beale"])).unwrap().remove(0);
        let ev = evaluate(&p, &[1.0, 1.0], Want::VALUE_GRADIENT).unwrap();
        assert_eq!(ev.value(), 14.203125);
        let g = ev.gradient();
        assert!(g[0].abs() < 1e-14);
        assert!((g[1] - 27.75).abs() < 1e-12);
    }

    #[test]
    fn names_are_unique_and_sorted() {
        let mut sorted = SUITE_NAMES.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), SUITE_NAMES.len());
        assert!(SUITE_NAMES.len() >= 25);
    }

    #[test]
    fn unknown_problem() {
        assert_eq!(
            load_suite(Some(&["nosuch"])).unwrap_err(),
            Error::UnknownProblem("nosuch".into())
        );
        assert!(load_suite(Some(&["dixmaanz"])).is_err());
    }

    #[test]
    fn rosenbr_has_dimension_ten() {
        let p = load_suite(Some(&["rosenbr"])).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].n(), 10);
    }

    #[test]
    fn reference_values_are_attained_at_known_minimizers() {
        let cases: &[(&str, Vec<f64>)] = &[
            ("rosenbr", vec![1.0; 10]),
            ("beale", vec![3.0, 0.5]),
            ("booth", vec![1.0, 3.0]),
            ("cube", vec![1.0, 1.0]),
            ("box3", vec![1.0, 10.0, 1.0]),
            ("brownbs", vec![1e6, 2e-6]),
            ("dqartic", (1..=10).map(|i| i as f64).collect()),
            ("zangwill2", vec![4.0, 9.0]),
            ("woods", vec![1.0; 12]),
            ("powellsg", vec![0.0; 12]),
            ("helix", vec![1.0, 0.0, 0.0]),
            ("vardim", vec![1.0; 10]),
            ("dixmaana", vec![0.0; 12]),
            ("schmvett", vec![1.0, 1.0, 1.0]),
        ];
        for (name, x) in cases {
            let p = load_suite(Some(&[name])).unwrap().remove(0);
            let f = p.value(x).unwrap();
            assert!((f - p.f_ref.unwrap()).abs() < 1e-10, "{name}: {f}");
        }
    }

    #[test]
    fn manifest_round_trip() {
        let probs = load_suite(None).unwrap();
        let m = manifest(&probs);
        let s = serde_json::to_string(&m).unwrap();
        let back: Manifest = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.version, MANIFEST_VERSION);
    }

    #[test]
    fn oracle_lengths_match_dimension() {
        for p in load_suite(None).unwrap() {
            let ev = p.evaluate(&p.x0, Want::ALL).unwrap();
            assert_eq!(ev.gradient().len(), p.n(), "{}", p.name);
            assert_eq!(ev.hessian.unwrap().n, p.n(), "{}", p.name);
        }
    }

    #[test]
    fn x0_derivatives_consistent() {
        for p in load_suite(None).unwrap() {
            let (ge, he) = derivative_errors(&p, &p.x0).unwrap();
            assert!(ge < 1e-5 && he < 1e-5, "{}: {ge:e} {he:e}", p.name);
        }
    }
}
