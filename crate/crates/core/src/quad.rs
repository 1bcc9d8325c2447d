//! Adaptive Gauss-Legendre quadrature for complex-valued integrands on a
//! finite interval, split into unit panels with an embedded 16/32-point
//! error check and recursive bisection.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::Complex;

pub(crate) struct QuadOutcome {
    pub value: Complex,
    pub residual: f64,
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn apply<F: Fn(f64) -> Complex>(&self, f: &F, lo: f64, hi: f64) -> Complex {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = Complex::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += f(mid + half * x) * w;
        }
        acc * half
    }
}

/// Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

/// P_n(z) and its derivative.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = z;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Integrate `f` over [a, b]; `tol` is the absolute error budget per unit
/// length of the interval.
pub(crate) fn integrate_adaptive<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64, tol: f64) -> QuadOutcome {
    let coarse = gauss_legendre(16);
    let fine = gauss_legendre(32);
    let n_panels = ((b - a).ceil() as usize).max(1);
    let width = (b - a) / n_panels as f64;
    let mut value = Complex::new(0.0, 0.0);
    let mut residual = 0.0;
    for i in 0..n_panels {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == n_panels { b } else { lo + width };
        let (v, r) = panel(f, lo, hi, tol * width, 0, &coarse, &fine);
        value += v;
        residual += r;
    }
    QuadOutcome { value, residual }
}

fn panel<F: Fn(f64) -> Complex>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: usize,
    coarse: &Rule,
    fine: &Rule,
) -> (Complex, f64) {
    let c = coarse.apply(f, lo, hi);
    let v = fine.apply(f, lo, hi);
    let err = (v - c).norm();
    if err <= tol || depth >= 12 {
        return (v, err);
    }
    let mid = 0.5 * (lo + hi);
    let (va, ra) = panel(f, lo, mid, 0.5 * tol, depth + 1, coarse, fine);
    let (vb, rb) = panel(f, mid, hi, 0.5 * tol, depth + 1, coarse, fine);
    (va + vb, ra + rb)
}
