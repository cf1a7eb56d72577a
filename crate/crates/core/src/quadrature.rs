//! One-dimensional quadrature rules on sampled data and Gauss–Legendre nodes.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_interval(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| (mid + half * xi, half * wi))
        .collect()
}

fn check_grid(t: &[f64], f: &[f64]) -> Result<()> {
    if t.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            actual: f.len(),
        });
    }
    if t.len() < 2 {
        return Err(Error::InvalidArgument(
            "quadrature needs at least two samples".into(),
        ));
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "quadrature grid must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn trapezoid(t: &[f64], f: &[f64]) -> Result<f64> {
    check_grid(t, f)?;
    Ok(t.windows(2)
        .zip(f.windows(2))
        .map(|(tw, fw)| 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1]))
        .sum())
}

/// Composite Simpson rule on a possibly non-uniform grid. With an odd number
/// of intervals the last one is integrated from the quadratic through the
/// last three samples.
pub fn simpson(t: &[f64], f: &[f64]) -> Result<f64> {
    check_grid(t, f)?;
    let n = t.len() - 1;
    if n == 1 {
        return trapezoid(t, f);
    }
    let mut total = 0.0;
    let pairs = n / 2;
    for p in 0..pairs {
        let i = 2 * p;
        let h0 = t[i + 1] - t[i];
        let h1 = t[i + 2] - t[i + 1];
        let hs = h0 + h1;
        total += hs / 6.0
            * ((2.0 - h1 / h0) * f[i]
                + hs * hs / (h0 * h1) * f[i + 1]
                + (2.0 - h0 / h1) * f[i + 2]);
    }
    if n % 2 == 1 {
        let h0 = t[n - 1] - t[n - 2];
        let h1 = t[n] - t[n - 1];
        total += f[n] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
            + f[n - 1] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
            - f[n - 2] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
    }
    Ok(total)
}
