//! Gauss-Legendre nodes and composite panel integration.

use crate::C64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

fn cache() -> &'static Mutex<HashMap<usize, Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1],
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre needs at least one node");
    if let Some(r) = cache().lock().unwrap().get(&n) {
        return r.clone();
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            z = 0.0;
            dp = 1.0;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n == 1 {
        w[0] = 2.0;
    }
    let rule = Arc::new((x, w));
    cache().lock().unwrap().insert(n, rule.clone());
    rule
}

/// Composite rule: `n` Gauss-Legendre nodes on each panel `[edges[i], edges[i+1]]`.
pub fn integrate_panels<F: FnMut(f64) -> C64>(edges: &[f64], n: usize, mut f: F) -> C64 {
    let rule = gauss_legendre(n);
    let (x, w) = (&rule.0, &rule.1);
    let mut acc = C64::new(0.0, 0.0);
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        if half == 0.0 {
            continue;
        }
        let mut s = C64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(w.iter()) {
            s += f(mid + half * xi) * *wi;
        }
        acc += s * half;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in 1..40 {
            let r = gauss_legendre(n);
            let s: f64 = r.1.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n = {n}");
            assert!(r.0.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let n = 6;
        for deg in 0..(2 * n) {
            let got = integrate_panels(&[0.0, 1.0], n, |x| C64::new(x.powi(deg as i32), 0.0));
            assert!((got.re - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "deg {deg}");
        }
    }
}
