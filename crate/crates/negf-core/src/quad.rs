//! Gaussian quadrature: Legendre rules on [-1, 1] and custom rules for an
//! arbitrary positive weight via discretized Stieltjes recursion plus
//! Golub-Welsch.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::cmatrix::CMat;
use crate::error::Error;
use crate::fmath;
use crate::Result;

/// Gauss-Legendre nodes and weights on [-1, 1], Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess
        let mut x = fmath::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if fmath::abs(dx) < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nodes = t.iter().map(|&ti| mid + half * ti).collect();
    let weights = w.iter().map(|&wi| wi * half).collect();
    (nodes, weights)
}

/// Gauss rule for a positive weight function `w` on [a, b]:
/// `∫ g(x) w(x) dx ≈ Σ w_i g(x_i)`.
///
/// Recurrence coefficients come from a discretized Stieltjes procedure on a
/// composite Legendre grid; `breaks` lists interior panel boundaries (points
/// where `w` changes character), and nodes/weights follow from the Jacobi
/// matrix (Golub-Welsch).
pub fn gauss_weight_rule<F: Fn(f64) -> f64>(
    n: usize,
    a: f64,
    b: f64,
    breaks: &[f64],
    weight: F,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || !(a < b) {
        return Err(Error::InvalidParameter(format!(
            "gauss_weight_rule: n = {n}, interval [{a}, {b}]"
        )));
    }
    // Panel edges clamped to [a, b], deduplicated.
    let mut edges = vec![a];
    for &p in breaks {
        if p > a && p < b {
            edges.push(p);
        }
    }
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let per_panel = (2 * n + 32).max(64);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut xs: Vec<f64> = Vec::new(); // scaled to [-1, 1] for conditioning
    let mut ws: Vec<f64> = Vec::new();
    for pair in edges.windows(2) {
        let (nodes, wts) = gauss_legendre_on(per_panel, pair[0], pair[1]);
        for (x, w) in nodes.iter().zip(wts.iter()) {
            let wx = weight(*x);
            if wx < 0.0 {
                return Err(Error::InvalidParameter(
                    "gauss_weight_rule: negative weight".into(),
                ));
            }
            xs.push((x - mid) / half);
            ws.push(w * wx);
        }
    }

    // Stieltjes recursion for alpha_k, beta_k on the discrete measure.
    let npts = xs.len();
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    let mut p_prev = vec![0.0; npts];
    let mut p_cur = vec![1.0; npts];
    let mut norm_cur: f64 = ws.iter().sum();
    if norm_cur <= 0.0 {
        return Err(Error::InvalidParameter(
            "gauss_weight_rule: vanishing weight mass".into(),
        ));
    }
    beta[0] = norm_cur;
    for k in 0..n {
        let mut xp = 0.0;
        for i in 0..npts {
            xp += ws[i] * xs[i] * p_cur[i] * p_cur[i];
        }
        alpha[k] = xp / norm_cur;
        if k + 1 < n {
            let mut norm_next = 0.0;
            let beta_k = if k == 0 { 0.0 } else { beta[k] };
            let mut p_next = vec![0.0; npts];
            for i in 0..npts {
                p_next[i] = (xs[i] - alpha[k]) * p_cur[i] - beta_k * p_prev[i];
                norm_next += ws[i] * p_next[i] * p_next[i];
            }
            if norm_next <= 0.0 {
                return Err(Error::InvalidParameter(
                    "gauss_weight_rule: Stieltjes breakdown (n too large for weight)".into(),
                ));
            }
            beta[k + 1] = norm_next / norm_cur;
            p_prev = p_cur;
            p_cur = p_next;
            norm_cur = norm_next;
        }
    }

    // Golub-Welsch: eigen-decompose the symmetric tridiagonal Jacobi matrix.
    let mut jac = CMat::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = num_complex::Complex64::new(alpha[k], 0.0);
        if k + 1 < n {
            let off = fmath::sqrt(beta[k + 1]);
            jac[(k, k + 1)] = num_complex::Complex64::new(off, 0.0);
            jac[(k + 1, k)] = num_complex::Complex64::new(off, 0.0);
        }
    }
    let (evals, evecs) = jac.hermitian_eigen()?;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        nodes.push(mid + half * evals[k]);
        let v0 = evecs[(0, k)].norm_sqr();
        weights.push(beta[0] * v0);
    }
    Ok((nodes, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_small_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert_abs_diff_eq!(x[0], -(1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(x[1], (1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-14);
        let (x3, w3) = gauss_legendre(3);
        assert_abs_diff_eq!(x3[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x3[0], -(0.6f64).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(w3[1], 8.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w3[0], 5.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 4, 8, 16, 32, 48] {
            let (x, w) = gauss_legendre(n);
            // exact for degree 2n-1
            for k in (0..2 * n).step_by(2) {
                let num: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                let exact = 2.0 / (k as f64 + 1.0);
                assert_abs_diff_eq!(num, exact, epsilon = 1e-12 * exact.abs().max(1.0));
            }
            let wsum: f64 = w.iter().sum();
            assert_abs_diff_eq!(wsum, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn weight_rule_with_unit_weight_reduces_to_legendre() {
        let (x, w) = gauss_weight_rule(8, -1.0, 1.0, &[], |_| 1.0).unwrap();
        let (xr, wr) = gauss_legendre(8);
        for i in 0..8 {
            assert_abs_diff_eq!(x[i], xr[i], epsilon = 1e-10);
            assert_abs_diff_eq!(w[i], wr[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn fermi_weight_rule_integrates_smooth_functions() {
        // weight = Fermi function, kT = 0.025, mu = 0 on [-0.75, 0.75]
        let kt = 0.025;
        let fermi = |x: f64| 1.0 / (1.0 + (x / kt).exp());
        let (nodes, weights) =
            gauss_weight_rule(16, -0.75, 0.75, &[-8.0 * kt, 8.0 * kt], fermi).unwrap();
        // dense reference with composite Legendre
        let reference = |g: &dyn Fn(f64) -> f64| -> f64 {
            let mut acc = 0.0;
            let edges = [-0.75, -0.2, -0.05, 0.05, 0.2, 0.75];
            for pair in edges.windows(2) {
                let (xs, ws) = gauss_legendre_on(200, pair[0], pair[1]);
                for (x, w) in xs.iter().zip(ws.iter()) {
                    acc += w * g(*x) * fermi(*x);
                }
            }
            acc
        };
        for g in [
            (|x: f64| 1.0) as fn(f64) -> f64,
            |x| x,
            |x| x * x * x - 0.3 * x,
            |x| (2.0 * x).cos(),
            |x| (0.9 * x).exp(),
        ] {
            let approx_val: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * g(*x)).sum();
            let exact = reference(&g);
            assert_abs_diff_eq!(approx_val, exact, epsilon = 1e-12);
        }
        // nodes inside interval, weights positive
        for (x, w) in nodes.iter().zip(&weights) {
            assert!(*x > -0.75 && *x < 0.75);
            assert!(*w > 0.0);
        }
    }
}
