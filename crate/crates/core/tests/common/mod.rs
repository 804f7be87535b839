#![allow(dead_code)]

use num_complex::Complex64;

/// Gauss-Legendre rule on [-1, 1], Golub-Welsch free: plain Newton on P_n.
pub fn gl_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn panels(f: &dyn Fn(f64) -> Complex64, edges: &[f64], rule: &[(f64, f64)]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, wx) in rule {
            s += f(m + h * x) * (wx * h);
        }
    }
    s
}

/// Panel edges on [0, k_max]: geometric from `width0` up to unit width.
fn edges(width0: f64, k_max: f64) -> Vec<f64> {
    let mut e = vec![0.0];
    let mut w = width0.min(1.0);
    while *e.last().unwrap() < k_max {
        let next = (e.last().unwrap() + w).min(k_max);
        e.push(next);
        w = (w * 1.25).min(1.0);
    }
    e
}

/// `int dk/2pi f(k)` over the real line for integrands that fall off like
/// `1/k^2` with `e^{ik/2}` oscillations. Cut-offs at `K = 2 pi n` and
/// Richardson extrapolation in `1/K`.
pub fn line_integral(f: &dyn Fn(f64) -> Complex64, scale: f64) -> Complex64 {
    let rule = gl_rule(16);
    let ns = [128.0, 256.0, 512.0];
    let mut partial = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut lo = 0.0;
    let mut width = scale / 8.0;
    for n in ns {
        let k = 4.0 * std::f64::consts::PI * n;
        let mut e = if lo == 0.0 { edges(width, k) } else { vec![lo] };
        if lo != 0.0 {
            while *e.last().unwrap() < k {
                let next = (e.last().unwrap() + 1.0).min(k);
                e.push(next);
            }
        }
        acc += panels(&|x| f(x) + f(-x), &e, &rule);
        lo = k;
        width = 1.0;
        partial.push((k, acc / (2.0 * std::f64::consts::PI)));
    }
    // I(K) = I + a/K + b/K^2 through three cut-offs
    let (k1, i1) = partial[0];
    let (k2, i2) = partial[1];
    let (k3, i3) = partial[2];
    let h = [1.0 / k1, 1.0 / k2, 1.0 / k3];
    let l0 = h[1] * h[2] / ((h[0] - h[1]) * (h[0] - h[2]));
    let l1 = h[0] * h[2] / ((h[1] - h[0]) * (h[1] - h[2]));
    let l2 = h[0] * h[1] / ((h[2] - h[0]) * (h[2] - h[1]));
    i1 * l0 + i2 * l1 + i3 * l2
}

/// Two-delta Hamiltonian `-1/2 d^2 + v0 (alpha d_s(x + 1/2) - d_s(x - 1/2))`
/// with Gaussian deltas of width `sigma` on a uniform box grid. Returns the
/// negative eigenvalues, lowest first.
pub fn fd_bound_energies(v0: f64, alpha: f64, sigma: f64, half_width: f64, h: f64) -> Vec<f64> {
    let n = (2.0 * half_width / h).round() as usize - 1;
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let diag: Vec<f64> = (1..=n)
        .map(|i| {
            let x = -half_width + i as f64 * h;
            let well = (-(x - 0.5).powi(2) / (2.0 * sigma * sigma)).exp();
            let wall = (-(x + 0.5).powi(2) / (2.0 * sigma * sigma)).exp();
            1.0 / (h * h) + v0 * norm * (alpha * wall - well)
        })
        .collect();
    let off = -0.5 / (h * h);
    let below = |lam: f64| -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (i, &a) in diag.iter().enumerate() {
            d = a - lam - if i == 0 { 0.0 } else { off * off / d };
            if d == 0.0 {
                d = 1e-300;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    let lower = diag.iter().fold(f64::INFINITY, |m, &a| m.min(a)) - 2.0 * off.abs();
    let k = below(0.0);
    (0..k)
        .map(|idx| {
            let (mut lo, mut hi) = (lower, 0.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if below(mid) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-15 * lo.abs().max(1e-300) {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Polynomial extrapolation in the width to zero, one order per extra width.
pub fn fd_extrapolated(v0: f64, alpha: f64, half_width: f64) -> Vec<f64> {
    let sigmas = [0.02, 0.01, 0.005, 0.0025];
    let runs: Vec<Vec<f64>> = sigmas
        .iter()
        .map(|&s| fd_bound_energies(v0, alpha, s, half_width, s / 8.0))
        .collect();
    let n = runs.iter().map(Vec::len).min().unwrap();
    let weights: Vec<f64> = (0..sigmas.len())
        .map(|i| {
            (0..sigmas.len())
                .filter(|&j| j != i)
                .map(|j| sigmas[j] / (sigmas[j] - sigmas[i]))
                .product()
        })
        .collect();
    (0..n)
        .map(|i| runs.iter().zip(&weights).map(|(r, w)| r[i] * w).sum())
        .collect()
}

/// Lippmann-Schwinger solve of `t = v + v G0 t` on a mapped Gauss-Legendre
/// grid, returning `t(k, k')` for the requested pairs.
pub fn lippmann_schwinger(
    v: &dyn Fn(f64, f64) -> Complex64,
    energy: f64,
    n: usize,
    scale: f64,
    pairs: &[(f64, f64)],
) -> Vec<Complex64> {
    let rule = gl_rule(n);
    let nodes: Vec<f64> = rule.iter().map(|&(t, _)| scale * t / (1.0 - t * t)).collect();
    let weights: Vec<f64> = rule
        .iter()
        .map(|&(t, w)| w * scale * (1.0 + t * t) / (1.0 - t * t).powi(2))
        .collect();
    let prop: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&q, &w)| w / (2.0 * std::f64::consts::PI) / (energy - 0.5 * q * q))
        .collect();
    pairs
        .iter()
        .map(|&(k, kp)| {
            // unknowns t(q_i, kp); then t(k, kp) by one more quadrature
            let mut a = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n];
            for i in 0..n {
                for j in 0..n {
                    a[i][j] = -v(nodes[i], nodes[j]) * prop[j];
                }
                a[i][i] += 1.0;
                a[i][n] = v(nodes[i], kp);
            }
            let x = gauss_solve(a);
            let mut s = v(k, kp);
            for j in 0..n {
                s += v(k, nodes[j]) * prop[j] * x[j];
            }
            s
        })
        .collect()
}

fn gauss_solve(mut a: Vec<Vec<Complex64>>) -> Vec<Complex64> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].norm().partial_cmp(&a[j][c].norm()).unwrap()).unwrap();
        a.swap(c, p);
        let piv = a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for k in c..=n {
                let u = a[c][k];
                a[r][k] -= f * u;
            }
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for r in (0..n).rev() {
        let mut s = a[r][n];
        for k in r + 1..n {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    x
}
