//! Dense complex LU with partial pivoting.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

const BLOCK: usize = 48;

#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub fn factor(mut a: CMatrix) -> Result<Self> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut k0 = 0;
        while k0 < n {
            let kb = (k0 + BLOCK).min(n);
            // unblocked factorization of the panel columns k0..kb
            for k in k0..kb {
                let mut piv = k;
                let mut best = a.data[k * n + k].norm_sqr();
                for i in k + 1..n {
                    let v = a.data[i * n + k].norm_sqr();
                    if v > best {
                        best = v;
                        piv = i;
                    }
                }
                if best == 0.0 || !best.is_finite() {
                    return Err(Error::SingularFactorization { column: k });
                }
                if piv != k {
                    for j in 0..n {
                        a.data.swap(k * n + j, piv * n + j);
                    }
                    perm.swap(k, piv);
                    swaps += 1;
                }
                let (top, rest) = a.data.split_at_mut((k + 1) * n);
                let pivot_row = &top[k * n..];
                let inv = pivot_row[k].inv();
                for row in rest.chunks_exact_mut(n) {
                    let f = row[k] * inv;
                    row[k] = f;
                    for (x, &u) in row[k + 1..kb].iter_mut().zip(&pivot_row[k + 1..kb]) {
                        *x -= f * u;
                    }
                }
            }
            if kb < n {
                // U12 = L11^{-1} A12
                for k in k0..kb {
                    let (top, rest) = a.data.split_at_mut((k + 1) * n);
                    let src = &top[k * n + kb..k * n + n];
                    for i in k + 1..kb {
                        let row = &mut rest[(i - k - 1) * n..(i - k) * n];
                        let f = row[k];
                        for (x, &u) in row[kb..].iter_mut().zip(src) {
                            *x -= f * u;
                        }
                    }
                }
                // A22 -= L21 U12
                let (top, rest) = a.data.split_at_mut(kb * n);
                let u12: Vec<&[Complex64]> = (k0..kb).map(|k| &top[k * n + kb..k * n + n]).collect();
                for row in rest.chunks_exact_mut(n) {
                    let (l, tail) = row.split_at_mut(kb);
                    for (p, u) in u12.iter().enumerate() {
                        let f = l[k0 + p];
                        if f.re == 0.0 && f.im == 0.0 {
                            continue;
                        }
                        for (x, &u) in tail.iter_mut().zip(u.iter()) {
                            *x -= f * u;
                        }
                    }
                }
            }
            k0 = kb;
        }
        Ok(Lu { lu: a, perm, swaps })
    }

    /// `(ln|det|, arg det)`.
    pub fn log_det(&self) -> (f64, f64) {
        let n = self.lu.n;
        let mut log_abs = 0.0;
        let mut phase = if self.swaps % 2 == 1 { std::f64::consts::PI } else { 0.0 };
        for i in 0..n {
            let d = self.lu.data[i * n + i];
            log_abs += d.norm().ln();
            phase += d.arg();
        }
        let phase = (phase + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
            - std::f64::consts::PI;
        (log_abs, phase)
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu.data[i * n..i * n + i];
            let s: Complex64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu.data[i * n + i + 1..(i + 1) * n];
            let s: Complex64 = row.iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / self.lu.data[i * n + i];
        }
        x
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
