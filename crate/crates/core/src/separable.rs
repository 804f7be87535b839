//! Two-term separable expansion of the BX off-shell t-matrix below threshold.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::twobody::PotentialParams;

/// `|eta - 1|` below this is treated as sitting on the tau pole.
pub const POLE_GUARD: f64 = 1e-13;
/// Terms with `|eta|` below this are identically zero.
pub const DEGENERATE_ETA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Term {
    Minus,
    Plus,
}

impl Term {
    pub const ALL: [Term; 2] = [Term::Minus, Term::Plus];

    pub fn index(self) -> usize {
        match self {
            Term::Minus => 0,
            Term::Plus => 1,
        }
    }
}

// g(k) = c (a e^{ik/2} - b e^{-ik/2})
#[derive(Debug, Clone, Copy)]
struct Coeffs {
    c: Complex64,
    a: Complex64,
    b: Complex64,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy)]
struct Raw {
    kappa: f64,
    eta: [Complex64; 2],
    p: [Complex64; 2],
}

fn split_pair(sum: Complex64, s: Complex64, product: Complex64) -> (Complex64, Complex64) {
    // roots sum - s and sum + s of a quadratic with known product, without cancellation
    let lo = sum - s;
    let hi = sum + s;
    if hi.norm() >= lo.norm() {
        let lo = if hi == ZERO { ZERO } else { product / hi };
        (lo, hi)
    } else {
        (lo, product / lo)
    }
}

fn raw(params: PotentialParams, energy: f64) -> Result<Raw> {
    if !(energy < 0.0) {
        return domain(format!("separable expansion needs energy < 0, got {energy}"));
    }
    let PotentialParams { v0, alpha } = params;
    let kappa = (-2.0 * energy).sqrt();
    let em2k = (-2.0 * kappa).exp();
    let one_minus = -(-2.0 * kappa).exp_m1();
    let radicand = if alpha < 0.0 {
        (1.0 + alpha).powi(2) - 4.0 * alpha * em2k
    } else {
        (1.0 - alpha).powi(2) + 4.0 * alpha * one_minus
    };
    let s = Complex64::new(radicand, 0.0).sqrt();

    // 1 - alpha -+ S, product -4 alpha (1 - e^{-2k})
    let (um, up) = split_pair(
        Complex64::new(1.0 - alpha, 0.0),
        s,
        Complex64::new(-4.0 * alpha * one_minus, 0.0),
    );
    let scale = v0 / (2.0 * kappa);
    let eta = [um * scale, up * scale];

    // 2 P_+ = 1 + alpha - S, 2 P_- = 1 + alpha + S, product 4 alpha e^{-2k}
    let (pp2, pm2) = split_pair(
        Complex64::new(1.0 + alpha, 0.0),
        s,
        Complex64::new(4.0 * alpha * em2k, 0.0),
    );
    Ok(Raw {
        kappa,
        eta,
        p: [pm2 * 0.5, pp2 * 0.5],
    })
}

fn coeffs(v0: f64, kappa: f64, eta: Complex64, p: Complex64) -> Coeffs {
    if eta.norm() < DEGENERATE_ETA {
        return Coeffs { c: ZERO, a: ZERO, b: ZERO };
    }
    let sgn = (Complex64::new(v0, 0.0) / eta) * (eta / v0).norm();
    let root_k = kappa.sqrt();
    let log_abs_a = kappa + p.norm().ln();
    if log_abs_a <= 0.0 {
        let a = if p == ZERO { ZERO } else { p * kappa.exp() };
        let d = a * a - p * 2.0 + 1.0;
        Coeffs {
            c: sgn * root_k / d.sqrt(),
            a,
            b: Complex64::new(1.0, 0.0),
        }
    } else {
        let inv_a = (-kappa).exp() / p;
        let x = (Complex64::new(1.0, 0.0) - (p * 2.0 - 1.0) * inv_a * inv_a).sqrt();
        let phase = p / p.norm();
        let dir = phase * x;
        let sigma = if dir.re < 0.0 { -1.0 } else { 1.0 };
        Coeffs {
            c: sgn * root_k * phase / (dir * sigma),
            a: Complex64::new(1.0, 0.0),
            b: inv_a,
        }
    }
}

/// eta, tau and P for both terms at one energy, plus the form-factor
/// coefficients.
#[derive(Debug, Clone, Copy)]
pub struct SeparableEval {
    pub energy: f64,
    pub kappa: f64,
    pub eta: [Complex64; 2],
    pub tau: [Complex64; 2],
    pub p_factor: [Complex64; 2],
    coeffs: [Coeffs; 2],
}

impl SeparableEval {
    pub fn new(params: PotentialParams, energy: f64) -> Result<Self> {
        let r = raw(params, energy)?;
        let mut tau = [ZERO; 2];
        for i in 0..2 {
            tau[i] = tau_of(r.eta[i])?;
        }
        Ok(SeparableEval {
            energy,
            kappa: r.kappa,
            eta: r.eta,
            tau,
            p_factor: r.p,
            coeffs: [
                coeffs(params.v0, r.kappa, r.eta[0], r.p[0]),
                coeffs(params.v0, r.kappa, r.eta[1], r.p[1]),
            ],
        })
    }

    #[inline]
    pub fn form_factor(&self, term: Term, k: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, 0.5 * k);
        self.form_factor_with_phase(term, z)
    }

    /// Form factor given `z = e^{ik/2}`.
    #[inline]
    pub fn form_factor_with_phase(&self, term: Term, z: Complex64) -> Complex64 {
        let c = &self.coeffs[term.index()];
        c.c * (c.a * z - c.b * z.conj())
    }

    #[inline]
    pub fn tau(&self, term: Term) -> Complex64 {
        self.tau[term.index()]
    }

    #[inline]
    pub fn eta(&self, term: Term) -> Complex64 {
        self.eta[term.index()]
    }
}

fn tau_of(eta: Complex64) -> Result<Complex64> {
    if eta.norm() < DEGENERATE_ETA {
        return Ok(ZERO);
    }
    let d = eta - 1.0;
    if d.norm() < POLE_GUARD {
        return Err(Error::PoleProximity { eta });
    }
    Ok(eta / d)
}

pub fn eta(params: PotentialParams, term: Term, energy: f64) -> Result<Complex64> {
    Ok(raw(params, energy)?.eta[term.index()])
}

pub fn p_factor(params: PotentialParams, term: Term, energy: f64) -> Result<Complex64> {
    Ok(raw(params, energy)?.p[term.index()])
}

pub fn tau(params: PotentialParams, term: Term, energy: f64) -> Result<Complex64> {
    tau_of(eta(params, term, energy)?)
}

pub fn form_factor(params: PotentialParams, term: Term, k: f64, energy: f64) -> Result<Complex64> {
    let r = raw(params, energy)?;
    let i = term.index();
    let c = coeffs(params.v0, r.kappa, r.eta[i], r.p[i]);
    let z = Complex64::from_polar(1.0, 0.5 * k);
    Ok(c.c * (c.a * z - c.b * z.conj()))
}

/// `sum_nu tau_nu g*_nu(k) g_nu(k')`.
pub fn t_matrix(params: PotentialParams, k: f64, k_prime: f64, energy: f64) -> Result<Complex64> {
    let ev = SeparableEval::new(params, energy)?;
    Ok(Term::ALL
        .iter()
        .map(|&t| ev.tau(t) * ev.form_factor(t, k).conj() * ev.form_factor(t, k_prime))
        .sum())
}

/// `v(k, k')` of the double-delta pair.
pub fn potential(params: PotentialParams, k: f64, k_prime: f64) -> Complex64 {
    let q = 0.5 * (k - k_prime);
    -(Complex64::from_polar(1.0, -q) - Complex64::from_polar(params.alpha, q)) * params.v0
}

/// `int dk/2pi 1/(E - k^2/2)`.
pub fn propagator_integral(energy: f64) -> Result<f64> {
    if !(energy < 0.0) {
        return domain("propagator integral needs energy < 0");
    }
    Ok(-1.0 / (-2.0 * energy).sqrt())
}

/// `int dk/2pi e^{ik}/(E - k^2/2)`.
pub fn shifted_propagator_integral(energy: f64) -> Result<f64> {
    if !(energy < 0.0) {
        return domain("propagator integral needs energy < 0");
    }
    let k = (-2.0 * energy).sqrt();
    Ok(-(-k).exp() / k)
}
