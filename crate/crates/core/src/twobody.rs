//! The BX pair: a well of depth `v0` at x = 1/2 and a barrier of height
//! `alpha * v0` at x = -1/2, both zero range.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::roots::brent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub v0: f64,
    pub alpha: f64,
}

impl PotentialParams {
    pub fn new(v0: f64, alpha: f64) -> Result<Self> {
        if !(v0.is_finite() && v0 > 0.0) {
            return domain(format!("v0 must be positive and finite, got {v0}"));
        }
        if !alpha.is_finite() {
            return domain(format!("alpha must be finite, got {alpha}"));
        }
        Ok(PotentialParams { v0, alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    Bound,
    Virtual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoBodyState {
    pub kappa: f64,
    pub energy: f64,
    pub kind: StateKind,
}

impl TwoBodyState {
    fn from_kappa(kappa: f64) -> Self {
        TwoBodyState {
            kappa,
            energy: -0.5 * kappa * kappa,
            kind: if kappa > 0.0 { StateKind::Bound } else { StateKind::Virtual },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
}

impl Region {
    /// (bound, virtual) counts.
    pub fn state_counts(self) -> (usize, usize) {
        match self {
            Region::I => (0, 1),
            Region::II => (1, 0),
            Region::III => (1, 1),
            Region::IV => (2, 0),
        }
    }
}

pub fn alpha_critical(v0: f64) -> Result<f64> {
    if !(v0 > 0.0) {
        return domain(format!("v0 must be positive, got {v0}"));
    }
    if v0 == 0.5 {
        return Err(Error::PoleAtHalf);
    }
    Ok(1.0 / (1.0 - 2.0 * v0))
}

pub fn region_of(params: PotentialParams) -> Result<Region> {
    let PotentialParams { v0, alpha } = params;
    if v0 != 0.5 && alpha == alpha_critical(v0)? {
        return Err(Error::ThresholdBoundary { v0, alpha });
    }
    let region = if alpha >= 0.0 {
        if v0 < 0.5 && alpha > 1.0 / (1.0 - 2.0 * v0) {
            Region::I
        } else {
            Region::II
        }
    } else if v0 > 0.5 && alpha < 1.0 / (1.0 - 2.0 * v0) {
        Region::IV
    } else {
        Region::III
    };
    Ok(region)
}

/// `(k - v0)(k + v0 alpha) + v0^2 alpha e^{-2k}`.
pub fn transcendental(params: PotentialParams, kappa: f64) -> f64 {
    let PotentialParams { v0, alpha } = params;
    (kappa - v0) * (kappa + v0 * alpha) + v0 * v0 * alpha * (-2.0 * kappa).exp()
}

/// Residual of [`transcendental`] relative to the sum of its expanded terms' magnitudes.
pub fn relative_residual(params: PotentialParams, kappa: f64) -> f64 {
    let PotentialParams { v0, alpha } = params;
    let scale = kappa * kappa
        + (v0 * alpha * kappa).abs()
        + (v0 * kappa).abs()
        + (v0 * v0 * alpha).abs()
        + (v0 * v0 * alpha * (-2.0 * kappa).exp()).abs();
    if scale == 0.0 {
        0.0
    } else {
        transcendental(params, kappa).abs() / scale
    }
}

// transcendental / kappa, finite at kappa = 0
fn reduced(params: PotentialParams, kappa: f64) -> f64 {
    let PotentialParams { v0, alpha } = params;
    let h = if kappa == 0.0 {
        2.0
    } else {
        -(-2.0 * kappa).exp_m1() / kappa
    };
    kappa + v0 * (alpha - 1.0) - v0 * v0 * alpha * h
}

const SAMPLES_PER_DECADE: usize = 100;
const MAX_EXPANSIONS: usize = 64;

/// All nontrivial real roots of the transcendental equation, sorted by kappa.
pub fn solve_two_body(params: PotentialParams, tol: f64) -> Result<Vec<TwoBodyState>> {
    let params = PotentialParams::new(params.v0, params.alpha)?;
    if !(tol > 0.0) {
        return domain(format!("tol must be positive, got {tol}"));
    }
    let PotentialParams { v0, alpha } = params;
    let g = |k: f64| reduced(params, k);
    let kmin = 10.0 * tol;

    let mut kmax_pos = (4.0f64).max(4.0 * v0 * (1.0 + alpha.abs()));
    let mut n = 0;
    while g(kmax_pos) <= 0.0 {
        kmax_pos *= 2.0;
        n += 1;
        if n > MAX_EXPANSIONS {
            return Err(Error::Convergence {
                message: "positive bracket did not close".into(),
                lo: 0.0,
                hi: kmax_pos,
            });
        }
    }
    let mut kmax_neg = (4.0f64).max(4.0 * v0 * (1.0 + alpha.abs()));
    if alpha != 0.0 {
        let far = alpha.signum() * -1.0;
        let mut n = 0;
        while g(-kmax_neg).signum() != far {
            kmax_neg *= 2.0;
            n += 1;
            if n > MAX_EXPANSIONS {
                return Err(Error::Convergence {
                    message: "negative bracket did not close".into(),
                    lo: -kmax_neg,
                    hi: 0.0,
                });
            }
        }
    }

    let mut roots = Vec::new();
    for (side, kmax) in [(1.0, kmax_pos), (-1.0, kmax_neg)] {
        if kmax <= kmin {
            continue;
        }
        let decades = (kmax / kmin).log10();
        let n = (decades * SAMPLES_PER_DECADE as f64).ceil().max(2.0) as usize;
        let mut prev_k = side * kmin;
        let mut prev_g = g(prev_k);
        for i in 1..=n {
            let k = side * kmin * (kmax / kmin).powf(i as f64 / n as f64);
            let gk = g(k);
            if gk == 0.0 {
                roots.push(k);
            } else if prev_g != 0.0 && gk.signum() != prev_g.signum() {
                let (lo, hi, flo, fhi) = if prev_k < k {
                    (prev_k, k, prev_g, gk)
                } else {
                    (k, prev_k, gk, prev_g)
                };
                let root = brent(g, lo, hi, flo, fhi, 1e-15 * hi.abs().max(lo.abs()), 200)
                    .map_err(|(lo, hi)| Error::Convergence {
                        message: "two-body root refinement".into(),
                        lo,
                        hi,
                    })?;
                roots.push(root);
            }
            prev_k = k;
            prev_g = gk;
        }
    }
    roots.retain(|k| k.abs() >= kmin);
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for &k in &roots {
        let r = relative_residual(params, k);
        if r >= tol {
            return Err(Error::Convergence {
                message: format!("root {k} has residual {r:e}"),
                lo: k,
                hi: k,
            });
        }
    }
    let states: Vec<TwoBodyState> = roots.into_iter().map(TwoBodyState::from_kappa).collect();

    if let Ok(region) = region_of(params) {
        let bound = states.iter().filter(|s| s.kind == StateKind::Bound).count();
        let virt = states.len() - bound;
        if (bound, virt) != region.state_counts() {
            return Err(Error::Convergence {
                message: format!(
                    "found {bound} bound and {virt} virtual roots, region {region:?} expects {:?}",
                    region.state_counts()
                ),
                lo: -kmax_neg,
                hi: kmax_pos,
            });
        }
    }
    Ok(states)
}

/// Lowest dissociation energy, `min(E2, 0)`.
pub fn threshold(params: PotentialParams, tol: f64) -> Result<f64> {
    let states = solve_two_body(params, tol)?;
    Ok(states
        .iter()
        .filter(|s| s.kind == StateKind::Bound)
        .map(|s| s.energy)
        .fold(0.0, f64::min))
}

pub fn asymptotic_coefficient(v0: f64) -> f64 {
    let a = 1.0 - 2.0 * v0;
    -v0 * a * a / ((1.0 - v0).powi(2) + v0 * v0)
}

/// Leading quadratic behaviour of the two-body energy around alpha_c.
pub fn energy_asymptotic(params: PotentialParams) -> Result<f64> {
    let ac = alpha_critical(params.v0)?;
    let c1 = asymptotic_coefficient(params.v0);
    let d = params.alpha - ac;
    Ok(-0.5 * c1 * c1 * d * d)
}
