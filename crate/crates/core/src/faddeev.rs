//! Discretized Faddeev equations: kernel assembly, bound-state search and
//! eigenvectors.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{norm, CMatrix, Lu};
use crate::quadrature::gauss_legendre;
use crate::roots::brent;
use crate::separable::{SeparableEval, Term};
use crate::twobody::{self, PotentialParams};

/// Mass ratio `M/m` of boson to distinguishable particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassConfig {
    mass_ratio: f64,
}

impl MassConfig {
    pub fn new(mass_ratio: f64) -> Result<Self> {
        if !(mass_ratio.is_finite() && mass_ratio > 0.0) {
            return domain(format!("mass ratio must be positive, got {mass_ratio}"));
        }
        Ok(MassConfig { mass_ratio })
    }

    pub fn mass_ratio(&self) -> f64 {
        self.mass_ratio
    }

    pub fn alpha_x(&self) -> f64 {
        let r = self.mass_ratio;
        (1.0 + 2.0 * r) / (2.0 * (1.0 + r))
    }

    pub fn alpha_y(&self) -> f64 {
        2.0 / (1.0 + self.mass_ratio)
    }

    pub fn beta(&self) -> f64 {
        let r = self.mass_ratio;
        r / (1.0 + r)
    }

    /// Coefficient of `p^2` in the spectator-shifted pair energy.
    pub fn spectator_coefficient(&self) -> f64 {
        0.5 * self.alpha_x() * self.alpha_y()
    }
}

/// Gauss-Legendre rule mapped onto the real line by `p = L t / (1 - t^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub map_scale: f64,
}

impl MomentumGrid {
    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    /// `|sum w exp(-p^2)/sqrt(pi) - 1|`.
    pub fn gaussian_self_check(&self) -> f64 {
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * (-p * p).exp())
            .sum();
        (s / PI.sqrt() - 1.0).abs()
    }

    pub fn min_abs_node(&self) -> f64 {
        self.nodes.iter().fold(f64::INFINITY, |m, p| m.min(p.abs()))
    }
}

pub fn build_grid(n_points: usize, map_scale: f64) -> Result<MomentumGrid> {
    if n_points < 8 || n_points % 2 != 0 {
        return domain(format!("grid needs an even number of points >= 8, got {n_points}"));
    }
    if !(map_scale.is_finite() && map_scale > 0.0) {
        return domain(format!("map scale must be positive, got {map_scale}"));
    }
    let (t, w) = gauss_legendre(n_points);
    let mut nodes = Vec::with_capacity(n_points);
    let mut weights = Vec::with_capacity(n_points);
    for (t, w) in t.into_iter().zip(w) {
        let s = 1.0 - t * t;
        nodes.push(map_scale * t / s);
        weights.push(w * map_scale * (1.0 + t * t) / (s * s));
    }
    for i in 0..n_points / 2 {
        let j = n_points - 1 - i;
        let p = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -p;
        nodes[j] = p;
    }
    Ok(MomentumGrid { nodes, weights, map_scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExchangeSign {
    Boson,
    Fermion,
}

impl ExchangeSign {
    pub fn value(self) -> f64 {
        match self {
            ExchangeSign::Boson => 1.0,
            ExchangeSign::Fermion => -1.0,
        }
    }
}

/// `sign * W` with 2x2 blocks ordered (Minus, Plus).
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub n: usize,
    pub matrix: CMatrix,
    pub energy: f64,
    pub exchange_sign: ExchangeSign,
    /// Largest propagator denominator met during assembly (always negative).
    pub max_denominator: f64,
}

impl KernelMatrix {
    pub fn block_entry(&self, lambda: Term, nu: Term, i: usize, j: usize) -> Complex64 {
        self.matrix
            .get(lambda.index() * self.n + i, nu.index() * self.n + j)
    }
}

/// Everything needed to evaluate kernel rows at arbitrary `p`.
#[derive(Debug, Clone)]
pub(crate) struct KernelContext {
    pub params: PotentialParams,
    pub masses: MassConfig,
    pub grid: MomentumGrid,
    pub energy: f64,
    pub sign: f64,
    pub column_evals: Vec<SeparableEval>,
}

impl KernelContext {
    pub fn new(
        params: PotentialParams,
        masses: MassConfig,
        grid: &MomentumGrid,
        energy: f64,
        exchange_sign: ExchangeSign,
        tol: f64,
    ) -> Result<Self> {
        let thr = twobody::threshold(params, tol)?;
        if !(energy < thr) {
            return Err(Error::InternalDomain(format!(
                "kernel energy {energy} is not below threshold {thr}"
            )));
        }
        let c = masses.spectator_coefficient();
        let column_evals = grid
            .nodes
            .iter()
            .map(|q| SeparableEval::new(params, energy - c * q * q))
            .collect::<Result<Vec<_>>>()?;
        Ok(KernelContext {
            params,
            masses,
            grid: grid.clone(),
            energy,
            sign: exchange_sign.value(),
            column_evals,
        })
    }

    /// Fills `out[lambda][nu][j]` with `sign * w_j/2pi * K(p, q_j)`; returns
    /// the largest denominator.
    pub fn row(&self, p: f64, eval_p: &SeparableEval, lambdas: &[Term], out: &mut [Vec<Complex64>; 4]) -> f64 {
        let beta = self.masses.beta();
        let mut max_den = f64::NEG_INFINITY;
        let e = self.energy;
        for (j, (&q, &w)) in self.grid.nodes.iter().zip(&self.grid.weights).enumerate() {
            let den = e - 0.5 * q * q - 0.5 * p * p - beta * p * q;
            max_den = max_den.max(den);
            let z1 = Complex64::from_polar(1.0, 0.5 * (q + beta * p));
            let z2 = Complex64::from_polar(1.0, 0.5 * (p + beta * q));
            let eq = &self.column_evals[j];
            let scale = self.sign * w / (2.0 * PI * den);
            for &lam in lambdas {
                let gl = eval_p.form_factor_with_phase(lam, z1);
                for nu in Term::ALL {
                    let gn = eq.form_factor_with_phase(nu, z2).conj();
                    out[lam.index() * 2 + nu.index()][j] = gl * gn * eq.tau(nu) * scale;
                }
            }
        }
        max_den
    }
}

pub fn assemble_kernel(
    params: PotentialParams,
    masses: MassConfig,
    grid: &MomentumGrid,
    energy: f64,
    exchange_sign: ExchangeSign,
) -> Result<KernelMatrix> {
    let ctx = KernelContext::new(params, masses, grid, energy, exchange_sign, DEFAULT_TWO_BODY_TOL)?;
    assemble_from_context(&ctx)
}

fn assemble_from_context(ctx: &KernelContext) -> Result<KernelMatrix> {
    let n = ctx.grid.n_points();
    let mut m = CMatrix::zeros(2 * n);
    let dens: Vec<f64> = m
        .data
        .par_chunks_mut(2 * n)
        .enumerate()
        .map(|(r, row)| {
            let lam = if r < n { Term::Minus } else { Term::Plus };
            let i = r % n;
            let mut buf: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); n]);
            let d = ctx.row(ctx.grid.nodes[i], &ctx.column_evals[i], &[lam], &mut buf);
            for nu in Term::ALL {
                row[nu.index() * n..(nu.index() + 1) * n]
                    .copy_from_slice(&buf[lam.index() * 2 + nu.index()]);
            }
            d
        })
        .collect();
    let max_den = dens.into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !(max_den < 0.0) {
        return Err(Error::InternalDomain(format!(
            "non-negative kernel denominator {max_den} at energy {}",
            ctx.energy
        )));
    }
    if m.data.iter().any(|z| !z.is_finite()) {
        return Err(Error::InternalDomain(format!("non-finite kernel entry at energy {}", ctx.energy)));
    }
    Ok(KernelMatrix {
        n,
        matrix: m,
        energy: ctx.energy,
        exchange_sign: if ctx.sign > 0.0 { ExchangeSign::Boson } else { ExchangeSign::Fermion },
        max_denominator: max_den,
    })
}

fn shifted_lu(kernel: &KernelMatrix) -> Result<Lu> {
    let mut a = kernel.matrix.clone();
    let n = a.n;
    for i in 0..n {
        a.data[i * n + i] -= 1.0;
    }
    Lu::factor(a)
}

/// `det(sign W - I)` in log-polar form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicValue {
    pub log_abs: f64,
    pub phase: f64,
}

impl CharacteristicValue {
    /// Real part of the determinant divided by `exp(log_ref)`.
    pub fn scaled_real(&self, log_ref: f64) -> f64 {
        let v = self.phase.cos() * (self.log_abs - log_ref).min(700.0).exp();
        if self.log_abs == f64::NEG_INFINITY {
            0.0
        } else {
            v
        }
    }

    pub fn value(&self) -> f64 {
        self.scaled_real(0.0)
    }

    pub fn sign(&self) -> f64 {
        if self.log_abs == f64::NEG_INFINITY {
            0.0
        } else {
            self.phase.cos().signum()
        }
    }

    /// `|Im det| / |det|`.
    pub fn imag_ratio(&self) -> f64 {
        self.phase.sin().abs()
    }
}

pub fn characteristic_value(kernel: &KernelMatrix) -> Result<CharacteristicValue> {
    let lu = shifted_lu(kernel)?;
    let (log_abs, phase) = lu.log_det();
    Ok(CharacteristicValue { log_abs, phase })
}

fn start_vector(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| Complex64::new(1.0 + 0.5 * ((i as f64) * 0.7).sin(), 0.0))
        .collect()
}

// power iteration on (W - I)^{-1}; returns (eigenvalue of W nearest 1, vector)
fn inverse_iteration(lu: &Lu, n: usize, iterations: usize) -> (Complex64, Vec<Complex64>) {
    let mut x = start_vector(n);
    let nx = norm(&x);
    x.iter_mut().for_each(|z| *z /= nx);
    let mut mu = Complex64::new(0.0, 0.0);
    for _ in 0..iterations {
        let y = lu.solve(&x);
        mu = x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
        let ny = norm(&y);
        if !(ny.is_finite() && ny > 0.0) {
            break;
        }
        x = y.into_iter().map(|z| z / ny).collect();
    }
    let lambda = if mu.norm() > 0.0 {
        Complex64::new(1.0, 0.0) + mu.inv()
    } else {
        Complex64::new(f64::INFINITY, 0.0)
    };
    (lambda, x)
}

pub const DEFAULT_TWO_BODY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSettings {
    pub exchange_sign: ExchangeSign,
    /// Lowest energy scanned; `None` picks ten times the single-well energy.
    pub search_floor: Option<f64>,
    /// Coarse ladder density.
    pub samples_per_decade: usize,
    /// Sub-intervals inserted where the eigenvalue of W nearest 1 comes close.
    pub refine_factor: usize,
    /// `|lambda - 1|` below which a ladder interval is subdivided.
    pub refine_window: f64,
    /// Relative distance kept from the two-body threshold.
    pub edge_epsilon: f64,
    /// Scan stops at `-ir_guard_factor * c * p_min^2` when the threshold is near zero.
    pub ir_guard_factor: f64,
    pub energy_rtol: f64,
    pub residual_tol: f64,
    pub two_body_tol: f64,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        SpectrumSettings {
            exchange_sign: ExchangeSign::Boson,
            search_floor: None,
            samples_per_decade: 20,
            refine_factor: 10,
            refine_window: 0.1,
            edge_epsilon: 1e-8,
            ir_guard_factor: 10.0,
            energy_rtol: 1e-10,
            residual_tol: 1e-6,
            two_body_tol: DEFAULT_TWO_BODY_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanSample {
    pub energy: f64,
    pub log_abs: f64,
    pub phase: f64,
    /// Eigenvalue of `sign W` closest to 1.
    pub nearest_eigenvalue: [f64; 2],
}

impl ScanSample {
    fn sign(&self) -> f64 {
        CharacteristicValue { log_abs: self.log_abs, phase: self.phase }.sign()
    }

    fn eig_distance(&self) -> f64 {
        Complex64::new(self.nearest_eigenvalue[0] - 1.0, self.nearest_eigenvalue[1]).norm()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundState {
    pub energy: f64,
    /// Nodal values of (phi_minus, phi_plus).
    pub phi: [Vec<Complex64>; 2],
    pub residual: f64,
    /// Set when the state sits within one edge gap of the scan top.
    pub near_edge: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub params: PotentialParams,
    pub masses: MassConfig,
    pub grid: MomentumGrid,
    pub settings: SpectrumSettings,
    /// Sorted ascending.
    pub states: Vec<BoundState>,
    pub threshold: f64,
    pub scan_top: f64,
    pub search_floor: f64,
    /// True when the infrared guard, not the threshold, set the scan top.
    pub ir_guard_active: bool,
    pub diagnostics: Vec<ScanSample>,
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    /// Largest `|Im det| / |det|` seen on the ladder.
    pub fn max_imag_ratio(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|s| s.phase.sin().abs())
            .fold(0.0, f64::max)
    }
}

pub fn default_search_floor(params: PotentialParams) -> f64 {
    -5.0 * params.v0 * params.v0
}

/// Scan window `(threshold, top, ir_guard_active)`.
pub fn scan_window(
    params: PotentialParams,
    masses: MassConfig,
    grid: &MomentumGrid,
    settings: &SpectrumSettings,
) -> Result<(f64, f64, bool)> {
    let thr = twobody::threshold(params, settings.two_body_tol)?;
    let edge = thr - settings.edge_epsilon * thr.abs();
    let pmin = grid.min_abs_node();
    let guard = -settings.ir_guard_factor * masses.spectator_coefficient() * pmin * pmin;
    if guard < edge {
        Ok((thr, guard, true))
    } else {
        Ok((thr, edge, false))
    }
}

struct Solver<'a> {
    params: PotentialParams,
    masses: MassConfig,
    grid: &'a MomentumGrid,
    settings: SpectrumSettings,
}

impl<'a> Solver<'a> {
    fn context(&self, energy: f64) -> Result<KernelContext> {
        KernelContext::new(
            self.params,
            self.masses,
            self.grid,
            energy,
            self.settings.exchange_sign,
            self.settings.two_body_tol,
        )
    }

    fn lu_at(&self, energy: f64) -> Result<(KernelMatrix, std::result::Result<Lu, Error>)> {
        let k = assemble_from_context(&self.context(energy)?)?;
        let lu = shifted_lu(&k);
        Ok((k, lu))
    }

    fn sample(&self, energy: f64) -> Result<ScanSample> {
        let (k, lu) = self.lu_at(energy)?;
        match lu {
            Ok(lu) => {
                let (log_abs, phase) = lu.log_det();
                let (lambda, _) = inverse_iteration(&lu, 2 * k.n, 4);
                Ok(ScanSample {
                    energy,
                    log_abs,
                    phase,
                    nearest_eigenvalue: [lambda.re, lambda.im],
                })
            }
            Err(Error::SingularFactorization { .. }) => Ok(ScanSample {
                energy,
                log_abs: f64::NEG_INFINITY,
                phase: 0.0,
                nearest_eigenvalue: [1.0, 0.0],
            }),
            Err(e) => Err(e),
        }
    }

    fn value(&self, energy: f64, log_ref: f64) -> f64 {
        match self.lu_at(energy) {
            Ok((_, Ok(lu))) => {
                let (log_abs, phase) = lu.log_det();
                CharacteristicValue { log_abs, phase }.scaled_real(log_ref)
            }
            Ok((_, Err(Error::SingularFactorization { .. }))) => 0.0,
            _ => f64::NAN,
        }
    }

    /// Lowest ladder point, pushed down until the far-side sign is reached.
    fn resolve_floor(&self, thr: f64, top: f64) -> Result<(f64, ScanSample)> {
        let mut floor = self
            .settings
            .search_floor
            .unwrap_or_else(|| default_search_floor(self.params).min(2.0 * thr));
        if !(floor < top) {
            return domain(format!("search floor {floor} is not below scan top {top}"));
        }
        let mut bottom = self.sample(floor)?;
        let mut extensions = 0;
        while bottom.sign() < 0.0 {
            if extensions == FLOOR_EXTENSIONS {
                return Err(Error::Convergence {
                    message: "characteristic value keeps its far sign below every floor tried".into(),
                    lo: floor,
                    hi: top,
                });
            }
            floor = thr + 4.0 * (floor - thr);
            bottom = self.sample(floor)?;
            extensions += 1;
        }
        Ok((floor, bottom))
    }

    fn refine(&self, lo: &ScanSample, hi: &ScanSample) -> Result<f64> {
        if lo.sign() == 0.0 {
            return Ok(lo.energy);
        }
        if hi.sign() == 0.0 {
            return Ok(hi.energy);
        }
        let log_ref = lo.log_abs;
        let flo = CharacteristicValue { log_abs: lo.log_abs, phase: lo.phase }.scaled_real(log_ref);
        let fhi = CharacteristicValue { log_abs: hi.log_abs, phase: hi.phase }.scaled_real(log_ref);
        let xtol = self.settings.energy_rtol * lo.energy.abs().min(hi.energy.abs());
        brent(|e| self.value(e, log_ref), lo.energy, hi.energy, flo, fhi, xtol, 200).map_err(
            |(a, b)| Error::Convergence {
                message: "energy root refinement stalled".into(),
                lo: a,
                hi: b,
            },
        )
    }

    fn bound_state(&self, energy: f64, top: f64, thr: f64) -> Result<BoundState> {
        let (k, lu) = self.lu_at(energy)?;
        let n2 = 2 * k.n;
        let v = match lu {
            Ok(lu) => inverse_iteration(&lu, n2, 6).1,
            Err(Error::SingularFactorization { .. }) => {
                let mut nudged = k.clone();
                for i in 0..n2 {
                    let d = nudged.matrix.get(i, i);
                    nudged.matrix.set(i, i, d * (1.0 + 1e-14));
                }
                inverse_iteration(&shifted_lu(&nudged)?, n2, 6).1
            }
            Err(e) => return Err(e),
        };
        let v = fix_phase(v);
        let wv = k.matrix.mul_vec(&v);
        let diff: Vec<Complex64> = wv.iter().zip(&v).map(|(a, b)| a - b).collect();
        let residual = norm(&diff) / norm(&v);
        if !(residual < self.settings.residual_tol) {
            return Err(Error::Convergence {
                message: format!("eigenvector residual {residual:e} at energy {energy}"),
                lo: energy,
                hi: energy,
            });
        }
        let n = k.n;
        Ok(BoundState {
            energy,
            phi: [v[..n].to_vec(), v[n..].to_vec()],
            residual,
            near_edge: energy > top - (thr - top),
        })
    }
}

fn fix_phase(v: Vec<Complex64>) -> Vec<Complex64> {
    let big = v
        .iter()
        .copied()
        .fold(Complex64::new(0.0, 0.0), |m, z| if z.norm() > m.norm() { z } else { m });
    let rot = big.conj() / big.norm();
    let nv = norm(&v);
    v.into_iter().map(|z| z * rot / nv).collect()
}

fn ladder(thr: f64, floor: f64, top: f64, per_decade: usize) -> Vec<f64> {
    let d0 = thr - floor;
    let d1 = thr - top;
    let decades = (d0 / d1).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(2);
    (0..=n)
        .map(|i| {
            if i == n {
                top
            } else if i == 0 {
                floor
            } else {
                thr - d0 * (d1 / d0).powf(i as f64 / n as f64)
            }
        })
        .collect()
}

const FLOOR_EXTENSIONS: usize = 6;

pub fn find_spectrum(
    params: PotentialParams,
    masses: MassConfig,
    grid: &MomentumGrid,
    settings: &SpectrumSettings,
) -> Result<SpectrumResult> {
    let params = PotentialParams::new(params.v0, params.alpha)?;
    if params.alpha < 0.0 {
        return domain("three-body solver covers alpha >= 0 (regions I and II)");
    }
    if settings.samples_per_decade == 0 || settings.refine_factor == 0 {
        return domain("ladder densities must be positive");
    }
    let (thr, top, guarded) = scan_window(params, masses, grid, settings)?;
    let solver = Solver { params, masses, grid, settings: *settings };
    let (floor, bottom) = solver.resolve_floor(thr, top)?;

    let energies = ladder(thr, floor, top, settings.samples_per_decade);
    let mut samples: Vec<ScanSample> = energies[1..]
        .par_iter()
        .map(|&e| solver.sample(e))
        .collect::<Result<Vec<_>>>()?;
    samples.insert(0, bottom);

    let dist: Vec<f64> = samples.iter().map(ScanSample::eig_distance).collect();
    let local_min = |i: usize| {
        (i == 0 || dist[i] <= dist[i - 1]) && (i + 1 == dist.len() || dist[i] <= dist[i + 1])
    };
    let mut extra = Vec::new();
    for (i, w) in samples.windows(2).enumerate() {
        if w[0].sign() != w[1].sign() {
            continue;
        }
        let close = dist[i].min(dist[i + 1]) < settings.refine_window;
        if close && (local_min(i) || local_min(i + 1)) {
            let m = settings.refine_factor;
            for s in 1..m {
                let e = w[0].energy + (w[1].energy - w[0].energy) * s as f64 / m as f64;
                extra.push(e);
            }
        }
    }
    if !extra.is_empty() {
        let more = extra
            .par_iter()
            .map(|&e| solver.sample(e))
            .collect::<Result<Vec<_>>>()?;
        samples.extend(more);
        samples.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    }

    let mut roots = Vec::new();
    for w in samples.windows(2) {
        if w[0].sign() == 0.0 {
            roots.push(w[0].energy);
        } else if w[1].sign() != 0.0 && w[0].sign() != w[1].sign() {
            roots.push(solver.refine(&w[0], &w[1])?);
        }
    }
    roots.dedup();
    let states = roots
        .par_iter()
        .map(|&e| solver.bound_state(e, top, thr))
        .collect::<Result<Vec<_>>>()?;

    Ok(SpectrumResult {
        params,
        masses,
        grid: grid.clone(),
        settings: *settings,
        states,
        threshold: thr,
        scan_top: top,
        search_floor: floor,
        ir_guard_active: guarded,
        diagnostics: samples,
    })
}

/// True when the characteristic value changes sign an odd number of times
/// between the search floor and the scan top. Costs two samples.
pub fn odd_root_count(
    params: PotentialParams,
    masses: MassConfig,
    grid: &MomentumGrid,
    settings: &SpectrumSettings,
) -> Result<bool> {
    let params = PotentialParams::new(params.v0, params.alpha)?;
    if params.alpha < 0.0 {
        return domain("three-body solver covers alpha >= 0 (regions I and II)");
    }
    let (thr, top, _) = scan_window(params, masses, grid, settings)?;
    let solver = Solver { params, masses, grid, settings: *settings };
    let (_, bottom) = solver.resolve_floor(thr, top)?;
    let upper = solver.sample(top)?;
    Ok(upper.sign() != bottom.sign())
}

/// Re-locates known roots on another grid by local bracketing.
pub fn track_roots(
    params: PotentialParams,
    masses: MassConfig,
    grid: &MomentumGrid,
    guesses: &[f64],
    settings: &SpectrumSettings,
) -> Result<Vec<f64>> {
    let (thr, top, _) = scan_window(params, masses, grid, settings)?;
    let solver = Solver { params, masses, grid, settings: *settings };
    let mut out = Vec::with_capacity(guesses.len());
    for &g in guesses {
        let mut delta = 1e-3;
        let mut found = None;
        while delta < 0.5 {
            let lo_e = thr + (g - thr) * (1.0 + delta);
            let hi_e = (thr + (g - thr) * (1.0 - delta)).min(top);
            let lo = solver.sample(lo_e)?;
            let hi = solver.sample(hi_e)?;
            if lo.sign() != hi.sign() || lo.sign() == 0.0 || hi.sign() == 0.0 {
                found = Some(solver.refine(&lo, &hi)?);
                break;
            }
            delta *= 2.0;
        }
        match found {
            Some(e) => out.push(e),
            None => {
                return Err(Error::Convergence {
                    message: format!("no sign change near {g}"),
                    lo: thr + (g - thr) * (1.0 + delta),
                    hi: thr + (g - thr) * (1.0 - delta),
                })
            }
        }
    }
    Ok(out)
}

/// Nearest eigenvalue of `sign W` to 1 at one energy.
pub fn nearest_eigenvalue(kernel: &KernelMatrix) -> Result<Complex64> {
    let lu = shifted_lu(kernel)?;
    Ok(inverse_iteration(&lu, 2 * kernel.n, 8).0)
}
