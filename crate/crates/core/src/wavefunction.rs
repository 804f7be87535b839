//! Faddeev component, momentum-space wave function and its Fourier
//! transform to Jacobi coordinates.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faddeev::{BoundState, KernelContext, MassConfig, SpectrumResult};
use crate::separable::{SeparableEval, Term};
use crate::twobody::PotentialParams;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `Phi(k, p) = sum_nu conj(g_nu(k, E_p)) tau_nu(E_p) phi_nu(p)`.
#[derive(Debug, Clone)]
pub struct FaddeevComponentField {
    ctx: KernelContext,
    phi: [Vec<Complex64>; 2],
    pub energy: f64,
    pub residual: f64,
}

pub fn faddeev_component(state: &BoundState, spectrum: &SpectrumResult) -> Result<FaddeevComponentField> {
    if !(state.residual < spectrum.settings.residual_tol) {
        return Err(Error::Domain(format!(
            "state residual {:e} exceeds solver tolerance",
            state.residual
        )));
    }
    let ctx = KernelContext::new(
        spectrum.params,
        spectrum.masses,
        &spectrum.grid,
        state.energy,
        spectrum.settings.exchange_sign,
        spectrum.settings.two_body_tol,
    )?;
    Ok(FaddeevComponentField {
        ctx,
        phi: state.phi.clone(),
        energy: state.energy,
        residual: state.residual,
    })
}

impl FaddeevComponentField {
    pub fn params(&self) -> PotentialParams {
        self.ctx.params
    }

    pub fn masses(&self) -> MassConfig {
        self.ctx.masses
    }

    pub fn nodes(&self) -> &[f64] {
        &self.ctx.grid.nodes
    }

    pub fn nodal(&self, term: Term) -> &[Complex64] {
        &self.phi[term.index()]
    }

    fn shifted_eval(&self, p: f64) -> Result<SeparableEval> {
        let e = self.energy - self.ctx.masses.spectator_coefficient() * p * p;
        if !(e < 0.0) {
            return Err(Error::InternalDomain(format!("shifted energy {e} at p = {p}")));
        }
        SeparableEval::new(self.ctx.params, e)
    }

    fn phi_with(&self, p: f64, eval_p: &SeparableEval) -> [Complex64; 2] {
        let n = self.ctx.grid.n_points();
        let mut buf: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![ZERO; n]);
        self.ctx.row(p, eval_p, &Term::ALL, &mut buf);
        let mut out = [ZERO; 2];
        for lam in Term::ALL {
            for nu in Term::ALL {
                let row = &buf[lam.index() * 2 + nu.index()];
                out[lam.index()] += row
                    .iter()
                    .zip(&self.phi[nu.index()])
                    .map(|(a, b)| a * b)
                    .sum::<Complex64>();
            }
        }
        out
    }

    /// `phi_nu(p)` off the grid by one application of the kernel.
    pub fn phi_at(&self, p: f64) -> Result<[Complex64; 2]> {
        let ev = self.shifted_eval(p)?;
        Ok(self.phi_with(p, &ev))
    }

    fn combine(ev: &SeparableEval, phi: &[Complex64; 2], k: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, 0.5 * k);
        Term::ALL
            .iter()
            .map(|&t| ev.form_factor_with_phase(t, z).conj() * ev.tau(t) * phi[t.index()])
            .sum()
    }

    pub fn eval(&self, k: f64, p: f64) -> Result<Complex64> {
        let ev = self.shifted_eval(p)?;
        let phi = self.phi_with(p, &ev);
        Ok(Self::combine(&ev, &phi, k))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Momentum,
    Position,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    P1,
    K23,
    X1,
    Y23,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.value(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFieldGrid {
    pub space: Space,
    pub axis1: Axis,
    pub axis2: Axis,
    /// Row-major, `axis1` slowest.
    pub values: Vec<Complex64>,
    pub energy: f64,
    pub params: PotentialParams,
    pub masses: MassConfig,
    pub warnings: Vec<String>,
}

impl WaveFieldGrid {
    pub fn cell(&self) -> f64 {
        let m = if self.space == Space::Momentum { 1.0 / (4.0 * PI * PI) } else { 1.0 };
        self.axis1.step * self.axis2.step * m
    }

    /// `sum |psi|^2` times the cell measure (`dp dk/(2pi)^2` or `dx dy`).
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.axis2.len + j]
    }

    fn normalize(&mut self) {
        let n = self.norm().sqrt();
        if n > 0.0 {
            self.values.iter_mut().for_each(|z| *z /= n);
        }
    }

    /// Fraction of `|psi|^2` outside the central `keep` fraction of each axis.
    pub fn edge_fraction(&self, keep: f64) -> f64 {
        let (n1, n2) = (self.axis1.len, self.axis2.len);
        let c1 = 0.5 * (n1 as f64 - 1.0);
        let c2 = 0.5 * (n2 as f64 - 1.0);
        let h1 = 0.5 * keep * n1 as f64;
        let h2 = 0.5 * keep * n2 as f64;
        let mut total = 0.0;
        let mut outside = 0.0;
        for i in 0..n1 {
            for j in 0..n2 {
                let w = self.values[i * n2 + j].norm_sqr();
                total += w;
                if (i as f64 - c1).abs() > h1 || (j as f64 - c2).abs() > h2 {
                    outside += w;
                }
            }
        }
        if total > 0.0 {
            outside / total
        } else {
            0.0
        }
    }

    /// Largest `|psi(a, -b) - psi(a, b)|` over mirrored pairs, relative to `max |psi|`.
    pub fn evenness_defect(&self) -> f64 {
        let (n1, n2) = (self.axis1.len, self.axis2.len);
        let max = self.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for j in 0..n2 {
            let b = self.axis2.value(j);
            let mirror = ((-b - self.axis2.start) / self.axis2.step).round();
            if mirror < 0.0 || mirror >= n2 as f64 {
                continue;
            }
            let jm = mirror as usize;
            for i in 0..n1 {
                let d = (self.values[i * n2 + j] - self.values[i * n2 + jm]).norm();
                worst = worst.max(d);
            }
        }
        if max > 0.0 {
            worst / max
        } else {
            0.0
        }
    }
}

/// Momentum window and position spans of a sampled wave function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub p1_max: f64,
    pub k23_max: f64,
    pub x1_span: f64,
    pub y23_span: f64,
    pub x1_center: f64,
}

/// Smallest momentum half-width used by [`SamplingPlan::for_energy`].
pub const MIN_MOMENTUM_WINDOW: f64 = 4.0;

impl SamplingPlan {
    pub fn for_energy(energy: f64, masses: MassConfig) -> Self {
        let s1 = (-2.0 * energy / masses.alpha_x()).sqrt();
        let s2 = (-2.0 * energy / masses.alpha_y()).sqrt();
        SamplingPlan {
            p1_max: (8.0 * s1).max(MIN_MOMENTUM_WINDOW),
            k23_max: (8.0 * s2).max(MIN_MOMENTUM_WINDOW),
            x1_span: 2.0 * (2.0 + 7.0 / s1),
            y23_span: 2.0 * (2.0 + 7.0 / s2),
            x1_center: 0.0,
        }
    }

    pub fn doubled(&self) -> Self {
        SamplingPlan {
            x1_span: 2.0 * self.x1_span,
            y23_span: 2.0 * self.y23_span,
            ..*self
        }
    }

    /// `(dp1, ratio m, n1, n2)` with `dk23 = m dp1 / 2`; both counts odd so
    /// the axes are symmetric about zero.
    pub fn lattice(&self) -> (f64, usize, usize, usize) {
        let dp1 = 2.0 * PI / self.x1_span;
        let m = ((2.0 * self.x1_span / self.y23_span).round() as usize).max(1);
        let dk2 = m as f64 * dp1 / 2.0;
        let n1 = 2 * (self.p1_max / dp1).ceil() as usize + 1;
        let n2 = 2 * (self.k23_max / dk2).ceil() as usize + 1;
        (dp1, m, n1, n2)
    }
}

pub fn momentum_wavefunction(component: &FaddeevComponentField, plan: &SamplingPlan) -> Result<WaveFieldGrid> {
    let masses = component.masses();
    let (ax, ay) = (masses.alpha_x(), masses.alpha_y());
    let e = component.energy;
    let (dp1, m, n1, n2) = plan.lattice();
    let dk2 = m as f64 * dp1 / 2.0;
    let h = dp1 / 2.0;
    let h1 = (n1 / 2) as i64;
    let h2 = (n2 / 2) as i64;
    let lmax = h1 + m as i64 * h2;

    let cache: Vec<(SeparableEval, [Complex64; 2])> = (-lmax..=lmax)
        .into_par_iter()
        .map(|l| {
            let p = l as f64 * h;
            let ev = component.shifted_eval(p)?;
            let phi = component.phi_with(p, &ev);
            Ok((ev, phi))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values = vec![ZERO; n1 * n2];
    values.par_chunks_mut(n2).enumerate().for_each(|(i, row)| {
        let ii = i as i64 - h1;
        let p1 = ii as f64 * dp1;
        for (j, out) in row.iter_mut().enumerate() {
            let jj = j as i64 - h2;
            let k23 = jj as f64 * dk2;
            let la = (-ii + m as i64 * jj + lmax) as usize;
            let lb = (-ii - m as i64 * jj + lmax) as usize;
            let (eva, phia) = &cache[la];
            let (evb, phib) = &cache[lb];
            let ta = FaddeevComponentField::combine(eva, phia, -ax * p1 - 0.5 * ay * k23);
            let tb = FaddeevComponentField::combine(evb, phib, -ax * p1 + 0.5 * ay * k23);
            let g0 = 4.0 * PI * PI / (e - 0.5 * ax * p1 * p1 - 0.5 * ay * k23 * k23);
            *out = (ta + tb) * g0;
        }
    });

    let mut field = WaveFieldGrid {
        space: Space::Momentum,
        axis1: Axis { name: AxisName::P1, start: -(h1 as f64) * dp1, step: dp1, len: n1 },
        axis2: Axis { name: AxisName::K23, start: -(h2 as f64) * dk2, step: dk2, len: n2 },
        values,
        energy: e,
        params: component.params(),
        masses,
        warnings: Vec::new(),
    };
    field.normalize();
    let outer = field.edge_fraction(0.5);
    if outer > 0.01 {
        field.warnings.push(format!(
            "NormCoverage: {:.3e} of the momentum norm lies in the outer half of the window",
            outer
        ));
    }
    Ok(field)
}

/// Position-space result plus transform diagnostics.
#[derive(Debug, Clone)]
pub struct PositionTransform {
    pub field: WaveFieldGrid,
    /// `|norm_x - norm_p|` before renormalization.
    pub parseval_mismatch: f64,
    /// Norm outside the central 75% of the window.
    pub edge_fraction: f64,
}

pub const EDGE_KEEP: f64 = 0.75;
pub const ALIASING_LIMIT: f64 = 0.01;

/// Fourier transform with zero padding by `resolution`; errors when the
/// wrapped tails carry more than 1% of the norm.
pub fn position_wavefunction(
    momentum_field: &WaveFieldGrid,
    resolution: usize,
    x1_center: f64,
) -> Result<PositionTransform> {
    let t = transform(momentum_field, resolution, x1_center)?;
    if t.edge_fraction > ALIASING_LIMIT {
        let span = 2.0 * PI / momentum_field.axis1.step;
        return Err(Error::Aliasing { fraction: t.edge_fraction, suggested_span: 2.0 * span });
    }
    Ok(t)
}

pub(crate) fn transform(m: &WaveFieldGrid, resolution: usize, x1_center: f64) -> Result<PositionTransform> {
    if m.space != Space::Momentum {
        return Err(Error::Domain("transform expects a momentum-space field".into()));
    }
    if resolution == 0 {
        return Err(Error::Domain("resolution must be at least 1".into()));
    }
    let (n1, n2) = (m.axis1.len, m.axis2.len);
    let (big1, big2) = (n1 * resolution, n2 * resolution);
    let (c1, c2) = (big1 / 2, big2 / 2);
    let (o1, o2) = (c1 - n1 / 2, c2 - n2 / 2);
    let (dp, dk) = (m.axis1.step, m.axis2.step);
    // sum_n e^{i p_n x_m} with p_n = (n - c) dp, x_m = x_c + (m - c) dx
    let twiddle = |c: usize, big: usize, i: usize| {
        Complex64::from_polar(1.0, -2.0 * PI * ((c * i) % big) as f64 / big as f64)
    };
    let mut data = vec![ZERO; big1 * big2];
    let tw2: Vec<Complex64> = (0..big2).map(|j| twiddle(c2, big2, j)).collect();
    for i in 0..n1 {
        let ib = i + o1;
        let p = m.axis1.value(i);
        let ph1 = twiddle(c1, big1, ib) * Complex64::from_polar(1.0, p * x1_center);
        for j in 0..n2 {
            let jb = j + o2;
            data[ib * big2 + jb] = m.values[i * n2 + j] * ph1 * tw2[jb];
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let f2 = planner.plan_fft_inverse(big2);
    data.par_chunks_mut(big2).for_each(|row| f2.process(row));
    let f1 = planner.plan_fft_inverse(big1);
    let mut col = vec![ZERO; big1];
    for j in 0..big2 {
        for i in 0..big1 {
            col[i] = data[i * big2 + j];
        }
        f1.process(&mut col);
        for i in 0..big1 {
            data[i * big2 + j] = col[i];
        }
    }
    let base = Complex64::from_polar(
        dp * dk / (4.0 * PI * PI),
        2.0 * PI * (((c1 * c1) % big1) as f64 / big1 as f64 + ((c2 * c2) % big2) as f64 / big2 as f64),
    );
    for i in 0..big1 {
        let t1 = twiddle(c1, big1, i) * base;
        for j in 0..big2 {
            data[i * big2 + j] *= t1 * tw2[j];
        }
    }
    let dx = 2.0 * PI / (big1 as f64 * dp);
    let dy = 2.0 * PI / (big2 as f64 * dk);
    let mut field = WaveFieldGrid {
        space: Space::Position,
        axis1: Axis { name: AxisName::X1, start: x1_center - c1 as f64 * dx, step: dx, len: big1 },
        axis2: Axis { name: AxisName::Y23, start: -(c2 as f64) * dy, step: dy, len: big2 },
        values: data,
        energy: m.energy,
        params: m.params,
        masses: m.masses,
        warnings: m.warnings.clone(),
    };
    let parseval_mismatch = (field.norm() - m.norm()).abs();
    field.normalize();
    let edge_fraction = field.edge_fraction(EDGE_KEEP);
    Ok(PositionTransform { field, parseval_mismatch, edge_fraction })
}

/// Provenance block written next to every dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    space: Space,
    axis1: Axis,
    axis2: Axis,
    energy: f64,
    params: PotentialParams,
    masses: MassConfig,
    norm: f64,
    warnings: Vec<String>,
    provenance: Provenance,
}

pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes `csv_path` plus a JSON header at `csv_path.json`.
pub fn write_field(field: &WaveFieldGrid, csv_path: &Path, provenance: &Provenance) -> Result<()> {
    let side = Sidecar {
        space: field.space,
        axis1: field.axis1,
        axis2: field.axis2,
        energy: field.energy,
        params: field.params,
        masses: field.masses,
        norm: field.norm(),
        warnings: field.warnings.clone(),
        provenance: provenance.clone(),
    };
    let f = BufWriter::new(File::create(sidecar_path(csv_path))?);
    serde_json::to_writer_pretty(f, &side)?;
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(csv_path)?));
    let (an, bn) = axis_names(field.space);
    w.write_record([an, bn, "re", "im", "config_hash"])?;
    for i in 0..field.axis1.len {
        for j in 0..field.axis2.len {
            let z = field.values[i * field.axis2.len + j];
            w.write_record([
                sci(field.axis1.value(i)),
                sci(field.axis2.value(j)),
                sci(z.re),
                sci(z.im),
                provenance.config_hash.clone(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn axis_names(space: Space) -> (&'static str, &'static str) {
    match space {
        Space::Momentum => ("p1", "k23"),
        Space::Position => ("x1", "y23"),
    }
}

/// Scientific notation with 15 significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.14e}")
}

pub fn read_field(csv_path: &Path) -> Result<(WaveFieldGrid, Provenance)> {
    let side_path = sidecar_path(csv_path);
    let side: Sidecar = match File::open(&side_path) {
        Ok(f) => serde_json::from_reader(BufReader::new(f))?,
        Err(_) => {
            return Err(Error::Format(format!(
                "missing config block {}",
                side_path.display()
            )))
        }
    };
    let mut r = csv::Reader::from_reader(BufReader::new(File::open(csv_path)?));
    let mut values = Vec::with_capacity(side.axis1.len * side.axis2.len);
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 5 {
            return Err(Error::Format("expected 5 columns".into()));
        }
        if &rec[4] != side.provenance.config_hash.as_str() {
            return Err(Error::Format("row provenance does not match config block".into()));
        }
        let re: f64 = rec[2].parse().map_err(|_| Error::Format(format!("bad number {}", &rec[2])))?;
        let im: f64 = rec[3].parse().map_err(|_| Error::Format(format!("bad number {}", &rec[3])))?;
        values.push(Complex64::new(re, im));
    }
    if values.len() != side.axis1.len * side.axis2.len {
        return Err(Error::Format(format!(
            "expected {} samples, found {}",
            side.axis1.len * side.axis2.len,
            values.len()
        )));
    }
    Ok((
        WaveFieldGrid {
            space: side.space,
            axis1: side.axis1,
            axis2: side.axis2,
            values,
            energy: side.energy,
            params: side.params,
            masses: side.masses,
            warnings: side.warnings,
        },
        side.provenance,
    ))
}
