//! Moments of the Jacobi coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wavefunction::{
    momentum_wavefunction, transform, FaddeevComponentField, PositionTransform, SamplingPlan, Space,
    WaveFieldGrid, EDGE_KEEP,
};

pub const MIN_COVERAGE: f64 = 0.99;
pub const MAX_DOUBLINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub mean_x1: f64,
    pub mean_y23: f64,
    pub sigma_x1: f64,
    pub sigma_y23: f64,
    /// Share of the norm inside the central 75% of the window.
    pub window_coverage: f64,
    pub low_coverage: bool,
}

pub fn geometry(field: &WaveFieldGrid) -> Result<GeometryReport> {
    if field.space != Space::Position {
        return Err(Error::WrongSpace);
    }
    let (n1, n2) = (field.axis1.len, field.axis2.len);
    let xs = field.axis1.values();
    let ys = field.axis2.values();
    let (mut s0, mut sx, mut sy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..n1 {
        let x = xs[i];
        let row = &field.values[i * n2..(i + 1) * n2];
        let (mut r0, mut ry, mut ryy) = (0.0, 0.0, 0.0);
        for (z, &y) in row.iter().zip(&ys) {
            let w = z.norm_sqr();
            r0 += w;
            ry += w * y;
            ryy += w * y * y;
        }
        s0 += r0;
        sx += r0 * x;
        sxx += r0 * x * x;
        sy += ry;
        syy += ryy;
    }
    let mean_x1 = sx / s0;
    let mean_y23 = sy / s0;
    let coverage = 1.0 - field.edge_fraction(EDGE_KEEP);
    Ok(GeometryReport {
        mean_x1,
        mean_y23,
        sigma_x1: (sxx / s0 - mean_x1 * mean_x1).max(0.0).sqrt(),
        sigma_y23: (syy / s0 - mean_y23 * mean_y23).max(0.0).sqrt(),
        window_coverage: coverage,
        low_coverage: coverage < MIN_COVERAGE,
    })
}

#[derive(Debug, Clone)]
pub struct Measurement {
    pub report: GeometryReport,
    pub plan: SamplingPlan,
    pub momentum: WaveFieldGrid,
    pub position: PositionTransform,
    pub doublings: usize,
}

/// Samples, transforms and measures, doubling the position window until the
/// coverage target is met or [`MAX_DOUBLINGS`] is reached.
pub fn measure_geometry(
    component: &FaddeevComponentField,
    plan: SamplingPlan,
    resolution: usize,
) -> Result<Measurement> {
    let mut plan = plan;
    let mut doublings = 0;
    loop {
        let momentum = momentum_wavefunction(component, &plan)?;
        let position = transform(&momentum, resolution, plan.x1_center)?;
        let report = geometry(&position.field)?;
        if !report.low_coverage || doublings == MAX_DOUBLINGS {
            return Ok(Measurement { report, plan, momentum, position, doublings });
        }
        plan = plan.doubled();
        doublings += 1;
    }
}
