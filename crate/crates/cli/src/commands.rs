use borromean_core::faddeev::{build_grid, find_spectrum, MassConfig};
use borromean_core::observables::measure_geometry;
use borromean_core::scan::{map_borromean_window, mass_ratio_sweep, spectrum_curve};
use borromean_core::twobody::{
    self, alpha_critical, energy_asymptotic, region_of, relative_residual, PotentialParams, StateKind,
};
use borromean_core::wavefunction::{faddeev_component, write_field, Provenance, SamplingPlan};
use borromean_core::{Error, Result};
use serde_json::{json, Value};

use crate::config::{
    CurveConfig, MassSweepConfig, SpectrumConfig, TwoBodyConfig, WavefunctionConfig, WindowConfig,
};
use crate::table::{Cell, Report};

fn kind_name(kind: StateKind) -> &'static str {
    match kind {
        StateKind::Bound => "bound",
        StateKind::Virtual => "virtual",
    }
}

pub fn twobody(c: &TwoBodyConfig) -> Result<Report> {
    let params = PotentialParams::new(c.v0, c.alpha)?;
    let alpha_c = alpha_critical(c.v0)?;
    let region = match region_of(params) {
        Ok(r) => format!("{r:?}"),
        Err(Error::ThresholdBoundary { .. }) => "boundary".to_string(),
        Err(e) => return Err(e),
    };
    let states = twobody::solve_two_body(params, c.tol)?;
    let asymptotic = energy_asymptotic(params)?;
    let mut r = Report::new(&["v0", "alpha", "region", "index", "kappa", "energy", "kind", "residual"]);
    for (i, s) in states.iter().enumerate() {
        r.push(vec![
            c.v0.into(),
            c.alpha.into(),
            region.as_str().into(),
            i.into(),
            s.kappa.into(),
            s.energy.into(),
            kind_name(s.kind).into(),
            relative_residual(params, s.kappa).into(),
        ]);
    }
    // the root closest to zero is the one the quadratic law describes
    let nearest = states.iter().min_by(|a, b| a.kappa.abs().partial_cmp(&b.kappa.abs()).unwrap());
    r.note("region", json!(region));
    r.note("alpha_c", json!(alpha_c));
    r.note("asymptotic_energy", json!(asymptotic));
    r.note(
        "asymptotic_relative_deviation",
        match nearest {
            Some(s) if asymptotic != 0.0 => json!((s.energy - asymptotic).abs() / asymptotic.abs()),
            _ => Value::Null,
        },
    );
    Ok(r)
}

pub fn spectrum(c: &SpectrumConfig) -> Result<Report> {
    let params = PotentialParams::new(c.v0, c.alpha)?;
    let masses = MassConfig::new(c.mass_ratio)?;
    let grid = build_grid(c.grid.n_points, c.grid.map_scale)?;
    let s = find_spectrum(params, masses, &grid, &c.solver.settings())?;
    let e2 = twobody::solve_two_body(params, c.solver.two_body_tol)?
        .into_iter()
        .find(|s| s.kind == StateKind::Bound)
        .map(|s| s.energy);
    let mut r = Report::new(&[
        "v0", "alpha", "mass_ratio", "n_points", "map_scale", "index", "energy", "ratio_to_e2", "residual",
        "near_edge",
    ]);
    for (i, st) in s.states.iter().enumerate() {
        r.push(vec![
            c.v0.into(),
            c.alpha.into(),
            c.mass_ratio.into(),
            c.grid.n_points.into(),
            c.grid.map_scale.into(),
            i.into(),
            st.energy.into(),
            e2.map(|e| st.energy / e).into(),
            st.residual.into(),
            (if st.near_edge { "true" } else { "false" }).into(),
        ]);
    }
    r.note("threshold", json!(s.threshold));
    r.note("two_body_energy", json!(e2));
    r.note("scan_top", json!(s.scan_top));
    r.note("search_floor", json!(s.search_floor));
    r.note("ir_guard_active", json!(s.ir_guard_active));
    r.note("max_imag_ratio", json!(s.max_imag_ratio()));
    r.note("ladder_samples", json!(s.diagnostics.len()));
    Ok(r)
}

pub fn curve(c: &CurveConfig) -> Result<Report> {
    let masses = MassConfig::new(c.mass_ratio)?;
    let grid = build_grid(c.grid.n_points, c.grid.map_scale)?;
    let cv = spectrum_curve(c.v0, masses, &c.alpha.samples(), &grid, &c.solver.settings())?;
    let mut r = Report::new(&[
        "v0", "mass_ratio", "n_points", "map_scale", "alpha", "level", "energy", "two_body_energy",
        "two_body_kind", "error",
    ]);
    for row in &cv.rows {
        let base = |level: Cell, energy: Cell| -> Vec<Cell> {
            vec![
                c.v0.into(),
                c.mass_ratio.into(),
                c.grid.n_points.into(),
                c.grid.map_scale.into(),
                row.alpha.into(),
                level,
                energy,
                row.two_body.map(|s| s.energy).into(),
                row.two_body.map(|s| kind_name(s.kind)).into(),
                row.error.clone().into(),
            ]
        };
        if row.energies.is_empty() {
            r.push(base(Cell::Empty, Cell::Empty));
        }
        for (i, &e) in row.energies.iter().enumerate() {
            r.push(base(i.into(), e.into()));
        }
    }
    r.note("flags", serde_json::to_value(&cv.flags).expect("flags serialize"));
    Ok(r)
}

pub fn wavefunction(c: &WavefunctionConfig, hash: &str, config: &Value) -> Result<Report> {
    let params = PotentialParams::new(c.v0, c.alpha)?;
    let masses = MassConfig::new(c.mass_ratio)?;
    let grid = build_grid(c.grid.n_points, c.grid.map_scale)?;
    let s = find_spectrum(params, masses, &grid, &c.solver.settings())?;
    let state = s.states.get(c.state).ok_or_else(|| {
        Error::Domain(format!("requested state {} but only {} were found", c.state, s.states.len()))
    })?;
    let component = faddeev_component(state, &s)?;
    let mut plan = SamplingPlan::for_energy(state.energy, masses);
    if let Some(w) = c.window {
        plan.p1_max = w;
        plan.k23_max = w;
    }
    plan.x1_span *= c.span_scale;
    plan.y23_span *= c.span_scale;
    let m = measure_geometry(&component, plan, c.resolution)?;
    if let Some(path) = &c.dump {
        let prov = Provenance { config_hash: hash.to_string(), config: config.clone() };
        write_field(&m.position.field, path, &prov)?;
    }
    let g = m.report;
    let mut r = Report::new(&[
        "v0", "alpha", "mass_ratio", "n_points", "map_scale", "state", "energy", "mean_x1", "mean_y23",
        "sigma_x1", "sigma_y23", "window_coverage", "parseval_mismatch", "evenness_defect",
    ]);
    r.push(vec![
        c.v0.into(),
        c.alpha.into(),
        c.mass_ratio.into(),
        c.grid.n_points.into(),
        c.grid.map_scale.into(),
        c.state.into(),
        state.energy.into(),
        g.mean_x1.into(),
        g.mean_y23.into(),
        g.sigma_x1.into(),
        g.sigma_y23.into(),
        g.window_coverage.into(),
        m.position.parseval_mismatch.into(),
        m.position.field.evenness_defect().into(),
    ]);
    r.note("geometry", serde_json::to_value(g).expect("report serializes"));
    r.note("plan", serde_json::to_value(m.plan).expect("plan serializes"));
    r.note("doublings", json!(m.doublings));
    r.note("norm", json!(m.position.field.norm()));
    r.note("edge_fraction", json!(m.position.edge_fraction));
    let mut warnings = m.momentum.warnings.clone();
    warnings.extend(m.position.field.warnings.iter().cloned());
    r.note("warnings", json!(warnings));
    r.note("dump", json!(c.dump));
    Ok(r)
}

pub fn window(c: &WindowConfig) -> Result<Report> {
    let masses = MassConfig::new(c.mass_ratio)?;
    let grid = build_grid(c.grid.n_points, c.grid.map_scale)?;
    let v0s = c.v0.samples();
    let map = map_borromean_window(&v0s, masses, &grid, &c.solver.settings(), &c.window_settings());
    let mut r = Report::new(&[
        "v0", "mass_ratio", "n_points", "map_scale", "alpha_c", "alpha_w", "width", "status",
    ]);
    for &v0 in &v0s {
        let head = |alpha_c: Cell, alpha_w: Cell, width: Cell, status: String| -> Vec<Cell> {
            vec![
                v0.into(),
                c.mass_ratio.into(),
                c.grid.n_points.into(),
                c.grid.map_scale.into(),
                alpha_c,
                alpha_w,
                width,
                status.into(),
            ]
        };
        let ac: Cell = alpha_critical(v0).ok().into();
        if let Some(rec) = map.records.iter().find(|w| w.v0 == v0) {
            r.push(head(rec.alpha_c.into(), rec.alpha_w.into(), rec.width().into(), "ok".into()));
        } else if map.absent.contains(&v0) {
            r.push(head(ac, Cell::Empty, Cell::Empty, "absent".into()));
        } else if let Some(gap) = map.gaps.iter().find(|g| g.v0 == v0) {
            r.push(head(ac, Cell::Empty, Cell::Empty, format!("failed: {}", gap.reason)));
        }
    }
    let (lower, upper) = map.boundaries();
    r.note("alpha_c_curve", json!(lower));
    r.note("alpha_w_curve", json!(upper));
    Ok(r)
}

pub fn mass_sweep(c: &MassSweepConfig) -> Result<Report> {
    let grid = build_grid(c.grid.n_points, c.grid.map_scale)?;
    let rows = mass_ratio_sweep(c.v0, c.alpha_offset, &c.mass_ratios, &grid, &c.solver.settings())?;
    let mut r = Report::new(&[
        "v0", "alpha", "alpha_offset", "n_points", "map_scale", "mass_ratio", "count", "index", "energy",
        "error",
    ]);
    let mut counts = Vec::new();
    for row in &rows {
        let line = |index: Cell, energy: Cell| -> Vec<Cell> {
            vec![
                c.v0.into(),
                row.alpha.into(),
                c.alpha_offset.into(),
                c.grid.n_points.into(),
                c.grid.map_scale.into(),
                row.mass_ratio.into(),
                row.count().into(),
                index,
                energy,
                row.error.clone().into(),
            ]
        };
        if row.error.is_some() {
            r.push(line(Cell::Empty, Cell::Empty));
        }
        for (i, &e) in row.energies.iter().enumerate() {
            r.push(line(i.into(), e.into()));
        }
        counts.push(json!({
            "mass_ratio": row.mass_ratio,
            "count": row.count(),
            "error": row.error,
        }));
    }
    r.note("counts", Value::Array(counts));
    Ok(r)
}
