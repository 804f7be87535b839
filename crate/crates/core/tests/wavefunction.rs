use borromean_core::faddeev::SpectrumResult;
use borromean_core::observables::*;
use borromean_core::separable::Term;
use borromean_core::wavefunction::*;
use borromean_core::*;
use num_complex::Complex64;

fn ground(alpha: f64, n: usize) -> (SpectrumResult, FaddeevComponentField) {
    let p = PotentialParams::new(0.32, alpha).unwrap();
    let m = MassConfig::new(22.2).unwrap();
    let g = build_grid(n, 1.0).unwrap();
    let s = find_spectrum(p, m, &g, &SpectrumSettings::default()).unwrap();
    let c = wavefunction::faddeev_component(&s.states[0], &s).unwrap();
    (s, c)
}

#[test]
fn nystrom_reproduces_nodal_values() {
    let (s, c) = ground(0.0, 120);
    let tol = 10.0 * s.settings.residual_tol;
    for (i, &p) in c.nodes().iter().enumerate() {
        let phi = c.phi_at(p).unwrap();
        for t in Term::ALL {
            let d = (phi[t.index()] - c.nodal(t)[i]).norm();
            assert!(d < tol, "node {i} {t:?}: {d:e}");
        }
    }
}

#[test]
fn component_decays_in_spectator_momentum() {
    let (_, c) = ground(0.0, 120);
    let centre = c.eval(0.0, 0.0).unwrap().norm();
    assert!(centre > 0.0);
    for k in [0.0, 3.0, -20.0] {
        let far = c.eval(k, 20.0).unwrap();
        assert!(far.is_finite());
        assert!(far.norm() < 1e-2 * centre, "({k}, 20): {}", far.norm());
    }
    // pair momentum enters only through e^{+-ik/2}: bounded, not decaying
    let bound = (c.eval(0.0, 0.0).unwrap().norm() + c.eval(std::f64::consts::PI, 0.0).unwrap().norm()) * (1.0 + 1e-12);
    for k in [50.0, -123.4, 1e4] {
        assert!(c.eval(k, 0.0).unwrap().norm() <= bound);
    }
}

#[test]
fn component_shape_is_stable_under_grid_doubling() {
    let (_, a) = ground(0.0, 100);
    let (_, b) = ground(0.0, 200);
    let shape = |c: &FaddeevComponentField, k: f64, p: f64| c.eval(k, p).unwrap() / c.eval(0.0, 0.0).unwrap();
    for (k, p) in [(0.3, 0.2), (-1.0, 0.5), (2.0, -1.5)] {
        let (x, y) = (shape(&a, k, p), shape(&b, k, p));
        assert!((x - y).norm() < 1e-4 * y.norm(), "({k}, {p}): {x} vs {y}");
    }
}

#[test]
fn momentum_field_is_even_and_covered() {
    let (s, c) = ground(0.0, 120);
    let plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
    let f = momentum_wavefunction(&c, &plan).unwrap();
    assert_eq!(f.space, Space::Momentum);
    assert!(f.evenness_defect() < 1e-10);
    assert!((f.norm() - 1.0).abs() < 1e-12);
    assert!(f.warnings.is_empty(), "{:?}", f.warnings);
    assert!(f.edge_fraction(0.5) < 0.01);
    let (ax, ay) = (s.masses.alpha_x(), s.masses.alpha_y());
    for p1 in f.axis1.values() {
        for k23 in f.axis2.values() {
            assert!(f.energy - 0.5 * ax * p1 * p1 - 0.5 * ay * k23 * k23 < 0.0);
        }
    }
}

#[test]
fn fourier_step_keeps_norm_and_symmetry() {
    let (s, c) = ground(2.11, 120);
    let plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
    let f = momentum_wavefunction(&c, &plan).unwrap();
    let x1 = position_wavefunction(&f, 1, 0.0).unwrap();
    assert!(x1.parseval_mismatch < 1e-3);
    assert!(x1.field.evenness_defect() < 1e-10, "{:e}", x1.field.evenness_defect());
    assert_eq!(x1.field.space, Space::Position);

    // padding twice as fine must land on the same values at shared points
    let x2 = position_wavefunction(&f, 2, 0.0).unwrap();
    let max = x1.field.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (a, b) = (&x1.field, &x2.field);
    let mut worst = 0.0f64;
    for i in 0..a.axis1.len {
        let ib = ((a.axis1.value(i) - b.axis1.start) / b.axis1.step).round() as usize;
        for j in 0..a.axis2.len {
            let jb = ((a.axis2.value(j) - b.axis2.start) / b.axis2.step).round() as usize;
            assert!((b.axis1.value(ib) - a.axis1.value(i)).abs() < 1e-9);
            assert!((b.axis2.value(jb) - a.axis2.value(j)).abs() < 1e-9);
            worst = worst.max((a.get(i, j) - b.get(ib, jb)).norm());
        }
    }
    assert!(worst < 1e-3 * max, "{worst:e} vs {max:e}");
}

#[test]
fn narrow_window_is_reported_as_aliasing() {
    let (s, c) = ground(2.11, 120);
    let mut plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
    plan.x1_span /= 6.0;
    plan.y23_span /= 6.0;
    let f = momentum_wavefunction(&c, &plan).unwrap();
    assert!(matches!(position_wavefunction(&f, 1, 0.0), Err(Error::Aliasing { .. })));
}

#[test]
fn dump_round_trip() {
    let (s, c) = ground(0.0, 80);
    let plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
    let f = momentum_wavefunction(&c, &plan).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let prov = Provenance { config_hash: "abc123".into(), config: serde_json::json!({"alpha": 0.0}) };
    write_field(&f, &path, &prov).unwrap();
    let (back, prov_back) = read_field(&path).unwrap();
    assert_eq!(prov_back, prov);
    assert_eq!(back.axis1, f.axis1);
    assert_eq!(back.axis2, f.axis2);
    assert_eq!(back.energy, f.energy);
    for (x, y) in back.values.iter().zip(&f.values) {
        assert!((x - y).norm() <= 1e-12 * y.norm().max(1e-300));
    }

    std::fs::remove_file(sidecar_path(&path)).unwrap();
    assert!(matches!(read_field(&path), Err(Error::Format(_))));

    write_field(&f, &path, &prov).unwrap();
    let text = std::fs::read_to_string(&path).unwrap().replacen("abc123", "zzz999", 2);
    std::fs::write(&path, text).unwrap();
    assert!(matches!(read_field(&path), Err(Error::Format(_))));
}

#[test]
fn geometry_needs_position_space() {
    let (s, c) = ground(0.0, 80);
    let plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
    let f = momentum_wavefunction(&c, &plan).unwrap();
    assert!(matches!(geometry(&f), Err(Error::WrongSpace)));
}

#[test]
fn symmetric_ground_state_sits_between_the_wells() {
    let (s, c) = ground(0.0, 150);
    let plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
    let m = measure_geometry(&c, plan, 1).unwrap();
    assert!((m.report.mean_x1 - 0.5).abs() < 0.01, "{:?}", m.report);
    assert!(m.report.mean_y23.abs() < 1e-8 * m.report.sigma_y23);
    assert!(!m.report.low_coverage);
}

#[test]
fn widths_grow_with_repulsion() {
    let mut prev = (0.0, 0.0);
    for alpha in [0.0, 1.0, 2.0, 2.5, 3.0, 3.5, 3.84] {
        let (s, c) = ground(alpha, 150);
        let plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
        let r = measure_geometry(&c, plan, 1).unwrap().report;
        assert!(r.sigma_x1 > prev.0 && r.sigma_y23 > prev.1, "alpha {alpha}: {r:?}");
        assert!(r.mean_y23.abs() < 1e-8 * r.sigma_y23);
        prev = (r.sigma_x1, r.sigma_y23);
    }
}

#[test]
fn scaled_field_keeps_phase_free_moments() {
    let (s, c) = ground(2.11, 100);
    let plan = SamplingPlan::for_energy(s.states[0].energy, s.masses);
    let f = momentum_wavefunction(&c, &plan).unwrap();
    let x = position_wavefunction(&f, 1, 0.0).unwrap();
    let mut rotated = x.field.clone();
    let ph = Complex64::from_polar(1.0, 1.234);
    rotated.values.iter_mut().for_each(|z| *z *= ph);
    let (a, b) = (geometry(&x.field).unwrap(), geometry(&rotated).unwrap());
    assert!((a.mean_x1 - b.mean_x1).abs() < 1e-12);
    assert!((a.sigma_y23 - b.sigma_y23).abs() < 1e-12);
}
