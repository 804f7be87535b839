use std::f64::consts::PI;

use borromean_core::faddeev::*;
use borromean_core::separable::{form_factor, tau, Term};
use borromean_core::twobody::{alpha_critical, threshold};
use borromean_core::PotentialParams;
use num_complex::Complex64;
use proptest::prelude::*;

fn params(v0: f64, alpha: f64) -> PotentialParams {
    PotentialParams::new(v0, alpha).unwrap()
}

fn cs_li() -> MassConfig {
    MassConfig::new(22.2).unwrap()
}

#[test]
fn gaussian_self_check_converges() {
    let g = build_grid(200, 2.0).unwrap();
    assert!(g.gaussian_self_check() < 1e-10, "{:e}", g.gaussian_self_check());
    let errs: Vec<f64> = [8, 16, 32, 64]
        .iter()
        .map(|&n| build_grid(n, 2.0).unwrap().gaussian_self_check())
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
}

#[test]
fn kernel_entries_match_scalar_evaluation() {
    let m = cs_li();
    let (beta, c) = (m.beta(), m.spectator_coefficient());
    let e = -0.15;
    let g = build_grid(40, 1.0).unwrap();
    for alpha in [0.0, 2.11] {
        let p = params(0.32, alpha);
        let k = assemble_kernel(p, m, &g, e, ExchangeSign::Boson).unwrap();
        for (i, j) in [(3, 17), (20, 20), (35, 8)] {
            let (pi, qj, wj) = (g.nodes[i], g.nodes[j], g.weights[j]);
            let (ep, eq) = (e - c * pi * pi, e - c * qj * qj);
            let den = e - 0.5 * qj * qj - 0.5 * pi * pi - beta * pi * qj;
            for lam in Term::ALL {
                for nu in Term::ALL {
                    let want = wj / (2.0 * PI)
                        * form_factor(p, lam, qj + beta * pi, ep).unwrap()
                        * form_factor(p, nu, pi + beta * qj, eq).unwrap().conj()
                        * tau(p, nu, eq).unwrap()
                        / den;
                    let got = k.block_entry(lam, nu, i, j);
                    assert!(got.is_finite());
                    assert!(
                        (got - want).norm() < 1e-12 * want.norm().max(1e-12),
                        "alpha {alpha} ({i}, {j}) {lam:?}{nu:?}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn exchange_sign_flips_every_entry() {
    let g = build_grid(24, 1.0).unwrap();
    let p = params(0.32, 2.11);
    let b = assemble_kernel(p, cs_li(), &g, -0.1, ExchangeSign::Boson).unwrap();
    let f = assemble_kernel(p, cs_li(), &g, -0.1, ExchangeSign::Fermion).unwrap();
    for (x, y) in b.matrix.data.iter().zip(&f.matrix.data) {
        assert_eq!(*x, -*y);
    }
}

#[test]
fn far_below_the_spectrum_the_sign_is_fixed() {
    let g = build_grid(60, 1.0).unwrap();
    let p = params(0.32, 0.0);
    for e in [-100.0, -60.0, -30.0] {
        let k = assemble_kernel(p, cs_li(), &g, e, ExchangeSign::Boson).unwrap();
        let cv = characteristic_value(&k).unwrap();
        assert_eq!(cv.sign(), 1.0, "at {e}");
        assert!(cv.log_abs.abs() < 0.5, "at {e}: {}", cv.log_abs);
    }
}

#[test]
fn kernel_rejects_energies_above_threshold() {
    let g = build_grid(16, 1.0).unwrap();
    let p = params(0.32, 0.0);
    assert!(assemble_kernel(p, cs_li(), &g, -0.05, ExchangeSign::Boson).is_err());
}

#[test]
fn cs_li_spectrum_at_zero_repulsion() {
    let p = params(0.32, 0.0);
    let g = build_grid(200, 1.0).unwrap();
    let s = find_spectrum(p, cs_li(), &g, &SpectrumSettings::default()).unwrap();
    let e2 = threshold(p, 1e-12).unwrap();
    let ratios: Vec<f64> = s.energies().iter().map(|e| e / e2).collect();
    assert_eq!(ratios.len(), 3, "{ratios:?}");
    for (r, want) in ratios.iter().zip([2.7515, 1.3604, 1.0525]) {
        assert!((r - want).abs() < 1e-3 * want, "{ratios:?}");
    }
    assert!(s.max_imag_ratio() < 1e-6);
    for st in &s.states {
        assert!(st.energy < s.threshold);
        assert!(st.residual < s.settings.residual_tol);
        assert!(!st.near_edge);
    }
    let mut prev = f64::NEG_INFINITY;
    for e in s.energies() {
        assert!(e > prev);
        prev = e;
    }

    let wide = build_grid(200, 2.0).unwrap();
    let moved = find_spectrum(p, cs_li(), &wide, &SpectrumSettings::default()).unwrap();
    for (a, b) in s.energies().iter().zip(moved.energies()) {
        assert!(((a - b) / a).abs() < 1e-4, "{a} vs {b}");
    }
    let tracked = track_roots(p, cs_li(), &wide, &s.energies(), &SpectrumSettings::default()).unwrap();
    for (a, b) in tracked.iter().zip(moved.energies()) {
        assert!(((a - b) / a).abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn borromean_state_above_threshold_line() {
    let p = params(0.32, 3.0);
    assert!(3.0 > alpha_critical(0.32).unwrap());
    let g = build_grid(200, 1.0).unwrap();
    let s = find_spectrum(p, cs_li(), &g, &SpectrumSettings::default()).unwrap();
    assert_eq!(s.threshold, 0.0);
    assert_eq!(s.states.len(), 1, "{:?}", s.energies());
    assert!(s.states[0].energy < 0.0);
    assert!(odd_root_count(p, cs_li(), &g, &SpectrumSettings::default()).unwrap());
}

#[test]
fn light_boson_state_dissociates_at_the_line() {
    let m = MassConfig::new(0.2).unwrap();
    let g = build_grid(200, 1.0).unwrap();
    let s = find_spectrum(params(0.32, 0.1), m, &g, &SpectrumSettings::default()).unwrap();
    assert_eq!(s.states.len(), 1, "{:?}", s.energies());
    let above = alpha_critical(0.32).unwrap() * (1.0 + 1e-3);
    let s = find_spectrum(params(0.32, above), m, &g, &SpectrumSettings::default()).unwrap();
    assert!(s.states.is_empty(), "{:?}", s.energies());
}

#[test]
fn eigenvector_nearest_one_at_a_root() {
    let p = params(0.32, 0.0);
    let g = build_grid(80, 1.0).unwrap();
    let s = find_spectrum(p, cs_li(), &g, &SpectrumSettings::default()).unwrap();
    let k = assemble_kernel(p, cs_li(), &g, s.states[0].energy, ExchangeSign::Boson).unwrap();
    let lam = nearest_eigenvalue(&k).unwrap();
    assert!((lam - Complex64::new(1.0, 0.0)).norm() < 1e-6, "{lam}");
}

#[test]
fn negative_coupling_ratio_is_rejected() {
    let g = build_grid(16, 1.0).unwrap();
    assert!(find_spectrum(params(0.7, -1.0), cs_li(), &g, &SpectrumSettings::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grid_is_symmetric_and_increasing(half in 4usize..200, scale in 0.01f64..20.0) {
        let g = build_grid(2 * half, scale).unwrap();
        prop_assert_eq!(g.n_points(), 2 * half);
        for w in g.nodes.windows(2) {
            prop_assert!(w[1] > w[0]);
        }
        let n = g.n_points();
        for i in 0..n {
            prop_assert_eq!(g.nodes[i], -g.nodes[n - 1 - i]);
            prop_assert!(g.weights[i] > 0.0);
        }
    }

    #[test]
    fn denominators_are_negative(ratio in 0.05f64..1000.0, frac in 0.0f64..1.0,
                                 n in 4usize..20, scale in 0.05f64..5.0) {
        let m = MassConfig::new(ratio).unwrap();
        let g = build_grid(2 * n, scale).unwrap();
        let e = -0.01 - 0.5 * frac;
        let beta = m.beta();
        for &p in &g.nodes {
            prop_assert!(e - m.spectator_coefficient() * p * p <= e);
            for &q in &g.nodes {
                prop_assert!(e - 0.5 * q * q - 0.5 * p * p - beta * p * q < 0.0);
            }
        }
        let k = assemble_kernel(params(0.32, 3.0), m, &g, e, ExchangeSign::Boson).unwrap();
        prop_assert!(k.max_denominator < 0.0);
        prop_assert!(k.matrix.data.iter().all(|z| z.is_finite()));
    }
}
