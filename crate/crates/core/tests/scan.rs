use borromean_core::scan::*;
use borromean_core::twobody::{alpha_critical, StateKind};
use borromean_core::*;
use proptest::prelude::*;

fn cs_li() -> MassConfig {
    MassConfig::new(22.2).unwrap()
}

fn coarse() -> MomentumGrid {
    build_grid(120, 0.3).unwrap()
}

#[test]
fn spectrum_curve_through_the_threshold_line() {
    let ac = alpha_critical(0.32).unwrap();
    let mut alphas: Vec<f64> = (0..12).map(|i| 2.2 + 0.1 * i as f64).collect();
    alphas.push(4.2);
    let c = spectrum_curve(0.32, cs_li(), &alphas, &coarse(), &SpectrumSettings::default()).unwrap();
    assert!(c.rows.iter().all(|r| r.error.is_none()));
    assert!(c.flags.is_empty(), "{:?}", c.flags);

    for r in &c.rows {
        let tb = r.two_body.unwrap();
        let want = if r.alpha < ac { StateKind::Bound } else { StateKind::Virtual };
        assert_eq!(tb.kind, want);
        if r.alpha > ac {
            assert!(r.energies.len() <= 1, "alpha {}: {:?}", r.alpha, r.energies);
        }
    }
    let last = c.rows.last().unwrap();
    assert!(last.energies.is_empty(), "{:?}", last.energies);

    let ground = c.level(0);
    assert!(ground.iter().all(|&(_, e)| e < 0.0));
    let x: Vec<f64> = ground.iter().map(|p| p.0).collect();
    let y: Vec<f64> = ground.iter().map(|p| p.1).collect();
    assert!(continuity_violations(&x, &y, CONTINUITY_FACTOR).is_empty());
    let across = ground.iter().find(|p| p.0 > ac).unwrap();
    assert!(across.1 < -1e-3, "{across:?}");

    for level in [1, 2] {
        let ex = c.level(level);
        let (a, e) = *ex.last().unwrap();
        assert!(a < ac);
        let e2 = c.rows.iter().find(|r| r.alpha == a).unwrap().two_body.unwrap().energy;
        assert!(e < e2 && e > 2.0 * e2, "level {level} at {a}: {e} vs {e2}");
    }
}

#[test]
fn unsorted_alphas_are_rejected() {
    let r = spectrum_curve(0.32, cs_li(), &[1.0, 0.5], &coarse(), &SpectrumSettings::default());
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn light_boson_has_no_window() {
    let m = MassConfig::new(0.2).unwrap();
    let r = find_alpha_w(0.32, m, &coarse(), None, &SpectrumSettings::default(), &WindowSettings::default());
    assert!(matches!(r, Err(Error::NoBorromeanState { .. })), "{r:?}");
}

#[test]
fn alpha_w_does_not_depend_on_the_bracket() {
    let g = coarse();
    let s = SpectrumSettings::default();
    let w = WindowSettings::default();
    let a = find_alpha_w(0.32, cs_li(), &g, None, &s, &w).unwrap();
    let b = find_alpha_w(0.32, cs_li(), &g, Some((3.5, 3.6)), &s, &w).unwrap();
    let c = find_alpha_w(0.32, cs_li(), &g, Some((2.9, 5.0)), &s, &w).unwrap();
    for x in [b, c] {
        assert!((a - x).abs() < 2.0 * w.alpha_tol, "{a} vs {x}");
    }
}

#[test]
fn window_widens_with_coupling() {
    let v0s = [0.05, 0.1, 0.2, 0.25, 0.32, 0.4];
    let map = map_borromean_window(&v0s, cs_li(), &coarse(), &SpectrumSettings::default(), &WindowSettings::default());
    assert!(map.gaps.is_empty(), "{:?}", map.gaps);
    assert_eq!(map.absent, vec![0.05, 0.1]);
    assert_eq!(map.records.len(), 4);
    for r in &map.records {
        assert_eq!(r.alpha_c, 1.0 / (1.0 - 2.0 * r.v0));
        assert!(r.alpha_w > r.alpha_c);
    }
    for w in map.records.windows(2) {
        assert!(w[1].width() > w[0].width(), "{:?}", map.records);
        assert!(w[1].alpha_w > w[0].alpha_w);
    }
    let (lower, upper) = map.boundaries();
    assert_eq!(lower.len(), upper.len());
}

#[test]
fn borromean_count_grows_with_mass_ratio() {
    let rows = mass_ratio_sweep(0.32, DEFAULT_ALPHA_OFFSET, &[0.2, 1.0, 22.2], &coarse(), &SpectrumSettings::default())
        .unwrap();
    assert!(rows.iter().all(|r| r.error.is_none()));
    let counts: Vec<usize> = rows.iter().map(MassRow::count).collect();
    assert_eq!(counts[0], 0);
    assert_eq!(counts[2], 1);
    assert!(counts.windows(2).all(|w| w[1] >= w[0]), "{counts:?}");
    assert!(mass_ratio_sweep(0.32, 0.0, &[1.0], &coarse(), &SpectrumSettings::default()).is_err());
}

#[test]
fn fit_rejects_non_negative_energies() {
    let pts: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64 * 0.01, if i == 3 { 0.0 } else { -1.0 })).collect();
    assert!(matches!(fit_power_law(&pts, 0.0, 1.0), Err(Error::Domain(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fit_recovers_exact_power_laws(amp in 1e-4f64..10.0, exp in 0.3f64..3.0,
                                     pivot in -5.0f64..5.0, span in 0.01f64..2.0,
                                     n in 8usize..40, left in any::<bool>()) {
        let side = if left { -1.0 } else { 1.0 };
        let pts: Vec<(f64, f64)> = (1..=n)
            .map(|i| {
                let d = span * i as f64 / n as f64;
                (pivot + side * d, -amp * d.powf(exp))
            })
            .collect();
        let f = fit_power_law(&pts, pivot, 1.0).unwrap();
        prop_assert!((f.exponent - exp).abs() < 1e-9 * exp);
        prop_assert!((f.amplitude - amp).abs() < 1e-8 * amp);
        prop_assert!(f.residual < 1e-8 && f.acceptable());
        prop_assert_eq!(f.points, n);
    }

    #[test]
    fn window_fraction_limits_the_points(frac in 0.05f64..1.0) {
        let pts: Vec<(f64, f64)> = (1..=400).map(|i| {
            let d = i as f64 / 400.0;
            (2.0 - d, -3.0 * d * d)
        }).collect();
        match fit_power_law(&pts, 2.0, frac) {
            Ok(f) => {
                prop_assert!(f.fit_window[1] <= frac + 1e-12);
                prop_assert!((f.exponent - 2.0).abs() < 1e-9);
            }
            Err(e) => {
                let short = matches!(e, Error::InsufficientPoints { .. });
                prop_assert!(short);
            }
        }
    }
}
