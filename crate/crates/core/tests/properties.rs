use num_complex::Complex64;
use proptest::prelude::*;

use warpspec_core::signal::{max_abs_diff, SignalSpec};
use warpspec_core::transforms::{
    adjoint_defect, default_modulated_grid, default_warped_grid, modulated_forward, modulated_reduction_check,
    warped_forward, EnergyOp, WarpedMethod,
};
use warpspec_core::warp::make_analytic_warp;
use warpspec_core::{SampledSignal, TimeGrid, WarpSpec};

fn grid() -> TimeGrid {
    TimeGrid::new(-10.0, 10.0, 512).unwrap()
}

fn noise(seed: u64) -> SampledSignal {
    SignalSpec::BandLimitedNoise { seed, max_freq: 3.0, envelope: 1.0, tones: 6 }.sample(grid())
}

fn warp() -> impl Strategy<Value = WarpSpec> {
    prop_oneof![
        (0.2..4.0f64).prop_map(|a| make_analytic_warp("linear-scale", &[a]).unwrap()),
        (0.5..2.0f64, 0.0..0.02f64).prop_map(|(a, b)| make_analytic_warp("chirp", &[a, b]).unwrap()),
        (0.0..0.9f64, 0.2..1.1f64).prop_map(|(a, w)| make_analytic_warp("sin-perturbed", &[a, w]).unwrap()),
        (0.05..0.3f64).prop_map(|k| make_analytic_warp("exp-rate", &[k]).unwrap()),
    ]
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn h_inverse_roundtrip(w in warp(), t in -10.0..10.0f64) {
        let back = w.h_inv(w.h(t));
        prop_assert!((back - t).abs() < 1e-9 * (1.0 + t.abs()), "{} at {t}: {back}", w.describe());
        prop_assert!(w.g(t) > 0.0);
    }

    #[test]
    fn modulated_reduction_holds(w in warp(), seed in 0u64..1000) {
        let err = modulated_reduction_check(&noise(seed), &w).unwrap();
        prop_assert!(err < 1e-9, "{}: {err}", w.describe());
    }

    #[test]
    fn modulated_is_linear(w in warp(), s1 in 0u64..1000, s2 in 0u64..1000, a in complex(), b in complex()) {
        let (f, k) = (noise(s1), noise(s2));
        let eg = default_modulated_grid(&f.grid);
        let lhs = modulated_forward(&f.combine(a, &k, b), &w, &eg).unwrap();
        let fa = modulated_forward(&f, &w, &eg).unwrap();
        let fb = modulated_forward(&k, &w, &eg).unwrap();
        let rhs: Vec<_> = fa.values.iter().zip(&fb.values).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(max_abs_diff(&lhs.values, &rhs) < 1e-10);
    }

    #[test]
    fn warped_is_linear(s1 in 0u64..1000, s2 in 0u64..1000, a in complex(), b in complex(), eps in 0.0..0.9f64) {
        let w = make_analytic_warp("sin-perturbed", &[eps, 1.0]).unwrap();
        let (f, k) = (noise(s1), noise(s2));
        let eg = default_warped_grid(&w, &f.grid).unwrap();
        let m = WarpedMethod::DirectQuadrature;
        let lhs = warped_forward(&f.combine(a, &k, b), &w, &eg, m).unwrap();
        let fa = warped_forward(&f, &w, &eg, m).unwrap();
        let fb = warped_forward(&k, &w, &eg, m).unwrap();
        let rhs: Vec<_> = fa.values.iter().zip(&fb.values).map(|(x, y)| a * x + b * y).collect();
        prop_assert!(max_abs_diff(&lhs.values, &rhs) < 1e-10);
    }

    #[test]
    fn additive_operator_is_symmetric(w in warp(), s1 in 0u64..1000, s2 in 0u64..1000) {
        let defect = adjoint_defect(EnergyOp::Additive, &w, &noise(s1), &noise(s2)).unwrap();
        prop_assert!(defect < 1e-8, "{}: {defect}", w.describe());
    }
}
