//! Randomized invariants across the modules.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use anomaly_core::algebra::build_su;
use anomaly_core::currents::{bracket, CurrentElement};
use anomaly_core::extensions::{affine_cocycle, mf_cocycle, GaugeFieldModes, LoopMode, TorusField};
use anomaly_core::harmonics::{gaunt, wigner3j_int};
use anomaly_core::jets::{integrate, plane_wave_jet, BoundaryInput, JetRunConfig, PlaneWaveSpec};
use anomaly_core::lowest_weight::{grade_one_spectrum, shapovalov_gram, AffineModuleSpec, CentralForm, GroundMultiplet};
use anomaly_core::SuiteConfig;

fn triangle(j1: i32, j2: i32, j3: i32) -> bool {
    (j1 - j2).abs() <= j3 && j3 <= j1 + j2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wigner3j_symmetries(j1 in 0..6i32, j2 in 0..6i32, j3 in 0..6i32, m1 in -5..=5i32, m2 in -5..=5i32) {
        prop_assume!(triangle(j1, j2, j3) && m1.abs() <= j1 && m2.abs() <= j2 && (m1 + m2).abs() <= j3);
        let m3 = -m1 - m2;
        let w = wigner3j_int([j1, j2, j3], [m1, m2, m3]);
        let sign = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((w - wigner3j_int([j2, j3, j1], [m2, m3, m1])).abs() < 1e-14);
        prop_assert!((w - sign * wigner3j_int([j2, j1, j3], [m2, m1, m3])).abs() < 1e-14);
        prop_assert!((w - sign * wigner3j_int([j1, j2, j3], [-m1, -m2, -m3])).abs() < 1e-14);
    }

    #[test]
    fn gaunt_selection_rules(l1 in 0..6i32, l2 in 0..6i32, l3 in 0..12i32, m1 in -5..=5i32, m2 in -5..=5i32) {
        prop_assume!(m1.abs() <= l1 && m2.abs() <= l2);
        let g = gaunt(l1, m1, l2, m2, l3);
        if !triangle(l1, l2, l3) || (l1 + l2 + l3) % 2 == 1 || (m1 + m2).abs() > l3 {
            prop_assert_eq!(g, 0.0);
        }
        prop_assert!((g - gaunt(l2, m2, l1, m1, l3)).abs() < 1e-14);
    }

    #[test]
    fn current_bracket_antisymmetric_and_graded(seed in any::<u64>(), n1 in -3..=3i32, n2 in -3..=3i32) {
        let su3 = build_su(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = CurrentElement::random(&mut rng, &su3, 4, (n1, n1), 3);
        let y = CurrentElement::random(&mut rng, &su3, 4, (n2, n2), 3);
        let xy = bracket(&x, &y, &su3);
        prop_assert_eq!(xy.add(&bracket(&y, &x, &su3)).max_abs(), 0.0);
        if !xy.is_zero() {
            prop_assert_eq!(xy.homogeneous_degree(), Some(n1 + n2));
        }
        let back = CurrentElement::from_json_value(&x.to_json_value()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn affine_cocycle_antisymmetric(a in 0..3usize, b in 0..3usize, m in -8..=8i32, n in -8..=8i32, k in -3.0..3.0f64) {
        let su2 = build_su(2).unwrap();
        let xy = affine_cocycle(LoopMode::new(a, m), LoopMode::new(b, n), k, &su2).value;
        let yx = affine_cocycle(LoopMode::new(b, n), LoopMode::new(a, m), k, &su2).value;
        prop_assert!((xy + yx).norm() < 1e-15);
    }

    #[test]
    fn mf_cocycle_antisymmetric_and_round_trips(seed in any::<u64>()) {
        let su3 = build_su(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = TorusField::random(&mut rng, &su3, 2, 2, 2);
        let y = TorusField::random(&mut rng, &su3, 2, 2, 2);
        let a = GaugeFieldModes::random(&mut rng, &su3, 3, 2, 2);
        let s = (mf_cocycle(&x, &y, &a, &su3).value + mf_cocycle(&y, &x, &a, &su3).value).norm();
        prop_assert!(s < 1e-12);
        prop_assert_eq!(TorusField::from_json(&x.to_json()).unwrap(), x);
        prop_assert_eq!(GaugeFieldModes::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn jet_flow_is_linear(seed in any::<u64>(), re in -2.0..2.0f64, im in -2.0..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 4;
        let w1 = PlaneWaveSpec { omega: 1.0, kvec: [0.3, 0.1, -0.2] };
        let w2 = PlaneWaveSpec { omega: 0.7, kvec: [-0.1, 0.4, 0.2] };
        let q = [0.0; 3];
        let b1 = BoundaryInput::random_sinusoids(p, &mut rng, 2);
        let b2 = BoundaryInput::random_sinusoids(p, &mut rng, 2);
        let mut s1 = plane_wave_jet(&w1, p, q, 0.0);
        let s2 = plane_wave_jet(&w2, p, q, 0.0);
        s1.omega = s2.omega;
        let c = Complex64::new(re, im);
        let one = Complex64::new(1.0, 0.0);
        let run = |s: &anomaly_core::JetState, b: &BoundaryInput| integrate(s, b, 0.05, 10).unwrap().pop().unwrap();
        let combined = run(&s1.scale(c).add(&s2), &b1.combine(c, &b2, one));
        let separate = run(&s1, &b1).scale(c).add(&run(&s2, &b2));
        prop_assert!(combined.max_abs_diff(&separate) < 1e-10);
    }

    #[test]
    fn grade_one_gram_matches_closed_form(level in 0u32..4, two_j in 0u32..4) {
        let su2 = build_su(2).unwrap();
        let spec = AffineModuleSpec::new(su2, f64::from(level), GroundMultiplet::Spin(two_j), 1).unwrap();
        let mut got = shapovalov_gram(&spec, 1).unwrap().eigenvalues();
        let mut want = grade_one_spectrum(f64::from(level), two_j, CentralForm::Trace);
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        prop_assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn configs_round_trip(samples in 1usize..10_000, p in 2u32..12, steps in 1usize..100) {
        let cfg = SuiteConfig::from_json(&format!(r#"{{"samples": {samples}, "p": {p}}}"#)).unwrap();
        prop_assert_eq!(cfg.samples, samples);
        prop_assert_eq!(cfg.p, p);
        let jet = JetRunConfig::from_json(&format!(r#"{{"omega": 1.0, "kvec": [0.1, 0.2, 0.3], "p": {p}, "dt": 0.01, "steps": {steps}}}"#)).unwrap();
        prop_assert_eq!(jet.run().unwrap().len(), steps + 1);
    }
}
