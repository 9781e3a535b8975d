use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svetlichny::nosignal::check_nosignalling;
use svetlichny::quantum::{
    correlator_closed, correlator_contraction, ghz, measurement_table, optimize_angles, quantum_target,
    quantum_value, AngleSet, OptimizeOptions,
};
use svetlichny::{evaluate, svetlichny_coeffs, Method};

fn mu(m: usize) -> svetlichny::CoefficientTable {
    svetlichny_coeffs(m, Method::Closed).unwrap()
}

/// `φ^0 = 0, φ^1 = π/2` for everyone, with party 1 rotated by `offset`.
fn quarter_turn(m: usize, offset: f64) -> AngleSet {
    let mut phi = vec![[0.0, FRAC_PI_2]; m];
    phi[0][0] += offset;
    phi[0][1] += offset;
    AngleSet::equatorial(phi).unwrap()
}

#[test]
fn ghz_three() {
    let s = ghz(3).unwrap();
    let a = s.amplitudes();
    assert_eq!(a.len(), 8);
    assert!((a[0].re - FRAC_1_SQRT_2).abs() < 1e-15 && (a[7].re - FRAC_1_SQRT_2).abs() < 1e-15);
    assert!(a[1..7].iter().all(|c| c.norm() == 0.0));
}

#[test]
fn correlator_examples() {
    let a = AngleSet::equatorial(vec![[0.0, 0.0], [FRAC_PI_4, 0.0]]).unwrap();
    assert!((correlator_contraction(&a, 0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((correlator_closed(&a, 0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn zero_angles_give_coefficient_sum() {
    let zero = AngleSet::equatorial(vec![[0.0; 2]; 4]).unwrap();
    let sum: f64 = mu(4).values().iter().map(|v| v.to_f64()).sum();
    assert_eq!(sum, 1.0);
    assert!((quantum_value(&zero, &mu(4)).unwrap() - sum).abs() < 1e-12);
}

#[test]
fn known_optimum_three_parties() {
    // With all settings a quarter turn apart, some common offset in
    // multiples of π/4 reaches the target.
    for m in 2..=6 {
        let best = (0..8)
            .map(|k| quantum_value(&quarter_turn(m, k as f64 * FRAC_PI_4), &mu(m)).unwrap())
            .fold(f64::MIN, f64::max);
        assert!((best - quantum_target(m)).abs() < 1e-9, "m = {m}: {best}");
    }
    assert!((quantum_target(3) - SQRT_2).abs() < 1e-15);
}

#[test]
fn optimizer_reaches_targets() {
    for (m, tol) in [(2usize, 1e-6), (3, 1e-6), (4, 1e-6), (5, 1e-5), (6, 1e-5)] {
        let r = optimize_angles(m, OptimizeOptions { tol, ..Default::default() }).unwrap();
        assert!(r.converged, "m = {m}: {}", r.value);
        assert!((r.value - quantum_target(m)).abs() < tol);
        assert!(r.value <= quantum_target(m) + 1e-9);
        // recomputing from the reported angles by full contraction
        let general = AngleSet::general(vec![[FRAC_PI_2; 2]; m], r.angles.phi().to_vec()).unwrap();
        assert!((quantum_value(&general, &mu(m)).unwrap() - r.value).abs() < 1e-9);
    }
}

#[test]
fn optimizer_is_deterministic() {
    let opts = OptimizeOptions { restarts: 8, seed: 42, ..Default::default() };
    assert_eq!(optimize_angles(4, opts).unwrap(), optimize_angles(4, opts).unwrap());
}

#[test]
fn general_mode_finds_no_more() {
    for m in [2usize, 3] {
        let r = optimize_angles(m, OptimizeOptions { general: true, restarts: 8, ..Default::default() }).unwrap();
        assert!(r.converged);
        assert!(r.value <= quantum_target(m) + 1e-9);
        assert!(r.angles.theta().is_some());
    }
    assert!(optimize_angles(5, OptimizeOptions { general: true, ..Default::default() }).is_err());
}

#[test]
fn optimal_table_evaluates_to_target() {
    let r = optimize_angles(3, OptimizeOptions::default()).unwrap();
    let t = measurement_table(&r.angles).unwrap();
    assert!((evaluate(&t, &mu(3)).unwrap().to_f64() - SQRT_2).abs() < 1e-6);
    assert_eq!(check_nosignalling(&t, 1e-10).unwrap(), None);
}

#[test]
fn random_probes_stay_below_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for m in [3usize, 4] {
        let c = mu(m);
        let target = quantum_target(m);
        for _ in 0..20_000 {
            let a = AngleSet::random_equatorial(m, &mut rng).unwrap();
            assert!(quantum_value(&a, &c).unwrap() <= target + 1e-9);
        }
        for _ in 0..2_000 {
            let a = AngleSet::random_general(m, &mut rng).unwrap();
            assert!(quantum_value(&a, &c).unwrap() <= target + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_contraction(m in 2usize..=6, seed in any::<u64>(), x in any::<u32>()) {
        let a = AngleSet::random_equatorial(m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let x = x & ((1 << m) - 1);
        prop_assert!((correlator_closed(&a, x).unwrap() - correlator_contraction(&a, x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn tables_are_normalised_and_nosignalling(m in 2usize..=5, seed in any::<u64>(), general in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = if general {
            AngleSet::random_general(m, &mut rng).unwrap()
        } else {
            AngleSet::random_equatorial(m, &mut rng).unwrap()
        };
        let t = measurement_table(&a).unwrap();
        prop_assert!(t.validate(1e-12).is_ok());
        prop_assert_eq!(check_nosignalling(&t, 1e-10).unwrap(), None);
        // the table reproduces the correlators it was built from
        for x in 0..1u32 << m {
            prop_assert!((t.correlator(x) - correlator_contraction(&a, x).unwrap()).abs() < 1e-10);
        }
        prop_assert!((evaluate(&t, &mu(m)).unwrap().to_f64() - quantum_value(&a, &mu(m)).unwrap()).abs() < 1e-10);
    }
}
