use aqt::analysis::{
    closed_form_total_time, error_amplitude, fit_power_law, schedule_closed_form, schedule_numeric, thermal_fraction,
    thermal_fraction_limit, xx_correlation, CorrelationMethod,
};
use aqt::core_model::{build_chain, build_wire, random_symmetric_chain_angles, BoundarySign};
use aqt::freefermion::{
    build_matrices, closed_form_modes, modes_numeric, omega_k, perturbed_modes, wire_chain_lengths, wire_gap,
    zero_mode_residual, zero_mode_vector,
};
use aqt::mps1d::{gap_above_manifold, ground_state, DmrgOptions};
use aqt::spectral_ed::low_spectrum;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_numeric(l in 1usize..40, s in 0.0f64..=1.0) {
        let num = modes_numeric(&build_matrices(l, s, None).unwrap()).unwrap();
        let cf = closed_form_modes(l, s).unwrap();
        for (a, b) in num.omegas.iter().zip(&cf.omegas) {
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
    }

    #[test]
    fn zero_mode_is_annihilated(l in 1usize..40, s in 0.01f64..=1.0) {
        let m = build_matrices(l, s, None).unwrap();
        let phi = zero_mode_vector(l, s).unwrap();
        prop_assert!(zero_mode_residual(&m, &phi) < 1e-10);
    }

    #[test]
    fn fit_recovers_power_laws(p in -2.0f64..2.0, c in 0.1f64..10.0) {
        let pts: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0].iter().map(|&n: &f64| (n, c * n.powf(p))).collect();
        let fit = fit_power_law(&pts).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-10);
        prop_assert!((fit.coefficient - c).abs() < 1e-9 * c);
    }
}

#[test]
fn wire_lengths_and_gap() {
    assert_eq!(wire_chain_lengths(9), (4, 4));
    assert_eq!(wire_chain_lengths(10), (5, 4));
    assert!((omega_k(4, 0.5, 4) - wire_gap(9, 0.5)).abs() < 1e-15 || wire_gap(9, 0.5) <= omega_k(4, 0.5, 4));
    assert!(zero_mode_vector(4, 0.0).is_err());
}

#[test]
fn perturbation_keeps_zero_mode() {
    let clean = closed_form_modes(10, 0.4).unwrap();
    for seed in 0..20 {
        let p = perturbed_modes(10, 0.4, 0.1, seed).unwrap();
        assert!(p.zero_mode().abs() < 1e-10);
        for (a, b) in p.omegas.iter().zip(&clean.omegas) {
            assert!((a - b).abs() <= 0.4 + 1e-12);
        }
    }
}

#[test]
fn dmrg_matches_ed_on_wire() {
    let n = 12;
    let (_, spec) = build_wire(n, BoundarySign::Uniform).unwrap();
    let opts = DmrgOptions::default();
    for s in [0.0, 0.3, 0.5, 0.8] {
        let ed = low_spectrum(&spec, s, 4).unwrap().eigenvalues;
        let gs = ground_state(&spec, s, &opts).unwrap();
        assert!((gs.energy() - ed[0]).abs() < 1e-7, "s = {s}: {} vs {}", gs.energy(), ed[0]);
        if s == 0.0 {
            assert!((gs.energy() + (n - 1) as f64).abs() < 1e-7);
        }
        let g = gap_above_manifold(&spec, s, &opts).unwrap();
        assert_eq!(g.manifold, 2, "s = {s}");
        assert!((g.gap.unwrap() - wire_gap(n, s)).abs() < 1e-6, "s = {s}");
    }
}

#[test]
fn dmrg_matches_ed_on_random_chain() {
    let n = 12;
    let a = random_symmetric_chain_angles(n, &mut ChaCha8Rng::seed_from_u64(3));
    let (_, spec) = build_chain(&a, BoundarySign::Uniform).unwrap();
    let ed = low_spectrum(&spec, 0.5, 6).unwrap().eigenvalues;
    let g = gap_above_manifold(&spec, 0.5, &DmrgOptions::default()).unwrap();
    assert!((g.energies[0] - ed[0]).abs() < 1e-6);
    let ed_gap = ed.iter().find(|&&e| e - ed[0] > 1e-8 * n as f64).unwrap() - ed[0];
    assert!((g.gap.unwrap() - ed_gap).abs() < 1e-6, "{:?} vs {ed_gap}", g.gap);
}

#[test]
fn gap_is_stable_in_bond_dimension() {
    let a = random_symmetric_chain_angles(24, &mut ChaCha8Rng::seed_from_u64(11));
    let (_, spec) = build_chain(&a, BoundarySign::Uniform).unwrap();
    let lo = gap_above_manifold(&spec, 0.5, &DmrgOptions { chi_max: 16, ..DmrgOptions::default() }).unwrap();
    let hi = gap_above_manifold(&spec, 0.5, &DmrgOptions { chi_max: 32, ..DmrgOptions::default() }).unwrap();
    let (lo, hi) = (lo.gap.unwrap(), hi.gap.unwrap());
    assert!((lo - hi).abs() < 0.01 * hi, "{lo} vs {hi}");
    assert!(gap_above_manifold(&spec, 0.5, &DmrgOptions { chi_max: 4, ..DmrgOptions::default() }).is_err());
}

#[test]
fn schedules_agree() {
    let l = 20;
    let eps = 0.01;
    let grid: Vec<(f64, f64)> = (0..=2000).map(|i| i as f64 / 2000.0).map(|s| (s, omega_k(l, s, l))).collect();
    let num = schedule_numeric(&grid, eps).unwrap();
    let total = closed_form_total_time(l, eps);
    assert!((num.total_time - total).abs() < 1e-3 * total);
    let cf = schedule_closed_form(l, eps, 101).unwrap();
    assert_eq!(cf.samples.len(), 101);
    assert!(cf.samples.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1));
    assert!(schedule_numeric(&[(0.0, 1.0), (1.0, 0.0)], eps).is_err());
}

#[test]
fn correlations_and_amplitude() {
    let half = xx_correlation(0.5, CorrelationMethod::Elliptic).unwrap().value;
    assert!((half - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    for s in [0.1, 0.3, 0.7, 0.9] {
        let q = xx_correlation(s, CorrelationMethod::Quadrature).unwrap().value;
        let e = xx_correlation(s, CorrelationMethod::Elliptic).unwrap().value;
        assert!((q - e).abs() < 1e-9, "s = {s}");
    }
    assert!(xx_correlation(1.0, CorrelationMethod::Quadrature).is_err());
    let big = error_amplitude(1_000_000, 1.0 - 1e6f64.powf(-0.6)).unwrap();
    assert!(big > 0.95);
}

#[test]
fn thermal_fraction_approaches_limit() {
    let limit = thermal_fraction_limit(0.2);
    let f = thermal_fraction(60, 0.2).unwrap();
    assert!((f - limit).abs() < 0.02, "{f} vs {limit}");
}
