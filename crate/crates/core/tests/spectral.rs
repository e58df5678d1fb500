use aqt::compiler::{compile, compiled_unitary_reference, parse_circuit};
use aqt::core_model::{build_chain, build_wire, random_symmetric_chain_angles, BoundarySign, InterpolationSpec};
use aqt::freefermion::wire_gap;
use aqt::spectral_ed::{
    adiabatic_evolve, dense_eigen, duality_check, duality_deviation, gap_curve, linspace, logical_fidelity,
    lowest_eigenpairs, prepare_by_projection, EigenOptions, Ramp, Sweep,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_chain(n: usize, seed: u64) -> (aqt::core_model::TwistedGraph, InterpolationSpec) {
    let a = random_symmetric_chain_angles(n, &mut ChaCha8Rng::seed_from_u64(seed));
    build_chain(&a, BoundarySign::Uniform).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lanczos_matches_dense(n in 3usize..8, seed in any::<u64>(), s in 0.0f64..1.0) {
        let (_, spec) = random_chain(n, seed);
        let op = spec.operator(s).unwrap();
        let (dense, _) = dense_eigen(op.dense());
        let opts = EigenOptions { dense_max: 0, ..EigenOptions::default() };
        let lz = lowest_eigenpairs(&op, 4, &opts).unwrap();
        for (a, b) in lz.values.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn mirror_chains_are_self_dual(n in 3usize..9, seed in any::<u64>()) {
        let (g, spec) = random_chain(n, seed);
        let d = duality_check(&g, &spec, &[0.1, 0.3, 0.45], 4).unwrap();
        prop_assert!(d < 1e-8, "deviation {}", d);
    }
}

#[test]
fn asymmetric_chain_breaks_duality() {
    let (g, spec) = build_chain(&[0.0, 0.4, 1.9, 0.7, 0.0], BoundarySign::Uniform).unwrap();
    assert!(duality_check(&g, &spec, &[0.3], 4).is_err());
    assert!(duality_deviation(&spec, &[0.3], 4).unwrap() > 1e-4);
}

#[test]
fn wire_gap_curve_matches_free_fermions() {
    let (_, spec) = build_wire(10, BoundarySign::Printed).unwrap();
    let curve = gap_curve(&spec, &linspace(0.0, 1.0, 11), true).unwrap();
    for sl in &curve.slices {
        assert_eq!(sl.ground_degeneracy, 2, "s = {}", sl.s);
        assert!((sl.gap - wire_gap(10, sl.s)).abs() < 1e-8);
    }
    assert!((curve.best_argmin() - 0.5).abs() < 1e-3);
}

#[test]
fn grid_must_increase() {
    let (_, spec) = build_wire(4, BoundarySign::Uniform).unwrap();
    assert!(gap_curve(&spec, &[0.5, 0.2], false).is_err());
    assert!(gap_curve(&spec, &[], false).is_err());
}

#[test]
fn evolution_preserves_norm_and_stays_adiabatic() {
    let (_, spec) = build_wire(4, BoundarySign::Uniform).unwrap();
    let psi = prepare_by_projection(4, &spec.h_init, &[], &[], 1).unwrap();
    let out = adiabatic_evolve(&spec, &Sweep::Ramp { total_time: 60.0, ramp: Ramp::Smoother }, &psi).unwrap();
    let norm: f64 = out.state.iter().map(|z| z.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-12);
    // final energy sits in the ground manifold of H(1)
    let e = spec.final_operator().expectation(&out.state);
    let (levels, _) = dense_eigen(spec.final_operator().dense());
    assert!((e - levels[0]).abs() < 1e-3, "{e} vs {}", levels[0]);
}

#[test]
fn circuit_round_trip_and_fidelity() {
    let c = parse_circuit("QUBITS 1 INPUTS 0\nH 0\n").unwrap();
    let g = compile(&c).unwrap();
    assert_eq!(g.n(), 2);
    let u = compiled_unitary_reference(&c).unwrap();
    assert!((u[(0, 0)].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    let rep = logical_fidelity(&g, &c, 100.0, Ramp::Smoother).unwrap();
    assert!(rep.worst > 0.999, "{rep:?}");
    assert_eq!(rep.probes.len(), 4);
}

#[test]
fn compiled_chain_lengths() {
    for (text, n) in [
        ("QUBITS 1 INPUTS 0\nRZ 0 0\n", 3),
        ("QUBITS 1 INPUTS 0\nH 0\nH 0\n", 3),
        ("QUBITS 2 INPUTS 0,1\nCZ 0 1\n", 6),
    ] {
        assert_eq!(compile(&parse_circuit(text).unwrap()).unwrap().n(), n, "{text}");
    }
    assert!(parse_circuit("QUBITS 1 INPUTS 0\nFOO 0\n").is_err());
    assert!(parse_circuit("QUBITS 1 INPUTS 0\nH 3\n").is_err());
}
