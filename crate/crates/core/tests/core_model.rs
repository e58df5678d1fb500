use aqt::core_model::{
    build_chain, build_square_lattice, build_wire, random_dual_symmetric_angles, random_symmetric_chain_angles, site,
    BoundarySign, Commutation, Factor, PauliSum, PauliTerm, TwistedGraph,
};
use aqt::spectral_ed::{dense_eigen, low_spectrum};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn factor() -> impl Strategy<Value = Factor> {
    prop_oneof![
        Just(Factor::X),
        Just(Factor::Y),
        Just(Factor::Z),
        (0.0..std::f64::consts::TAU).prop_map(Factor::Rot),
    ]
}

fn term(n: usize) -> impl Strategy<Value = PauliTerm> {
    proptest::collection::vec(proptest::option::of(factor()), n)
        .prop_filter("non-empty", |v| v.iter().any(Option::is_some))
        .prop_map(|v| {
            let f = v.into_iter().enumerate().filter_map(|(q, f)| f.map(|f| (q, f))).collect();
            PauliTerm::new(1.0, f).unwrap()
        })
}

proptest! {
    #[test]
    fn commutation_matches_dense(a in term(4), b in term(4)) {
        let ma = PauliSum::new(4, &[a.clone()]).dense();
        let mb = PauliSum::new(4, &[b.clone()]).dense();
        let comm = (&ma * &mb - &mb * &ma).norm();
        let anti = (&ma * &mb + &mb * &ma).norm();
        let want = if comm < 1e-9 {
            Commutation::Commute
        } else if anti < 1e-9 {
            Commutation::Anticommute
        } else {
            Commutation::Neither
        };
        prop_assert_eq!(a.commutation(&b), want);
        prop_assert_eq!(b.commutation(&a), want);
    }

    #[test]
    fn terms_square_to_identity(a in term(3)) {
        let m = PauliSum::new(3, &[a]).dense();
        let id = nalgebra::DMatrix::identity(8, 8);
        prop_assert!((&m * &m - id).norm() < 1e-12);
    }

    #[test]
    fn symmetric_chain_angles_mirror(n in 2usize..40, seed in any::<u64>()) {
        let a = random_symmetric_chain_angles(n, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(a[0], 0.0);
        prop_assert_eq!(a[n - 1], 0.0);
        for v in 0..n {
            prop_assert_eq!(a[v], a[n - 1 - v]);
            prop_assert!((0.0..std::f64::consts::TAU).contains(&a[v]));
        }
    }

    #[test]
    fn graph_json_round_trip(n in 2usize..10, seed in any::<u64>()) {
        let a = random_symmetric_chain_angles(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let (g, _) = build_chain(&a, BoundarySign::Uniform).unwrap();
        let back = TwistedGraph::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back, g);
    }
}

#[test]
fn rejects_bad_graphs() {
    assert!(TwistedGraph::new(vec![0.0; 3], vec![[0, 0]], vec![], vec![], vec![]).is_err());
    assert!(TwistedGraph::new(vec![0.0; 3], vec![[0, 1], [1, 0]], vec![], vec![], vec![]).is_err());
    assert!(TwistedGraph::new(vec![0.0; 3], vec![[0, 3]], vec![], vec![], vec![]).is_err());
    assert!(TwistedGraph::new(vec![f64::NAN; 2], vec![[0, 1]], vec![], vec![], vec![]).is_err());
    assert!(TwistedGraph::from_json("{\"n\": 2}").is_err());
    assert!(build_wire(1, BoundarySign::Uniform).is_err());
}

#[test]
fn wire_terms() {
    let (g, spec) = build_wire(5, BoundarySign::Uniform).unwrap();
    // input term dropped, no field on the output
    assert_eq!(spec.h_init.len(), 4);
    assert_eq!(spec.h_final.len(), 4);
    assert!(spec.h_final.iter().all(|t| t.factor_on(4).is_none()));
    assert_eq!(g.neighbors(2), vec![1, 3]);
    // at s = 0 all cluster terms are satisfied
    let e0 = low_spectrum(&spec, 0.0, 3).unwrap().eigenvalues[0];
    assert!((e0 + 4.0).abs() < 1e-10);
}

#[test]
fn boundary_sign_is_a_gauge() {
    let (_, printed) = build_wire(6, BoundarySign::Printed).unwrap();
    let (_, uniform) = build_wire(6, BoundarySign::Uniform).unwrap();
    for s in [0.0, 0.3, 0.5, 0.8, 1.0] {
        let (a, _) = dense_eigen(printed.operator(s).unwrap().dense());
        let (b, _) = dense_eigen(uniform.operator(s).unwrap().dense());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10, "s = {s}: {x} vs {y}");
        }
    }
}

#[test]
fn lattice_symmetry_is_enforced() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_dual_symmetric_angles(3, &mut rng);
    assert_eq!(a[site(3, 0, 2)], a[site(3, 2, 0)]);
    let (g, _) = build_square_lattice(3, &a, true).unwrap();
    assert_eq!(g.edges().len(), 12);
    let mut bad = a.clone();
    bad[site(3, 0, 1)] += 0.5;
    assert!(build_square_lattice(3, &bad, true).is_err());
    assert!(build_square_lattice(3, &bad, false).is_ok());
}
