//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
//!
//! `cargo test -p aqt-acceptance -- 1 9 12` runs a subset; 13 reuses the fig4 output of 4
//! when both are selected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use aqt::analysis::{
    closed_form_total_time, error_amplitude, first_order_support, schedule_numeric, thermal_fraction, thermal_fraction_limit,
    window_time, xx_correlation, CorrelationMethod,
};
use aqt::cli::experiments::{fig5, fig5_config};
use aqt::cli::{derive_seed, run};
use aqt::compiler::{compile, parse_circuit};
use aqt::core_model::{
    build_chain, build_wire, random_symmetric_chain_angles, BoundarySign, Commutation, Factor, PauliSum, PauliTerm,
};
use aqt::freefermion::{
    build_matrices, closed_form_modes, modes_numeric, omega_k, perturbed_modes, wire_gap, zero_mode_residual,
    zero_mode_vector,
};
use aqt::gadgets::{build_amplifier, verify_amplifier, verify_router, Amplifier, RouterField};
use aqt::spectral_ed::{
    duality_check, excited_start_error_map, gap_curve, linspace, logical_fidelity, low_spectrum, prepare_by_projection,
    PauliLabel, Ramp,
};
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::SeedableRng;

type Outcome = Result<String, String>;

const MASTER_SEED: u64 = 7;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn free_fermion_exactness() -> Outcome {
    let (mut worst, mut worst_zero) = (0.0f64, 0.0f64);
    for l in 1..=64 {
        for s in linspace(0.0, 1.0, 101) {
            let m = build_matrices(l, s, None).map_err(e)?;
            let num = modes_numeric(&m).map_err(e)?;
            let closed = closed_form_modes(l, s).map_err(e)?;
            for (a, b) in num.omegas.iter().zip(&closed.omegas) {
                worst = worst.max((a - b).abs());
            }
            // the printed vector is undefined at s = 0; the numeric zero mode stands in
            let residual = if s == 0.0 {
                num.zero_mode().abs()
            } else {
                zero_mode_residual(&m, &zero_mode_vector(l, s).map_err(e)?)
            };
            worst_zero = worst_zero.max(residual);
        }
    }
    check(
        worst <= 1e-10 && worst_zero <= 1e-12,
        format!("max |numeric - closed| = {worst:.2e}, max zero-mode residual = {worst_zero:.2e}"),
    )
}

fn ed_vs_free_fermion() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=14 {
        let (_, spec) = build_wire(n, BoundarySign::Printed).map_err(e)?;
        for s in linspace(0.0, 1.0, 21) {
            let ed = low_spectrum(&spec, s, 4).map_err(e)?.gap;
            worst = worst.max((ed - wire_gap(n, s)).abs());
        }
    }
    check(worst <= 1e-8, format!("n = 2..14, 21 s-points: max |ED - free fermion| = {worst:.2e}"))
}

fn duality() -> Outcome {
    let (mut worst, mut worst_loc) = (0.0f64, 0.0f64);
    let grid = linspace(0.0, 1.0, 11);
    for n in 4..=12 {
        for k in 0..5 {
            let seed = derive_seed(MASTER_SEED, &["duality", &n.to_string(), &k.to_string()]);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (g, spec) = build_chain(&random_symmetric_chain_angles(n, &mut rng), BoundarySign::Uniform).map_err(e)?;
            worst = worst.max(duality_check(&g, &spec, &grid, 6).map_err(e)?);
            let curve = gap_curve(&spec, &linspace(0.0, 1.0, 21), true).map_err(e)?;
            worst_loc = worst_loc.max((curve.best_argmin() - 0.5).abs());
        }
    }
    check(
        worst <= 1e-8 && worst_loc <= 1e-3,
        format!("n = 4..12 x 5 seeds: max spectral deviation {worst:.2e}, max |argmin - 1/2| = {worst_loc:.2e}"),
    )
}

fn reproduce_fig4(dir: &Path) -> Result<(), String> {
    let args = ["aqt", "reproduce", "fig4", "--desk", "--seed", &MASTER_SEED.to_string(), "--out"];
    let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    argv.push(dir.display().to_string());
    match run(argv) {
        0 => Ok(()),
        code => Err(format!("reproduce fig4 exited with {code}")),
    }
}

fn fig4_scaling(dir: &Path) -> Outcome {
    reproduce_fig4(dir)?;
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("fit.json")).map_err(e)?).map_err(e)?;
    let r = &fit["results"];
    let p = r["fit"]["exponent"].as_f64().ok_or("no exponent")?;
    let c = r["fit"]["coefficient"].as_f64().ok_or("no coefficient")?;
    let max_var = r["max_variance"].as_f64().ok_or("no variance")?;
    let flagged = r["flagged"].as_array().map(|a| a.len()).unwrap_or(usize::MAX);
    let sizes: Vec<(u64, u64)> = r["per_size"]
        .as_array()
        .ok_or("no per_size")?
        .iter()
        .map(|x| (x["n"].as_u64().unwrap_or(0), x["samples"].as_u64().unwrap_or(0)))
        .collect();
    let want = [8, 16, 24, 32, 48, 64];
    let sizes_ok = sizes.len() == want.len() && sizes.iter().zip(want).all(|(a, n)| a.0 == n && a.1 >= 20);
    check(
        (-1.3..=-0.7).contains(&p) && (3.0..=8.0).contains(&c) && max_var < 1e-6 && sizes_ok && flagged == 0,
        format!("gap = {c:.3} n^{p:.3}, max variance {max_var:.2e}, {flagged} flagged cells, sizes {sizes:?}"),
    )
}

fn fig5_scaling() -> Outcome {
    let f = fig5(fig5_config(MASTER_SEED)).map_err(e)?;
    let even_odd: Vec<String> = f.even_odd.iter().map(|x| format!("L={}: {:.3}", x.l, x.gap_times_n)).collect();
    println!("    fig5 even/odd (untwisted gap*n): {}", even_odd.join(", "));
    let per: Vec<String> = f.per_size.iter().map(|p| format!("n={}: {:.3}", p.n, p.mean_gap_times_n)).collect();
    let c = f.coefficient;
    check(
        (1.63 / 2.0..=1.63 * 2.0).contains(&c),
        format!("c = {c:.3} (per size mean gap*n {})", per.join(", ")),
    )
}

const CIRCUITS: [(&str, &str, f64, f64); 4] = [
    ("H", "QUBITS 1 INPUTS 0\nH 0\n", 200.0, 0.999),
    ("identity", "QUBITS 1 INPUTS 0\nRZ 0 0\n", 200.0, 0.999),
    ("Rz(pi/4)", "QUBITS 1 INPUTS 0\nRZ 0 pi/4\n", 200.0, 0.999),
    ("H; CZ", "QUBITS 2 INPUTS 0,1\nH 0\nCZ 0 1\n", 400.0, 0.99),
];

fn end_to_end() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, text, t, bound) in CIRCUITS {
        let c = parse_circuit(text).map_err(e)?;
        let g = compile(&c).map_err(e)?;
        let adiabatic = logical_fidelity(&g, &c, t, Ramp::Linear).map_err(e)?.worst;
        let quench = logical_fidelity(&g, &c, 0.1, Ramp::Linear).map_err(e)?.worst;
        ok &= adiabatic >= bound && quench < 0.9;
        parts.push(format!("{name}: {adiabatic:.5} (quench {quench:.3})"));
    }
    check(ok, parts.join(", "))
}

fn commutes(a: &PauliTerm, b: &PauliTerm) -> bool {
    a.commutation(b) == Commutation::Commute
}

fn error_map() -> Outcome {
    let map = excited_start_error_map(5, &[2], 200.0).map_err(e)?;
    let z_ok = map.label == PauliLabel::Z && map.fidelity > 0.99;

    // X on a bulk vertex anticommutes with exactly its two neighbours' terms
    let n = 8;
    let (_, spec) = build_wire(n, BoundarySign::Uniform).map_err(e)?;
    let psi = prepare_by_projection(n, &spec.h_init, &[], &[], 3).map_err(e)?;
    let mut flip_counts = Vec::new();
    for i in 2..=n - 2 {
        let x = PauliTerm::single(1.0, i, Factor::X);
        let kicked = aqt::core_model::apply_term(&x, &psi);
        let flips = spec
            .h_init
            .iter()
            .filter(|t| {
                let before = PauliSum::new(n, &[(*t).clone()]).expectation(&psi);
                let after = PauliSum::new(n, &[(*t).clone()]).expectation(&kicked);
                (before - after).abs() > 1.0
            })
            .count();
        let symbolic = spec.h_init.iter().filter(|t| !commutes(t, &x)).count();
        if flips != symbolic {
            return Err(format!("X_{i}: {flips} flipped eigenvalues vs {symbolic} anticommuting terms"));
        }
        flip_counts.push(flips);
    }
    let two_ok = flip_counts.iter().all(|&k| k == 2);

    let (_, spec6) = build_wire(6, BoundarySign::Uniform).map_err(e)?;
    let mut support = 0;
    for v in 0..6 {
        for f in [Factor::X, Factor::Y, Factor::Z] {
            support = support.max(first_order_support(&spec6, Some(&PauliTerm::single(1.0, v, f))).map_err(e)?);
        }
    }
    check(
        z_ok && two_ok && support <= 3,
        format!(
            "flipped bulk term -> {:?} (fidelity {:.4}); bulk X flips {:?}; max first-order support {support}",
            map.label, map.fidelity, flip_counts
        ),
    )
}

fn schedule() -> Outcome {
    let eps = 0.01;
    let mut worst_rel = 0.0f64;
    for l in [16, 32, 40, 64] {
        let grid: Vec<(f64, f64)> = linspace(0.0, 1.0, 4001).into_iter().map(|s| (s, omega_k(l, s, l))).collect();
        let numeric = schedule_numeric(&grid, eps).map_err(e)?.total_time;
        let closed = closed_form_total_time(l, eps);
        worst_rel = worst_rel.max((numeric - closed).abs() / closed);
    }
    let t = |l| closed_form_total_time(l, eps);
    let ratios = [t(32) / t(16), t(64) / t(32)];
    let linear_ok = ratios.iter().all(|r| (r / 2.0 - 1.0).abs() <= 0.05);
    let windows = [16usize, 64, 256]
        .into_iter()
        .map(|l| window_time(l, eps, (l as f64).powf(-0.5)).map(|w| w.integrated))
        .collect::<aqt::Result<Vec<_>>>()
        .map_err(e)?;
    let spread = windows.iter().cloned().fold(0.0, f64::max) / windows.iter().cloned().fold(f64::INFINITY, f64::min);
    let bounded = windows.iter().all(|&w| w <= 1.0 / eps);
    check(
        worst_rel <= 0.02 && linear_ok && spread <= 2.0,
        format!(
            "closed vs quadrature {:.2e}; T ratios {:.4}, {:.4}; window times {:.3?} (max/min {spread:.2}, all <= 1/eps: {bounded})",
            worst_rel, ratios[0], ratios[1], windows
        ),
    )
}

fn correlations() -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..501 {
        let s = i as f64 / 501.0;
        let q = xx_correlation(s, CorrelationMethod::Quadrature).map_err(e)?.value;
        let k = xx_correlation(s, CorrelationMethod::Elliptic).map_err(e)?.value;
        worst = worst.max((q - k).abs());
    }
    let half_k = xx_correlation(0.5, CorrelationMethod::Elliptic).map_err(e)?.value;
    let half_q = xx_correlation(0.5, CorrelationMethod::Quadrature).map_err(e)?.value;
    let half_err = (half_k - 2.0 / PI).abs().max((half_q - 2.0 / PI).abs());
    let sizes: Vec<usize> = (1..=6).map(|k| 10usize.pow(k)).collect();
    let amp = |a: f64| {
        sizes
            .iter()
            .map(|&n| error_amplitude(n, 1.0 - (n as f64).powf(-a)))
            .collect::<aqt::Result<Vec<f64>>>()
    };
    let slow = amp(0.6).map_err(e)?;
    let fast = amp(0.4).map_err(e)?;
    // exponent 0.4 rises before n ~ 100 and decays like exp(-c n^0.2) after; judge the tail
    let tail = |v: &[f64]| v[2..].to_vec();
    let rising = tail(&slow).windows(2).all(|w| w[1] >= w[0]) && *slow.last().unwrap() > 0.95;
    let falling = tail(&fast).windows(2).all(|w| w[1] <= w[0]) && *fast.last().unwrap() < 0.25;
    check(
        worst <= 1e-8 && half_err <= 1e-10 && rising && falling,
        format!(
            "max |quad - elliptic| {worst:.2e}; |C(1/2) - 2/pi| {half_err:.1e}; amplitude at n=10..1e6: exponent 0.6 {:.4?}, exponent 0.4 {:.4?}",
            slow, fast
        ),
    )
}

fn thermal() -> Outcome {
    let a = thermal_fraction(20, 0.2).map_err(e)?;
    let b = thermal_fraction(60, 0.2).map_err(e)?;
    let lim = 1.0 - 2.0 / PI * 0.1f64.acos();
    let lib = thermal_fraction_limit(0.2);
    let d = (a - b).abs().max((a - lim).abs()).max((b - lim).abs());
    check(
        d <= 0.02 && (lib - lim).abs() < 1e-12,
        format!("fraction(20) {a:.4}, fraction(60) {b:.4}, limit {lim:.4}; max difference {d:.4}"),
    )
}

fn static_perturbation() -> Outcome {
    let (l, lambda) = (10, 0.1);
    let (mut shift, mut zero) = (0.0f64, 0.0f64);
    for k in 0..100 {
        let seed = derive_seed(MASTER_SEED, &["static", &k.to_string()]);
        for s in linspace(0.0, 1.0, 51) {
            let p = perturbed_modes(l, s, lambda, seed).map_err(e)?;
            let c = closed_form_modes(l, s).map_err(e)?;
            for (a, b) in p.omegas.iter().zip(&c.omegas) {
                shift = shift.max((a - b).abs());
            }
            zero = zero.max(p.zero_mode().abs());
        }
    }
    check(
        shift <= 4.0 * lambda && zero <= 1e-10,
        format!("max mode shift {shift:.4} (bound {:.1}), max zero mode {zero:.1e}", 4.0 * lambda),
    )
}

fn factor(c: char) -> Factor {
    match c {
        'X' => Factor::X,
        'Y' => Factor::Y,
        _ => Factor::Z,
    }
}

fn pauli_dense(n: usize, ops: &[(usize, char)]) -> DMatrix<C> {
    let factors = ops.iter().map(|&(q, c)| (q, factor(c))).collect();
    PauliSum::new(n, &[PauliTerm::new(1.0, factors).expect("term")]).dense()
}

/// Leaf Z_iZ_j fixed on the code left by an ideal sweep, found without the tableau:
/// conserved strings are enumerated over all 4^n Paulis and their signs read off the
/// initial ground space.
fn repetition_brute_force(a: &Amplifier) -> Result<bool, String> {
    let n = a.graph.n();
    let terms = a.graph.cluster_terms();
    let fields: Vec<PauliTerm> = a.field_support.iter().map(|&v| PauliTerm::single(1.0, v, Factor::X)).collect();
    let dim = 1usize << n;
    let psi = prepare_by_projection(n, &terms, &[], &[], 5).map_err(e)?;
    let mut proj = DMatrix::<C>::identity(dim, dim);
    for code in 1..4usize.pow(n as u32) {
        let ops: Vec<(usize, char)> = (0..n)
            .filter_map(|q| match code / 4usize.pow(q as u32) % 4 {
                1 => Some((q, 'X')),
                2 => Some((q, 'Y')),
                3 => Some((q, 'Z')),
                _ => None,
            })
            .collect();
        let p = PauliTerm::new(1.0, ops.iter().map(|&(q, c)| (q, factor(c))).collect()).map_err(e)?;
        if !terms.iter().chain(&fields).all(|t| commutes(t, &p)) {
            continue;
        }
        // sign fixed by the initial state for every logical value: only stabilizer elements qualify
        let m = pauli_dense(n, &ops);
        let v = nalgebra::DVector::from_vec(psi.clone());
        let ev = (v.adjoint() * &m * &v)[(0, 0)].re;
        if (ev.abs() - 1.0).abs() > 1e-9 {
            continue;
        }
        proj = &proj * (DMatrix::identity(dim, dim) + m * C::new(ev.signum(), 0.0)) * C::new(0.5, 0.0);
    }
    for &v in &a.field_support {
        proj = &proj * (DMatrix::identity(dim, dim) + pauli_dense(n, &[(v, 'X')])) * C::new(0.5, 0.0);
    }
    let rank = proj.trace().re;
    if rank < 0.5 {
        return Err("empty code space".into());
    }
    for (i, &p) in a.leaves.iter().enumerate() {
        for &q in &a.leaves[i + 1..] {
            let zz = pauli_dense(n, &[(p, 'Z'), (q, 'Z')]);
            if (&zz * &proj - &proj).norm() > 1e-8 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn gadgets() -> Outcome {
    let xf = verify_router(RouterField::F, 200.0).map_err(e)?.x_out;
    let xfp = verify_router(RouterField::Fp, 200.0).map_err(e)?.x_out;
    let router_ok = (xf - 1.0).abs() <= 1e-6 && (xfp + 1.0).abs() <= 1e-6;
    let mut parts = vec![format!("router <X_o> f {xf:.9}, f' {xfp:.9}")];
    let mut amp_ok = true;
    for levels in [1, 2] {
        let a = build_amplifier(levels).map_err(e)?;
        let r = verify_amplifier(&a, None).map_err(e)?;
        let split = r.splitting.ok_or("no splitting")?;
        let exact = (split - 2.0 * r.leaves as f64).abs() <= 1e-9;
        let brute = if a.graph.n() <= 6 { Some(repetition_brute_force(&a)?) } else { None };
        amp_ok &= exact && r.repetition_stabilizers && brute.unwrap_or(true);
        parts.push(format!(
            "{} leaves: splitting {split:.12}, tableau repetition {}, brute force {}",
            r.leaves,
            r.repetition_stabilizers,
            brute.map_or("n/a".to_string(), |b| b.to_string())
        ));
    }
    check(router_ok && amp_ok, parts.join("; "))
}

fn determinism(first: &Path, second: &Path) -> Outcome {
    reproduce_fig4(second)?;
    let mut same = Vec::new();
    for name in ["scaling.csv", "fit.json"] {
        let a = std::fs::read(first.join(name)).map_err(e)?;
        let b = std::fs::read(second.join(name)).map_err(e)?;
        same.push((name, a == b, a.len()));
    }
    check(same.iter().all(|x| x.1), format!("byte comparison {same:?}"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
}

const CRITERIA: [Criterion; 13] = [
    Criterion { id: 1, name: "free-fermion exactness", budget: Duration::from_secs(60) },
    Criterion { id: 2, name: "ED vs free fermion", budget: Duration::from_secs(600) },
    Criterion { id: 3, name: "duality", budget: Duration::from_secs(600) },
    Criterion { id: 4, name: "fig4 desk-scale scaling", budget: Duration::from_secs(7200) },
    Criterion { id: 5, name: "fig5 desk-scale scaling", budget: Duration::from_secs(3600) },
    Criterion { id: 6, name: "end-to-end semantics", budget: Duration::from_secs(1800) },
    Criterion { id: 7, name: "error map", budget: Duration::from_secs(600) },
    Criterion { id: 8, name: "schedule", budget: Duration::from_secs(60) },
    Criterion { id: 9, name: "correlations", budget: Duration::from_secs(60) },
    Criterion { id: 10, name: "thermal fraction", budget: Duration::from_secs(1) },
    Criterion { id: 11, name: "static perturbation", budget: Duration::from_secs(60) },
    Criterion { id: 12, name: "gadgets", budget: Duration::from_secs(600) },
    Criterion { id: 13, name: "determinism", budget: Duration::MAX },
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let work = tempfile::tempdir().expect("tempdir");
    let first: PathBuf = work.path().join("fig4-a");
    let second: PathBuf = work.path().join("fig4-b");
    let mut failures = 0;
    for c in CRITERIA.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let start = Instant::now();
        let outcome = match c.id {
            1 => free_fermion_exactness(),
            2 => ed_vs_free_fermion(),
            3 => duality(),
            4 => fig4_scaling(&first),
            5 => fig5_scaling(),
            6 => end_to_end(),
            7 => error_map(),
            8 => schedule(),
            9 => correlations(),
            10 => thermal(),
            11 => static_perturbation(),
            12 => gadgets(),
            _ => {
                if first.join("scaling.csv").exists() {
                    determinism(&first, &second)
                } else {
                    reproduce_fig4(&first).and_then(|_| determinism(&first, &second))
                }
            }
        };
        let elapsed = start.elapsed();
        let over = elapsed > c.budget;
        let (tag, detail) = match outcome {
            Ok(d) if !over => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {:?} budget", c.budget)),
            Err(d) => ("FAIL", d),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!("{tag} [{:>2}] {} ({:.1} s): {detail}", c.id, c.name, elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
