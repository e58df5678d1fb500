use std::collections::HashSet;
use std::fs;

use aqt::analysis::closed_form_total_time;
use aqt::cli::{derive_seed, fmt_f64, run};
use proptest::prelude::*;

fn run_in(args: &[&str]) -> i32 {
    run(std::iter::once("aqt").chain(args.iter().copied()))
}

fn last_row(path: &std::path::Path) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect()
}

proptest! {
    #[test]
    fn floats_survive_csv(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let back: f64 = fmt_f64(x).parse().unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }
}

#[test]
fn derived_seeds_do_not_collide() {
    let mut seen = HashSet::new();
    for i in 0..100_000u32 {
        let (n, k) = (i / 100, i % 100);
        assert!(seen.insert(derive_seed(7, &["random1d", &n.to_string(), &k.to_string()])));
    }
    assert_ne!(derive_seed(7, &["ab", "c"]), derive_seed(7, &["a", "bc"]));
    assert_ne!(derive_seed(7, &["x"]), derive_seed(8, &["x"]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(&["--help"]), 0);
    assert_eq!(run_in(&["--version"]), 0);
    assert_eq!(run_in(&["frobnicate"]), 2);
    assert_eq!(run_in(&["schedule", "--l", "many"]), 2);
    let missing = dir.path().join("missing.csv");
    assert_eq!(run_in(&["fit", "--input", missing.to_str().unwrap()]), 1);
    let out = dir.path().join("s.csv");
    assert_eq!(run_in(&["schedule", "--eps=-1", "-o", out.to_str().unwrap()]), 1);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("aqt.toml");
    fs::write(&cfg, "[schedule]\nl = 16\npoints = 5\n").unwrap();
    let out = dir.path().join("sched.csv");
    let (cfg, out_s) = (cfg.to_str().unwrap(), out.to_str().unwrap());

    assert_eq!(run_in(&["--config", cfg, "schedule", "-o", out_s]), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 6);
    let t = last_row(&out)[0];
    assert!((t - closed_form_total_time(16, 0.01)).abs() < 1e-9 * t);

    assert_eq!(run_in(&["--config", cfg, "schedule", "--points", "7", "--l", "20", "-o", out_s]), 0);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 8);
    let t = last_row(&out)[0];
    assert!((t - closed_form_total_time(20, 0.01)).abs() < 1e-9 * t);

    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sched.csv.run.json")).unwrap()).unwrap();
    assert_eq!(record["outputs"].as_array().unwrap().len(), 1);
}

#[test]
fn scaling_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let args = ["scaling", "--sizes", "6,8", "--samples", "2", "--chi", "16", "-o", out.to_str().unwrap()];
        assert_eq!(run_in(&args), 0);
        bytes.push(fs::read(&out).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let text = String::from_utf8(bytes.pop().unwrap()).unwrap();
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn compile_and_scan() {
    let dir = tempfile::tempdir().unwrap();
    let circ = dir.path().join("h.circ");
    fs::write(&circ, "QUBITS 1 INPUTS 0\nH 0\n").unwrap();
    let graph = dir.path().join("g.json");
    assert_eq!(run_in(&["compile", circ.to_str().unwrap(), "-o", graph.to_str().unwrap()]), 0);
    let curve = dir.path().join("c.csv");
    let args = ["gap-scan", "--graph", graph.to_str().unwrap(), "--s-grid", "0:1:5", "-o", curve.to_str().unwrap()];
    assert_eq!(run_in(&args), 0);
    let text = fs::read_to_string(&curve).unwrap();
    assert_eq!(text.lines().next().unwrap(), "s,e0,e1,e2,e3,e4,e5,gap");
    assert_eq!(text.lines().count(), 6);
}
