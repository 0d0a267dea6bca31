use std::path::{Path, PathBuf};

use dominion_cli::{canonicalize_instance, run};
use serde_json::{json, Value};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Output {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is JSON")
    }

    fn error(&self) -> Value {
        serde_json::from_str(&self.stderr).expect("stderr is JSON")
    }
}

fn dominion(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dominion").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn magnetic_2v() -> Value {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    json!({
        "vertices": ["a", "b"],
        "m": {"a": 1.0, "b": 1.0},
        "edges": [["a", "b", 1.0]],
        "phi": {"a|b": [[h, h]]},
    })
}

#[test]
fn moreau_on_orthant() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "orthant_vec.json", &json!({"cone": {"type": "orthant", "dim": 2}, "g": [1, -2]}));
    let o = dominion(&["moreau", "--in", p(&f)]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let r = o.json();
    assert_eq!(r["h1"], json!([1.0, 0.0]));
    assert_eq!(r["h2"], json!([0.0, 2.0]));
    assert_eq!(r["orthogonality"], json!(0.0));
}

#[test]
fn psd_cone_is_not_isotone() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "psd2.json", &json!({"cone": {"type": "psd", "n": 2}}));
    let o = dominion(&["check-cone", "--property", "isotone", "--in", p(&f)]);
    assert_eq!(o.code, 1);
    let r = o.json();
    assert_eq!(r["report"]["verdict"], "witness");
    assert_eq!(r["report"]["witness"].as_array().unwrap().len(), 2);
    let o = dominion(&["check-cone", "--property", "selfdual", "--in", p(&f)]);
    assert_eq!(o.code, 0);
}

#[test]
fn flagship_instance_is_dominated() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "magnetic_2v.json", &magnetic_2v());
    let o = dominion(&["verify-theorem", "--in", p(&f), "--seed", "7"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let r = o.json();
    assert_eq!(r["unanimous"], true);
    assert_eq!(r["verdicts"], json!({"semigroup": true, "resolvent": true, "form": true}));
    assert!(r["worst_margins"]["semigroup"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn half_laplacian_fails_every_mode() {
    let dir = TempDir::new().unwrap();
    let pair = json!({
        "space": {"weights": [1.0, 1.0]},
        "pairing": "bundle",
        "A": [1.0, -1.0, -1.0, 1.0],
        "B": [0.5, -0.5, -0.5, 0.5],
    });
    let f = write(&dir, "pair.json", &pair);
    for mode in ["semigroup", "resolvent", "form", "all"] {
        let o = dominion(&["check-domination", "--mode", mode, "--in", p(&f), "--samples", "20"]);
        assert_eq!(o.code, 1, "{mode}");
    }
    let o = dominion(&["verify-theorem", "--in", p(&f), "--samples", "20"]);
    assert_eq!(o.code, 1);
    let r = o.json();
    assert_eq!(r["unanimous"], true);
    assert!(r["witness"]["margin"].as_f64().unwrap() < 0.0);

    let o = dominion(&["kato", "--in", p(&f)]);
    assert_eq!(o.code, 2);
    assert_eq!(o.error()["code"], "precondition");
}

#[test]
fn asymmetric_edge_is_rejected_with_pointer() {
    let dir = TempDir::new().unwrap();
    let mut inst = magnetic_2v();
    inst["edges"] = json!([["a", "b", 1.0], ["b", "a", 2.0]]);
    let f = write(&dir, "bad.json", &inst);
    let o = dominion(&["verify-theorem", "--in", p(&f)]);
    assert_eq!(o.code, 2);
    assert_eq!(o.error()["path"], "/edges/1");
    assert!(o.stdout.is_empty());
}

#[test]
fn non_unitary_phi_is_rejected() {
    let dir = TempDir::new().unwrap();
    let mut inst = magnetic_2v();
    inst["phi"] = json!({"a|b": [[1.001, 0.0]]});
    let f = write(&dir, "bad.json", &inst);
    let o = dominion(&["check-domination", "--in", p(&f)]);
    assert_eq!(o.code, 2);
    let e = o.error();
    assert_eq!(e["code"], "invariant");
    assert_eq!(e["path"], "/phi/a|b");
}

#[test]
fn malformed_input_and_bad_flags() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("broken.json");
    std::fs::write(&f, "{\"vertices\": [").unwrap();
    let o = dominion(&["verify-theorem", "--in", p(&f)]);
    assert_eq!((o.code, o.error()["code"].clone()), (2, json!("malformed_json")));

    let g = write(&dir, "ok.json", &magnetic_2v());
    for args in [
        vec!["verify-theorem", "--in", p(&g), "--tol", "0"],
        vec!["verify-theorem", "--in", p(&g), "--samples", "0"],
        vec!["verify-theorem", "--in", p(&g), "--t-grid", "-1"],
        vec!["verify-theorem"],
        vec!["frobnicate"],
    ] {
        let o = dominion(&args);
        assert_eq!(o.code, 2, "{args:?}");
        assert_eq!(o.error()["code"], "usage");
    }
    let o = dominion(&["check-domination", "--mode", "resolvent", "--in", p(&g), "--alpha-grid", "-5"]);
    assert_eq!((o.code, o.error()["code"].clone()), (2, json!("parameter")));
}

#[test]
fn generated_instances_round_trip_byte_identically() {
    for kind in ["graph", "magnetic"] {
        for seed in ["0", "5", "11"] {
            let o = dominion(&["gen", "--kind", kind, "--vertices", "6", "--max-fiber", "3", "--seed", seed]);
            assert_eq!(o.code, 0);
            let text = o.stdout.trim_end();
            assert_eq!(canonicalize_instance(text).unwrap(), text, "{kind} {seed}");
        }
    }
}

#[test]
fn hand_written_instance_canonicalizes_stably() {
    let mut inst = magnetic_2v();
    inst["phi"] = json!({"b|a": [[0.0, 1.0]]});
    inst["edges"] = json!([["b", "a", 1.5]]);
    let once = canonicalize_instance(&inst.to_string()).unwrap();
    assert_eq!(canonicalize_instance(&once).unwrap(), once);
    let v: Value = serde_json::from_str(&once).unwrap();
    assert_eq!(v["edges"], json!([["a", "b", 1.5]]));
    assert_eq!(v["phi"]["a|b"], json!([[0.0, -1.0]]));
}

#[test]
fn graph_operator_checks() {
    let dir = TempDir::new().unwrap();
    let o = dominion(&["gen", "--kind", "graph", "--vertices", "5", "--seed", "3"]);
    let f = dir.path().join("g.json");
    std::fs::write(&f, &o.stdout).unwrap();
    assert_eq!(dominion(&["check-bd", "--in", p(&f), "--samples", "50"]).code, 0);
    assert_eq!(dominion(&["check-positivity", "--in", p(&f), "--samples", "50"]).code, 0);
    assert_eq!(dominion(&["kato", "--in", p(&f), "--samples", "50"]).code, 0);

    let flipped = json!({"cone": {"type": "orthant", "dim": 2}, "operator": [1.0, 1.0, 1.0, 1.0]});
    let f = write(&dir, "flipped.json", &flipped);
    assert_eq!(dominion(&["check-bd", "--in", p(&f)]).code, 1);
    let o = dominion(&["check-positivity", "--in", p(&f)]);
    assert_eq!(o.code, 1);
    assert!(o.json()["witness"].is_object());
}

#[test]
fn project_reports_both_parts() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "m.json", &json!({"cone": {"type": "monotone", "dim": 3}, "g": [1.0, 3.0, -1.0]}));
    let o = dominion(&["project", "--in", p(&f)]);
    assert_eq!(o.code, 0);
    assert_eq!(o.json()["projection"], json!([2.0, 2.0, 0.0]));
}

#[test]
fn reports_are_deterministic_and_thread_independent() {
    let dir = TempDir::new().unwrap();
    let instances: Vec<Value> = (0..6)
        .map(|s| {
            let o = dominion(&["gen", "--kind", "magnetic", "--vertices", "4", "--seed", &s.to_string()]);
            serde_json::from_str(&o.stdout).unwrap()
        })
        .collect();
    let f = write(&dir, "sweep.json", &Value::Array(instances));
    let args = ["verify-theorem", "--in", p(&f), "--samples", "50", "--seed", "3"];
    let a = dominion(&args);
    std::env::set_var(dominion_cli::THREADS_ENV, "1");
    let b = dominion(&args);
    std::env::remove_var(dominion_cli::THREADS_ENV);
    assert!(a.code < 2, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.code, b.code);
    let entries = a.json();
    let ids: Vec<u64> = entries.as_array().unwrap().iter().map(|e| e["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, (0..6).collect::<Vec<_>>());

    let out = dir.path().join("report.json");
    let o = dominion(&["verify-theorem", "--in", p(&f), "--samples", "50", "--seed", "3", "--out", p(&out)]);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), a.stdout);
}
