use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn instance(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("instances").join(name)
}

fn lca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lca")).args(args).env_remove("LCA_TOL").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn verdicts(r: &Value) -> Vec<(String, String)> {
    r["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| (x["name"].as_str().unwrap().to_string(), x["verdict"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn bundled_tower_validates() {
    let out = lca(&["validate", instance("c2_tower.json").to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(verdicts(&r).iter().all(|(_, v)| v == "PASS"));
    assert!(verdicts(&r).iter().any(|(n, _)| n == "tower:T"));
}

#[test]
fn transpose_fails_with_mult_residual() {
    let out = lca(&["validate", instance("transpose.json").to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    let rec = &r["records"][0];
    assert_eq!(rec["verdict"], "FAIL");
    assert!(rec["residuals"]["mult"].as_f64().unwrap() > 0.5);
    assert!(rec["residuals"]["star"].as_f64().unwrap() < 1e-12);
}

#[test]
fn malformed_json_exits_two() {
    let path = scratch("malformed.json");
    std::fs::write(&path, "{\"algebras\": {\"C\": ").unwrap();
    let out = lca(&["validate", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(report(&out)["error"].as_str().unwrap().contains("parse"));

    std::fs::write(&path, r#"{"algebras": {}, "widgets": {}}"#).unwrap();
    assert_eq!(lca(&["validate", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn induce_rows_gives_one_dimensional_rep() {
    let out_path = scratch("rows_induced.json");
    let out = lca(&[
        "induce",
        instance("m2_context.json").to_str().unwrap(),
        "--phi",
        "scalars",
        "--rep",
        "id",
        "--out",
        out_path.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["records"][0]["details"]["hdim"], 1);
    assert_eq!(r["records"][0]["details"]["gram_rank"], 1);

    let frag: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(frag["representations"]["id_induced"]["algebra"], "C");
    let again = lca(&["validate", out_path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn induce_identity_over_c() {
    let out_path = scratch("trivial_induced.json");
    let out = lca(&[
        "induce",
        instance("trivial.json").to_str().unwrap(),
        "--phi",
        "id",
        "--rep",
        "id",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let frag: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(frag["representations"]["id_induced"]["images"], json!([[[[1.0, 0.0]]]]));
}

#[test]
fn degenerate_rep_exits_one() {
    let out_path = scratch("degenerate_induced.json");
    let out = lca(&[
        "induce",
        instance("degenerate.json").to_str().unwrap(),
        "--phi",
        "id",
        "--rep",
        "zero",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(report(&out)["records"][0]["error"].as_str().unwrap().contains("degenerate"));
}

#[test]
fn unknown_name_exits_two() {
    let out_path = scratch("missing.json");
    let m2 = instance("m2_context.json");
    let out = lca(&["induce", m2.to_str().unwrap(), "--phi", "nope", "--rep", "id", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = lca(&["check", m2.to_str().unwrap(), "--property", "imprimitivity", "--context", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_stages_gives_twenty_passes() {
    let out = lca(&["check", "--property", "stages", "--random", "--trials", "20", "--seed", "42", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let v = verdicts(&report(&out));
    assert_eq!(v.len(), 20);
    assert!(v.iter().all(|(_, x)| x == "PASS"));
}

#[test]
fn imprimitivity_on_m2_context() {
    let m2 = instance("m2_context.json");
    let out = lca(&["check", m2.to_str().unwrap(), "--property", "imprimitivity", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    for rec in report(&out)["records"].as_array().unwrap() {
        assert!(rec["residuals"]["round_trip_trace"].as_f64().unwrap() < 1e-8);
        assert!(rec["residuals"]["unitarity"].as_f64().unwrap() < 1e-8);
        assert!(rec["details"]["witness"].is_array());
    }
}

#[test]
fn lemma41_counter_model_is_not_cofinal() {
    let out = lca(&["check", instance("lemma41_counter.json").to_str().unwrap(), "--property", "lemma41"]);
    assert_eq!(out.status.code(), Some(1));
    let rec = &report(&out)["records"][0];
    assert_eq!(rec["verdict"], "FAIL");
    assert_eq!(rec["details"]["cofinal"], false);
    assert_eq!(rec["details"]["uncovered"], json!(["r"]));

    let out = lca(&["check", instance("lemma41.json").to_str().unwrap(), "--property", "lemma41"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn prop34_finds_expected_nodes() {
    let out = lca(&["check", instance("prop34.json").to_str().unwrap(), "--property", "prop34", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let found: Vec<&str> =
        r["records"].as_array().unwrap().iter().map(|x| x["details"]["found_p"].as_str().unwrap()).collect();
    assert_eq!(found, ["p'", "p"]);
}

#[test]
fn timestamp_only_without_flag() {
    let args = ["check", "--property", "direct-sum", "--random", "--trials", "2", "--seed", "9"];
    assert!(report(&lca(&args))["timestamp"].is_u64());
    let mut quiet = args.to_vec();
    quiet.push("--no-timestamp");
    assert!(report(&lca(&quiet))["timestamp"].is_null());
}

#[test]
fn flag_tolerance_overrides_env() {
    let m2 = instance("m2_context.json");
    let run = |tol_flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_lca"));
        c.args(["check", m2.to_str().unwrap(), "--property", "imprimitivity", "--no-timestamp"]).env("LCA_TOL", "1e-20");
        if let Some(t) = tol_flag {
            c.args(["--tol", t]);
        }
        c.output().unwrap()
    };
    let strict = run(None);
    assert_eq!(report(&strict)["tolerance"], 1e-20);
    assert_eq!(strict.status.code(), Some(1));
    let relaxed = run(Some("1e-9"));
    assert_eq!(report(&relaxed)["tolerance"], 1e-9);
    assert_eq!(relaxed.status.code(), Some(0));
}

/// `ℂ^{1×2}` over `M₂` as flat tensors in either index order.
fn rows_tensor(order: &str) -> Value {
    let (d, n) = (2usize, 4usize);
    let c = |x: f64| json!([x, 0.0]);
    let mut action = vec![vec![c(0.0); n * d]; d];
    let mut inner = vec![vec![c(0.0); d * d]; n];
    for s in 0..d {
        for b in 0..d {
            let alpha = 2 * s + b;
            let col = if order == "unit_major" { alpha * d + s } else { s * n + alpha };
            action[b][col] = c(1.0);
        }
        for t in 0..d {
            inner[2 * s + t][s * d + t] = c(1.0);
        }
    }
    let inner = if order == "unit_major" {
        json!(inner)
    } else {
        let transposed: Vec<Vec<Value>> = (0..d * d).map(|r| (0..n).map(|k| inner[k][r].clone()).collect()).collect();
        json!(transposed)
    };
    json!({ "kind": "tensor", "over": "M2", "dim": d, "index_order": order, "action": action, "inner": inner })
}

#[test]
fn tensor_modules_in_both_orders() {
    let file = json!({
        "algebras": { "M2": { "blocks": [2] } },
        "modules": { "unit": rows_tensor("unit_major"), "vector": rows_tensor("vector_major") }
    });
    let path = scratch("tensor_modules.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let out = lca(&["validate", path.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(verdicts(&report(&out)).len(), 2);
}
