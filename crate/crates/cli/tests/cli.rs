use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(algebra: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_silting"))
        .arg("--algebra")
        .arg(fixture(algebra))
        .args(args)
        .output()
        .expect("spawn")
}

fn json(algebra: &str, args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(algebra, &all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn silting_counts() {
    for (alg, n) in [("threecycle.json", 20), ("a2.json", 5), ("point.json", 2)] {
        let v = json(alg, &["silt"]);
        assert_eq!(v["silting"].as_array().unwrap().len(), n, "{alg}");
    }
}

#[test]
fn silt_rows_carry_rho_flags() {
    let v = json("threecycle.json", &["silt"]);
    let mut empty = Vec::new();
    for row in v["silting"].as_array().unwrap() {
        assert_eq!(row["g_vectors"].as_array().unwrap().len(), 3);
        let rho = row["rho_flags"].as_array().unwrap();
        assert_eq!(rho.len(), 3);
        if !rho.iter().any(|b| b.as_bool().unwrap()) {
            empty.push(strings(&row["summands"]));
        }
    }
    assert_eq!(empty, [["P_1", "P_2", "P_3"]]);
}

#[test]
fn inspect_three_cycle() {
    let v = json("threecycle.json", &["inspect"]);
    assert_eq!(v["characteristic"], 2);
    assert_eq!(v["dim"], 9);
    assert_eq!(v["projective_dims"], serde_json::json!([[1, 1, 1], [1, 1, 1], [1, 1, 1]]));
    assert_eq!(v["injective_dims"], serde_json::json!([[1, 1, 1], [1, 1, 1], [1, 1, 1]]));
}

#[test]
fn indecomposables_and_rigidity() {
    let v = json("threecycle.json", &["indecs"]);
    let list = v["indecomposables"].as_array().unwrap();
    assert_eq!(list.len(), 9);
    // simples and length two modules are rigid, projective-injectives too
    assert!(list.iter().all(|m| m["tau_rigid"].as_bool().unwrap()));
}

#[test]
fn semistable_sets() {
    let v = json("threecycle.json", &["semistable", "--theta=-1,1,-1"]);
    assert_eq!(strings(&v["semistable"]), ["2/3"]);
    let v = json("threecycle.json", &["semistable", "--theta=0,0,0"]);
    assert_eq!(v["semistable"].as_array().unwrap().len(), 9);
    let v = json("threecycle.json", &["semistable", "--theta=1,1,1"]);
    assert!(v["semistable"].as_array().unwrap().is_empty());
}

#[test]
fn semistable_from_presilting_with_reports() {
    let v = json(
        "threecycle.json",
        &["semistable", "--presilting", "P_2-P_1,P_3-P_1", "--weights", "1,1", "--reports"],
    );
    assert_eq!(strings(&v["theta"]), ["-2", "1", "1"]);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 9);
    for r in reports {
        let in_w = r["in_w_u"].as_bool().unwrap();
        let ss = r["semistability"]["status"] == "semistable";
        assert_eq!(in_w, ss, "{}", r["module"]);
    }
}

#[test]
fn theta_values() {
    let v = json("threecycle.json", &["theta", "--presilting", "P_2-P_3", "--weights", "2"]);
    assert_eq!(strings(&v["theta"]), ["0", "2", "-2"]);
    let values = v["values"].as_array().unwrap();
    let of = |l: &str| values.iter().find(|x| x["label"] == l).unwrap()["value"].clone();
    assert_eq!(of("2"), "2");
    assert_eq!(of("2/3"), "0");
    assert_eq!(of("1/2/3"), "0");
}

#[test]
fn cone_lookup() {
    let v = json("threecycle.json", &["cone", "--theta=1,2,-3"]);
    assert_eq!(strings(&v["u"]), ["P_1-P_3", "P_2-P_3"]);
    assert_eq!(strings(&v["weights"]), ["1", "2"]);
    assert_eq!(strings(&v["wide"]), ["1/2/3"]);

    let v = json("threecycle.json", &["cone", "--theta=0,0,0"]);
    assert!(v["u"].as_array().unwrap().is_empty());
    assert_eq!(v["wide"].as_array().unwrap().len(), 9);

    let v = json("threecycle.json", &["cone", "--theta=-1,1,-1"]);
    assert_eq!(strings(&v["wide"]), ["2/3"]);
}

#[test]
fn table_matches_golden_file() {
    let v = json("threecycle.json", &["table"]);
    let text = std::fs::read_to_string(fixture("threecycle.table.json")).unwrap();
    let golden: Value = serde_json::from_str(&text).unwrap();
    let key = |r: &Value| r.to_string();
    let mut a: Vec<String> = v["rows"].as_array().unwrap().iter().map(key).collect();
    let mut b: Vec<String> = golden["rows"].as_array().unwrap().iter().map(key).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn verify_passes_on_fixtures() {
    for alg in ["threecycle.json", "a2.json", "point.json"] {
        let out = run(alg, &["verify"]);
        assert_eq!(out.status.code(), Some(0), "{alg}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn verify_json_is_deterministic() {
    let a = run("threecycle.json", &["--format", "json", "--seed", "7", "verify", "--checks", "wide-semistable,fan"]);
    let b = run("threecycle.json", &["--format", "json", "--seed", "7", "verify", "--checks", "wide-semistable,fan"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["status"], "pass");
}

#[test]
fn corrupted_golden_fails() {
    let text = std::fs::read_to_string(fixture("threecycle.table.json")).unwrap();
    let bad = text.replacen("\"1/2/3\"", "\"1/2\"", 1);
    assert_ne!(bad, text);
    let dir = std::env::temp_dir().join(format!("silting-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.table.json");
    std::fs::write(&path, bad).unwrap();
    let out = run("threecycle.json", &["verify", "--checks", "table", "--golden", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("counterexample"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn input_errors_exit_2() {
    let out = run("nonadmissible.json", &["inspect"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run("missing.json", &["inspect"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_queries_exit_4() {
    for args in [
        &["semistable", "--theta=1,x,0"][..],
        &["semistable", "--theta=1,2"],
        &["theta", "--presilting", "P_1,-P_1"],
        &["theta", "--presilting", "P_1", "--weights", "0"],
        &["theta", "--presilting", "P_1+P_2"],
    ] {
        let out = run("threecycle.json", args);
        assert_eq!(out.status.code(), Some(4), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn tight_bound_is_inconclusive() {
    let out = run("threecycle.json", &["--dim-bound", "2", "verify"]);
    assert_eq!(out.status.code(), Some(3));
}
