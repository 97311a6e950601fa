use std::process::{Command, Output};

use serde_json::Value;

fn pell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = pell(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn fan_counts() {
    for (d, rays, cones) in [(1, 2, 2), (2, 5, 5), (5, 14, 70)] {
        let v = json(&["fan", "--d", &d.to_string()]);
        assert_eq!(v["num_rays"], rays);
        assert_eq!(v["num_maximal_cones"], cones);
        assert_eq!(v["rays"].as_array().unwrap().len(), rays);
        assert_eq!(v["maximal_cones"].as_array().unwrap().len(), cones);
        assert_eq!(v["dim"], d);
    }
}

#[test]
fn polytope_vertices() {
    let v = json(&["polytope", "--d", "3"]);
    assert_eq!(v["num_vertices"], 12);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 12);
}

#[test]
fn matrix_for_d2() {
    let v = json(&["matrix", "--d", "2"]);
    assert_eq!(v["identity"], true);
    assert_eq!(v["Minv"][2], serde_json::json!([0, 0, -1, 0, 0]));
    assert_eq!(v["M"][0], serde_json::json!([1, 0, -1, 0, 1]));
}

#[test]
fn uequations_d3_and_d1() {
    let v = json(&["uequations", "--d", "3"]);
    let products: Vec<Vec<u64>> = v["equations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["product"].as_array().unwrap().iter().map(|f| f["j"].as_u64().unwrap()).collect())
        .collect();
    assert_eq!(
        products,
        [
            vec![4, 5],
            vec![5, 6, 7],
            vec![6, 8],
            vec![1, 7],
            vec![1, 2, 8],
            vec![2, 3],
            vec![2, 4, 8],
            vec![3, 5, 7]
        ]
    );
    assert_eq!(v["generators"][0], serde_json::json!({"a": [1, 0, 0], "b": [0, 1, 0], "c": [-1, 0]}));

    let v = json(&["uequations", "--d", "1"]);
    assert_eq!(v["equations"][0]["product"], serde_json::json!([{"j": 2, "a": 1}]));
    assert_eq!(v["equations"][1]["product"], serde_json::json!([{"j": 1, "a": 1}]));
}

#[test]
fn uequations_d4_has_unit_exponents() {
    let v = json(&["uequations", "--d", "4"]);
    let eqs = v["equations"].as_array().unwrap();
    assert_eq!(eqs.len(), 11);
    assert!(eqs
        .iter()
        .flat_map(|e| e["product"].as_array().unwrap())
        .all(|f| f["a"] == 1));
}

#[test]
fn verify_all_passes_for_d3() {
    let out = pell(&["verify", "--d", "3", "--checks", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    for name in ["fan", "matrix", "uequations", "binary", "assoc"] {
        assert_eq!(v["checks"][name]["passed"], true, "{name}");
    }
}

#[test]
fn verify_binary_d1_has_four_strata() {
    let v = json(&["verify", "--d", "1", "--checks", "binary"]);
    let report = &v["checks"]["binary"]["detail"];
    assert_eq!(report["strata"].as_array().unwrap().len(), 4);
    assert_eq!(report["jacobian_rank"], 1);
    assert_eq!(
        report["strata"][1],
        serde_json::json!({"S": [1], "face": true, "witness": ["0/1", "1/1"], "certificate": null, "codim": 1})
    );
    assert_eq!(report["strata"][2]["certificate"], serde_json::json!([1, 2]));
}

#[test]
fn out_of_range_is_a_usage_error() {
    let out = pell(&["verify", "--d", "100", "--checks", "binary"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d <= 5"));
    assert_eq!(pell(&["assoc", "--n", "9"]).status.code(), Some(2));
    assert_eq!(pell(&["assoc", "--n", "3"]).status.code(), Some(2));
    assert_eq!(pell(&["fan", "--d", "0"]).status.code(), Some(2));
    assert_eq!(pell(&["verify", "--d", "2", "--checks", "nonsense"]).status.code(), Some(2));
    assert_eq!(pell(&["assoc", "--n", "5", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn assoc_reports() {
    let v = json(&["assoc", "--n", "6", "--trials", "4"]);
    assert_eq!(v["refinement"]["refines"], true);
    assert_eq!(v["refinement"]["extra_rays"], serde_json::json!([[1, 0, -1]]));
    assert_eq!(v["dihedral"]["passed"], true);
    assert_eq!(v["dihedral"]["trials"].as_array().unwrap().len(), 4);

    let v = json(&["assoc", "--n", "5", "--trials", "2"]);
    assert_eq!(v["refinement"]["extra_rays"], serde_json::json!([]));
    assert_eq!(v["vertices"], 5);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("run{k}.json"))).collect();
    for p in &paths {
        let out = pell(&["verify", "--d", "2", "--checks", "binary,assoc", "--seed", "17", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    let other = pell(&["verify", "--d", "2", "--checks", "binary", "--seed", "18"]);
    assert_ne!(serde_json::from_slice::<Value>(&other.stdout).unwrap(), serde_json::from_slice::<Value>(&a).unwrap());
}

#[test]
fn keys_are_sorted() {
    let out = pell(&["matrix", "--d", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys: Vec<usize> = ["\"M\"", "\"Minv\"", "\"d\"", "\"identity\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn thread_cap_and_text_output() {
    let out = Command::new(env!("CARGO_BIN_EXE_pell"))
        .env("PELL_THREADS", "1")
        .args(["--format", "text", "verify", "--d", "2", "--checks", "binary"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] binary"));
    assert!(text.contains("32 strata analyzed"));

    let out = Command::new(env!("CARGO_BIN_EXE_pell"))
        .env("PELL_THREADS", "zero")
        .args(["fan", "--d", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
