use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use realrad::parse::parse_polynomial;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn realrad(args: &[&str], seed_env: Option<&str>) -> (i32, Value) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_realrad"));
    cmd.args(args).env_remove("REALRAD_SEED");
    if let Some(s) = seed_env {
        cmd.env("REALRAD_SEED", s);
    }
    let out = cmd.output().expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let doc = serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"));
    (out.status.code().unwrap(), doc)
}

fn texts(doc: &Value) -> Vec<String> {
    doc["generators"].as_array().unwrap().iter().map(|g| g["text"].as_str().unwrap().to_string()).collect()
}

fn schema_check(docs: &[&Value]) {
    let schema: Value =
        serde_json::from_str(include_str!("../schema/output.schema.json")).expect("schema is valid JSON");
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    for d in docs {
        let errors: Vec<String> = validator.iter_errors(d).map(|e| format!("{} at {}", e, e.instance_path)).collect();
        assert!(errors.is_empty(), "{errors:?}\n{d:#}");
    }
}

#[test]
fn sum_of_squares_has_no_sign_change() {
    let (code, doc) = realrad(&["signcheck", "--h", "x^2+y^2"], None);
    assert_eq!(code, 2);
    assert_eq!(doc["verdict"], "NotReal");
    assert_eq!(doc["status"], "Infeasible");
    assert_eq!(doc["variables"], serde_json::json!(["x", "y"]));
    schema_check(&[&doc]);
}

#[test]
fn whitney_umbrella_restricts_to_the_axes() {
    let file = data("whitney.sys");
    let (code, doc) = realrad(&["realrad", file.to_str().unwrap(), "--seed", "3"], None);
    assert_eq!(code, 0, "{doc:#}");
    assert_eq!(texts(&doc), ["x", "y"]);
    assert_eq!(doc["inequalities"], "slack");
    assert_eq!(doc["seed"], 3);
    for (g, var) in doc["generators"].as_array().unwrap().iter().zip(["x", "y"]) {
        for (m, c) in g["coefficients"].as_object().unwrap() {
            let expected = if m == var { 1.0 } else { 0.0 };
            assert!((c.as_f64().unwrap() - expected).abs() < 1e-4, "{m}: {c}");
        }
    }
    schema_check(&[&doc]);
}

#[test]
fn circle_annihilator_is_the_circle() {
    let file = data("circle.sys");
    let (code, doc) = realrad(&["annihilator", file.to_str().unwrap(), "--degree", "2"], None);
    assert_eq!(code, 0);
    let vars = vec!["x".to_string(), "y".to_string()];
    let k: Vec<_> = texts(&doc).iter().map(|t| parse_polynomial(t, &vars).unwrap()).collect();
    assert_eq!(k, vec![parse_polynomial("x^2+y^2-1", &vars).unwrap()]);
    assert_eq!(doc["leading"], serde_json::json!(["y^2"]));
    schema_check(&[&doc]);
}

#[test]
fn brake_components_from_a_file() {
    let (sys, comps) = (data("brake.sys"), data("brake.components"));
    let provider = format!("file:{}", comps.display());
    let (code, doc) = realrad(&["realrad", sys.to_str().unwrap(), "--provider", &provider], None);
    assert_eq!(code, 0, "{doc:#}");
    assert_eq!(doc["shortcut"], "Decomposed");
    assert_eq!(doc["leading"], serde_json::json!(["z", "x*y", "y^2"]));
    let comps = doc["components"].as_array().unwrap();
    assert_eq!(comps.len(), 2);
    assert!(comps.iter().all(|c| c["verdict"] == "Real"));
    assert_eq!(comps[1]["generators"][1]["text"], "2*y + 1");
    schema_check(&[&doc]);
}

#[test]
fn circle_distance_relaxation() {
    let file = data("circle.sys");
    let (code, doc) = realrad(&["mop", file.to_str().unwrap(), "--objective", "(x-2)^2 + (y-1)^2", "--order", "2"], None);
    assert_eq!(code, 0);
    assert_eq!(doc["status"], "Optimal");
    let exact = (5f64.sqrt() - 1.0).powi(2);
    assert!((doc["value"].as_f64().unwrap() - exact).abs() < 1e-6);
    let p = &doc["minimizers"]["points"][0];
    assert!((p[0].as_f64().unwrap() - 2.0 / 5f64.sqrt()).abs() < 1e-5);
    assert!((p[1].as_f64().unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-5);
    schema_check(&[&doc]);
}

#[test]
fn empty_real_variety_exits_two() {
    let dir = std::env::temp_dir().join(format!("realrad-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("empty.sys");
    std::fs::write(&file, "variables x y\nequality x^2 + y^2 + 1\n").unwrap();
    let (code, doc) = realrad(&["realrad", file.to_str().unwrap()], None);
    assert_eq!(code, 2);
    assert_eq!(doc["status"], "Infeasible");
    assert_eq!(doc["shortcut"], "EmptyVariety");
    assert_eq!(texts(&doc), ["1"]);
    schema_check(&[&doc]);
}

#[test]
fn seed_falls_back_to_the_environment() {
    let args = ["signcheck", "--h", "x^2 + y^2 - 1"];
    let (code, doc) = realrad(&args, Some("17"));
    assert_eq!(code, 0);
    assert_eq!(doc["seed"], 17);
    assert_eq!(doc["verdict"], "Real");
    let (_, doc) = realrad(&["signcheck", "--h", "x^2 + y^2 - 1", "--seed", "5"], Some("17"));
    assert_eq!(doc["seed"], 5);
    let (code, doc) = realrad(&args, Some("seventeen"));
    assert_eq!(code, 1);
    assert_eq!(doc["status"], "error");
}

#[test]
fn explicit_base_point_is_recorded() {
    let (code, doc) = realrad(&["signcheck", "--h", "x^2+y^2-1", "--xi", "-0.5,-0.1"], None);
    assert_eq!(code, 0);
    assert_eq!(doc["certificate"]["xi"], serde_json::json!([-0.5, -0.1]));
    assert_eq!(doc["certificate"]["evidence"]["kind"], "SignChange");
    schema_check(&[&doc]);
}

#[test]
fn errors_exit_one_with_positions() {
    let dir = std::env::temp_dir().join(format!("realrad-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.sys");
    std::fs::write(&file, "variables x y\n\nequality x + 2y\n").unwrap();
    let (code, doc) = realrad(&["realrad", file.to_str().unwrap()], None);
    assert_eq!(code, 1);
    assert!(doc["error"].as_str().unwrap().ends_with(":3:15: expected an operator; products need '*'"), "{doc}");

    let (code, doc) = realrad(&["realrad", data("circle.sys").to_str().unwrap(), "--frobnicate"], None);
    assert_eq!(code, 1);
    assert!(doc["error"].as_str().unwrap().contains("--frobnicate"));

    let (code, _) = realrad(&["solve", "x"], None);
    assert_eq!(code, 1);

    let (code, doc) = realrad(&["annihilator", data("circle.sys").to_str().unwrap()], None);
    assert_eq!(code, 1);
    assert!(doc["error"].as_str().unwrap().contains("--degree"));
    schema_check(&[&doc]);
}

#[test]
fn help_is_not_json() {
    let out = Command::new(env!("CARGO_BIN_EXE_realrad")).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["realrad", "annihilator", "mop", "signcheck"] {
        assert!(text.contains(sub));
    }
}
