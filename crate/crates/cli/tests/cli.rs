use std::process::Command;

use serde_json::Value;

mod schema;

fn genphi(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_genphi"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn text(args: &[&str]) -> String {
    let (code, out) = genphi(args);
    assert_eq!(code, 0, "genphi {args:?} exited {code}: {out}");
    out.trim_end().to_string()
}

/// Runs with `--json`, validates against the schema, returns the document.
fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, out) = genphi(&all);
    let doc: Value = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{args:?}: {e}\n{out}"));
    if let Err(errors) = schema::validate(&doc) {
        panic!("{args:?} output violates the schema:\n{}", errors.join("\n"));
    }
    (code, doc)
}

fn strip_timestamps(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timestamp");
            map.values_mut().for_each(strip_timestamps);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timestamps),
        _ => {}
    }
}

#[test]
fn phik_examples() {
    assert_eq!(text(&["phik", "2", "7000"]), "80");
    assert_eq!(text(&["phik", "1", "1"]), "1");
    let (code, doc) = json(&[
        "phik", "3", "1080000", "--method", "oracle", "--bound", "10000000",
    ]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["value"], 160);
    assert_eq!(doc["provenance"], serde_json::json!(["oracle"]));
}

#[test]
fn phik_cross_checks_methods() {
    let (code, doc) = json(&["phik", "2", "7000", "--method", "closed,iter,oracle", "--trace"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["agree"], true);
    assert_eq!(doc["result"]["by_method"]["iteration"], 80);
    assert_eq!(doc["result"]["trace"], "1×φ(4)×φ(5)×5×φ(6)=80");
}

#[test]
fn decompose_examples() {
    assert_eq!(text(&["decompose", "1", "5"]), "Z4");
    assert_eq!(text(&["decompose", "3", "64"]), "Z2");
    let (_, doc) = json(&["decompose", "2", "7000", "--form", "invariant"]);
    assert_eq!(doc["result"]["order"], 80);
    let orders: Vec<u64> = serde_json::from_value(doc["result"]["orders"].clone()).unwrap();
    assert_eq!(orders.iter().product::<u64>(), 80);
    assert!(orders.windows(2).all(|w| w[1] % w[0] == 0));
}

#[test]
fn iphi_examples() {
    assert_eq!(text(&["iphi", "2", "7000"]), "640");
    assert_eq!(text(&["iphi", "0", "9"]), "9");
    assert_eq!(text(&["iphi", "3", "27"]), "2");
    json(&["iphi", "2", "7000"]);
}

#[test]
fn phiproduct_examples() {
    assert_eq!(text(&["phiproduct", "5", "8", "9", "13", "18", "22"]), "414720");
    assert_eq!(text(&["phiproduct", "7"]), "6");
    assert_eq!(text(&["phiproduct", "3", "3"]), "6");
    let (_, doc) = json(&["phiproduct", "5", "8", "9", "13", "18", "22"]);
    assert_eq!(doc["result"]["direct"], "414720");
    assert_eq!(genphi(&["phiproduct"]).0, 1);
}

#[test]
fn solve_examples() {
    let (_, doc) = json(&["solve", "eq-k2", "--max", "100"]);
    assert_eq!(doc["result"]["classifier"]["agree"], true);
    let (_, doc) = json(&["solve", "eq-k3", "--max", "12"]);
    let sols: Vec<u64> = serde_json::from_value(doc["result"]["solutions"].clone()).unwrap();
    for n in [1, 2, 4, 5, 8, 10, 12] {
        assert!(sols.contains(&n));
    }
    let (_, doc) = json(&["solve", "phik-one", "--k", "2", "--max", "100"]);
    assert_eq!(
        doc["result"]["solutions"],
        serde_json::json!([1, 2, 3, 4, 6, 8, 12, 24])
    );
    let (code, _) = json(&["solve", "eq-k2", "--max", "1000000000"]);
    assert_eq!(code, 2);
}

#[test]
fn exit_codes() {
    assert_eq!(json(&["phik", "2", "0"]).0, 1);
    assert_eq!(
        json(&["decompose", "1", "1000003", "--method", "oracle", "--bound", "10"]).0,
        2
    );
    assert_eq!(genphi(&["phik", "two", "7"]).0, 1);
    assert_eq!(genphi(&["--help"]).0, 0);
}

#[test]
fn verify_examples() {
    let (code, doc) = json(&["verify", "--suite", "inequality", "--max", "1000000"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["reports"][0]["mismatches"], serde_json::json!([]));

    let (code, doc) = json(&["verify", "--suite", "agreement", "--max", "2000", "--k", "4"]);
    assert_eq!(code, 0);
    assert_eq!(doc["result"]["unregistered"], 0);

    let (code, doc) = json(&["verify", "--suite", "classifiers", "--max", "100000"]);
    assert_eq!(code, 0);
    let literal = doc["result"]["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["equation"] == "eq-k3-literal")
        .unwrap();
    assert_eq!(literal["mismatches"][0]["n"], 3);
    assert_eq!(literal["mismatches"][0]["known"], "k3-literal-families");
    assert_eq!(literal["resolved_conventions"]["k3-reading"], "literal");
}

#[test]
fn verify_fails_without_manifest_entries() {
    let path = std::env::temp_dir().join(format!("genphi-empty-manifest-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"entries": []}"#).unwrap();
    let (code, doc) = json(&[
        "verify",
        "--suite",
        "published",
        "--manifest",
        path.to_str().unwrap(),
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 3);
    assert_eq!(doc["result"]["unregistered"], 1);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["phik", "3", "5000", "--method", "closed,iter,oracle"][..],
        &["decompose", "4", "65536", "--form", "invariant"],
        &["phiproduct", "12", "18", "30", "7"],
        &["solve", "eq-k3", "--max", "3000"],
    ] {
        assert_eq!(json(args).1, json(args).1, "{args:?}");
    }
    let run = || {
        let mut doc = json(&["verify", "--suite", "cyclicity", "--max", "5000"]).1;
        strip_timestamps(&mut doc);
        doc
    };
    assert_eq!(run(), run());
}
