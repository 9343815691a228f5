use std::path::PathBuf;
use std::process::Command;

use algent::cli::{run, Outcome, EXIT_BOUNDS_ONLY, EXIT_INVALID, EXIT_NOT_LOCALLY_FINITE, EXIT_OK};
use serde_json::Value;

fn problem(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems").join(name).to_string_lossy().into_owned()
}

fn algent(args: &[&str]) -> Outcome {
    run(std::iter::once("algent").chain(args.iter().copied()))
}

fn json(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("not json ({e}): {}", o.stdout))
}

fn scratch(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("algent-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn bernoulli_z6_entropy_report() {
    let o = algent(&["entropy", &problem("entropy_bernoulli_z6.json")]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = json(&o);
    assert_eq!(v["exact"], "log(2)+log(3)");
    assert_eq!(v["certificate"], "ClosedForm");
    assert_eq!(v["closed_form"], "bernoulli");
    assert!((v["approx"].as_f64().unwrap() - 6f64.ln()).abs() < 1e-12);
}

#[test]
fn alpha_table_for_sigma() {
    let o = algent(&["alpha", &problem("alpha_sigma.json")]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let mut rdr = csv::Reader::from_reader(o.stdout.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "n");
    assert_eq!(&headers[1], "alpha_exact");
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 16);
    for (k, row) in rows.iter().enumerate() {
        let k = k as i64 + 1;
        assert_eq!(row[0].parse::<i64>().unwrap(), k);
        // α_k = 1 + 1/(k+1)
        assert_eq!(&row[1], format!("{}/{}", k + 2, k + 1));
    }
}

#[test]
fn alpha_as_json() {
    let o = algent(&["alpha", &problem("alpha_sigma.json"), "--format", "json", "--n", "4"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let v = json(&o);
    assert!(v.is_object() || v.is_array());
}

#[test]
fn malformed_doc_is_invalid() {
    let p = scratch("bad.json", r#"{ "engine": "integers", "system": { "family": "bernoulli" } }"#);
    let o = algent(&["entropy", &p]);
    assert_eq!(o.code, EXIT_INVALID);
    assert!(o.stdout.is_empty());
    let o = algent(&["entropy", &problem("does_not_exist.json")]);
    assert_ne!(o.code, EXIT_OK);
    let o = algent(&["no-such-command"]);
    assert_eq!(o.code, EXIT_INVALID);
}

#[test]
fn increasing_cuts_are_rejected() {
    let p = scratch(
        "rising.json",
        r#"{ "engine": "valuation", "system": { "family": "bernoulli_sigma", "cuts": { "tail": "3/2-1/(n+1)" } } }"#,
    );
    assert_eq!(algent(&["entropy", &p]).code, EXIT_INVALID);
}

#[test]
fn not_locally_finite_needs_force() {
    let doc = problem("at_check_multiplication_by_two.json");
    let o = algent(&["at-check", &doc]);
    assert_eq!(o.code, EXIT_NOT_LOCALLY_FINITE);
    assert!(o.stderr.contains("--force"));
    let o = algent(&["at-check", &doc, "--force"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stderr.contains("warning"));
    let v = json(&o);
    assert_eq!(v["verdict"], "Violated");
    assert_eq!(v["ent_sub"]["exact"], "0");
    assert_eq!(v["ent_ambient"]["exact"], "0");
    assert_eq!(v["ent_quotient"]["exact"], "log(2)");
}

#[test]
fn exhausted_budget_reports_bounds() {
    let o = algent(&["entropy", &problem("entropy_banded_bounds.json"), "--budget", "8"]);
    assert_eq!(o.code, EXIT_BOUNDS_ONLY);
    let v = json(&o);
    assert_eq!(v["certificate"], "BoundsOnly");
    assert!(v["exact"].is_null());
    assert_eq!(v["upper"], "log(2)");
}

#[test]
fn documented_problems_run() {
    let cases: &[(&str, &str, &str, &str)] = &[
        ("length", "length_z.json", "/length", "log(2)"),
        ("entropy", "entropy_finite_mod4.json", "/certificate", "TrajectoryStabilized"),
        ("entropy", "entropy_auto_two_sided.json", "/certificate", "AutoFormula"),
        ("entropy", "entropy_hyperkernel.json", "/exact", "log(2)"),
        ("at-check", "at_check_mod4.json", "/verdict", "Additive"),
        ("mult", "mult_two_sided.json", "/exact", "log(3)"),
        ("multivar", "multivar_grid.json", "/lengths/7", "64*log(2)"),
        ("colon-chain", "colon_chain_sigma.json", "/rows/0/quotient_length", "3/2"),
    ];
    for (cmd, doc, ptr, want) in cases {
        let o = algent(&[cmd, &problem(doc)]);
        assert_eq!(o.code, EXIT_OK, "{cmd} {doc}: {}", o.stderr);
        assert_eq!(json(&o).pointer(ptr).and_then(Value::as_str), Some(*want), "{cmd} {doc}");
    }
    let o = algent(&["colon-chain", &problem("colon_chain_sigma.json")]);
    assert_eq!(json(&o)["consistent"], true);
    let o = algent(&["uniqueness-demo", &problem("uniqueness.json")]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(json(&o)["all_agree"], true);
}

#[test]
fn reports_round_trip() {
    let o = algent(&["entropy", &problem("entropy_bernoulli_z6.json")]);
    let r: algent::dynamics::EntropyResult = serde_json::from_str(&o.stdout).unwrap();
    let back = serde_json::to_string_pretty(&r).unwrap() + "\n";
    assert_eq!(back, o.stdout);
}

fn strip_seconds(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("seconds");
            m.values_mut().for_each(strip_seconds);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_seconds),
        _ => {}
    }
}

#[test]
fn suite_is_deterministic() {
    let a = algent(&["suite", "--seed", "11", "--format", "json"]);
    let b = algent(&["suite", "--seed", "11", "--format", "json"]);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    let (mut va, mut vb) = (json(&a), json(&b));
    strip_seconds(&mut va);
    strip_seconds(&mut vb);
    assert_eq!(va, vb);
    let props = va[0]["properties"].as_array().unwrap();
    assert!(props.len() >= 10);
    assert!(props.iter().all(|p| p["failures"] == 0), "{va:#}");
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_algent");
    let st = Command::new(bin).args(["entropy", &problem("entropy_bernoulli_z6.json")]).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_OK));
    let st = Command::new(bin).args(["at-check", &problem("at_check_multiplication_by_two.json")]).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_NOT_LOCALLY_FINITE));
    let st = Command::new(bin).args(["entropy", &problem("entropy_banded_bounds.json"), "--budget", "4"]).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_BOUNDS_ONLY));
    let st = Command::new(bin).args(["entropy", "--budget", "x", "f.json"]).output().unwrap();
    assert_eq!(st.status.code(), Some(EXIT_INVALID));
}
