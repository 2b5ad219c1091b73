use std::path::PathBuf;
use std::process::{Command, Output};

use inqseq::calculus::json::{from_json_str, from_json_value, to_json_string};
use inqseq::calculus::{check_derivation, Label, Rule};
use inqseq::schemes::{double_negation_derivation, ekp_with_cut};
use inqseq::semantics::{labelled_supports, Assignment, Model, WorldNaming};
use inqseq::syntax::{parse, var, Formula};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inqseq")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("inqseq-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("temp file written");
    path
}

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/example1.json")
}

#[test]
fn golden_double_negation_certificate() {
    let d = double_negation_derivation(Label::from_slice(&[1, 2]).unwrap(), &Formula::atom("P", &["x"])).unwrap();
    let golden = std::fs::read_to_string(fixture()).unwrap();
    let ours: Value = serde_json::from_str(&to_json_string(&d)).unwrap();
    assert_eq!(ours, serde_json::from_str::<Value>(&golden).unwrap());
    let back = from_json_str(&golden).unwrap();
    assert_eq!(back, d);
}

#[test]
fn prove_valid_formula() {
    let out = run(&["prove", "~~P(x) -> P(x)", "--bound", "3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("proved:"));

    let out = run(&["--format", "json", "prove", "<CD>", "--bound", "2"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["verdict"], "proved");
    assert_eq!(report["seed"], 20240917);
    let d = from_json_value(&report["payload"]["derivation"]).unwrap();
    assert!(check_derivation(&d).is_ok());
}

#[test]
fn refutation_carries_a_countermodel() {
    let out = run(&["--format", "json", "prove", "p \\/ ~p", "--bound", "2"]);
    assert_eq!(code(&out), 1);
    let report = json(&out);
    assert_eq!(report["verdict"], "refuted");
    let cm = &report["payload"]["countermodel"];
    let model: Model = serde_json::from_value(cm["model"].clone()).unwrap();
    let naming: WorldNaming = serde_json::from_value(cm["naming"].clone()).unwrap();
    let g: Assignment = serde_json::from_value(cm["assignment"].clone()).unwrap();
    let root = inqseq::calculus::LabelledFormula::new(Label::range(2).unwrap(), parse("p \\/ ~p").unwrap());
    assert!(!labelled_supports(&model, &naming, &g, &root).unwrap());

    let out = run(&["countermodel", "forall x. P(x) \\/ ~P(x)", "--bound", "2"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("I(P,"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&run(&["prove", "p ->"])), 3);
    assert_eq!(code(&run(&["prove", "p", "--bound", "0"])), 3);
    assert_eq!(code(&run(&["prove", "p", "--bound", "62"])), 3);
    assert_eq!(code(&run(&["prove", "<Nope>"])), 3);
    assert_eq!(code(&run(&["scheme", "CD", "--psi", "Q(x)"])), 3);
    assert_eq!(code(&run(&["check-proof", "/nonexistent/file.json"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 2, "clap reports unknown subcommands itself");
}

#[test]
fn budget_exhaustion_is_inconclusive() {
    let out = run(&["--format", "json", "prove", "<CD>", "--bound", "3", "--node-limit", "3"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["verdict"], "inconclusive");
    assert_eq!(json(&out)["budgets"]["node_limit"], 3);
}

#[test]
fn check_proof_accepts_fixture_and_rejects_tampering() {
    let out = run(&["check-proof", fixture().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(fixture()).unwrap()).unwrap();
    v["premises"][0]["conclusion"]["ante"][0]["label"] = serde_json::json!([3]);
    let bad = temp_file("tampered.json", &v.to_string());
    let out = run(&["--format", "json", "check-proof", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert_eq!(json(&out)["verdict"], "failed");
    assert!(json(&out)["payload"]["failure"]["path"].is_array());
}

#[test]
fn cuts_are_rejected_then_eliminated() {
    let x = Label::from_slice(&[1, 2]).unwrap();
    let d = ekp_with_cut(x, &Formula::atom("P", &["x"]), &Formula::prop("r"), &var("x")).unwrap();
    assert!(d.uses_rule(Rule::Cut));
    let path = temp_file("cut.json", &to_json_string(&d));
    let out = run(&["check-proof", path.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("eliminate-cut"));

    let out = run(&["--format", "json", "eliminate-cut", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let e = from_json_value(&json(&out)["payload"]["derivation"]).unwrap();
    assert!(!e.uses_rule(Rule::Cut));
    assert!(check_derivation(&e).is_ok());
    assert!(e.conclusion.multiset_eq(&d.conclusion));
}

#[test]
fn check_model_evaluates_support() {
    let model = r#"{"worlds":["a","b"],"domain":["d","e"],"interp":{"P":{"a":[["d"]],"b":[["e"]]}}}"#;
    let path = temp_file("model.json", model);
    let p = path.to_str().unwrap();
    let yes = run(&["check-model", p, "--formula", "P(x)", "--state", "a", "--assignment", "x=d"]);
    assert_eq!(code(&yes), 0);
    assert!(stdout(&yes).contains("supports"));
    let out = run(&["--format", "json", "check-model", p, "--formula", "iexists x. P(x)", "--state", "a,b"]);
    assert_eq!(json(&out)["payload"]["supported"], false);
    let out = run(&["--format", "json", "check-model", p, "--formula", "iexists x. P(x)", "--state", ""]);
    assert_eq!(json(&out)["payload"]["supported"], true);
    assert_eq!(code(&run(&["check-model", p, "--formula", "P(x)", "--state", "zz", "--assignment", "x=d"])), 3);
}

#[test]
fn scheme_instances_and_derivations() {
    let out = run(&["scheme", "Casarischeme"]);
    assert_eq!(code(&out), 0);
    let printed = stdout(&out);
    let f = parse(printed.trim()).unwrap();
    assert!(matches!(f, Formula::Implies(..)));

    for name in ["CD", "Kuroda", "CasariScheme", "KP", "EK", "EKP", "NegRules", "DoubleNegation"] {
        let out = run(&["--format", "json", "scheme", name, "--derive", "--bound", "2"]);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let d = from_json_value(&json(&out)["payload"]["derivation"]).unwrap();
        assert!(check_derivation(&d).is_ok(), "{name}");
    }

    let out = run(&["--format", "latex", "scheme", "Kuroda"]);
    assert!(stdout(&out).contains("\\forall"));
}

#[test]
fn casari_claims_and_selftest() {
    let out = run(&["casari-claims", "--variant", "A", "--maxWorld", "6", "--maxM", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 failures"));
    let out = run(&["--format", "json", "casari-claims", "--variant", "b", "--max-world", "4", "--max-m", "1"]);
    assert_eq!(json(&out)["payload"]["checks"], 32 * 2 * 2);

    let out = run(&["selftest", "--only", "11,4"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 2);
    let out = run(&["selftest", "--disable-atr", "--only", "1"]);
    assert!(stdout(&out).starts_with("SKIP"));
}
