mod support;

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value as Json;
use support::fixture_dir;

fn f(name: &str) -> String {
    fixture_dir().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_streamcheck"))
        .args(args)
        .env_remove("STREAMCHECK_COLOR")
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn json(args: &[&str]) -> Json {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_slice(&run(&all).stdout).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_and_usage() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["simulate", "--model", &f("min.scm.txt")]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn simulate_brake_override() {
    let o = run(&[
        "simulate",
        "--model",
        &f("brake_override.scm.txt"),
        "--component",
        "BrakeOverride",
        "--vectors",
        &f("brake_override.tv.csv"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("Standby"));
    let j = json(&[
        "simulate",
        "--model",
        &f("min.scm.txt"),
        "--component",
        "Min",
        "--vectors",
        &f("min.tv.csv"),
        "--ticks",
        "2",
    ]);
    assert_eq!(j["kind"], "simulate");
    assert_eq!(j["exit_code"], 0);
    let j = json(&["simulate", "--model", &f("min.scm.txt"), "--component", "Min"]);
    assert_eq!(j["exit_code"], 2);
}

#[test]
fn test_command_verdicts() {
    let args = |v: &str| {
        vec![
            "test".to_string(),
            "--model".into(),
            f("brake_override.scm.txt"),
            "--component".into(),
            "BrakeOverride".into(),
            "--vectors".into(),
            v.to_string(),
        ]
    };
    let ok = args(&f("brake_override.tv.csv"));
    let ok: Vec<&str> = ok.iter().map(String::as_str).collect();
    assert_eq!(code(&ok), 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "#inputs\nDriverBrake,AccBrake\n50,10\n#expected\nAccState\nStandby\n").unwrap();
    let a = args(bad.to_str().unwrap());
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    assert_eq!(code(&a), 1);
    let mut ja = vec!["--format", "json"];
    ja.extend_from_slice(&a);
    let j: Json = serde_json::from_slice(&run(&ja).stdout).unwrap();
    assert_eq!(j["failed"], 1);
    assert_eq!(j["cases"][0]["first_divergence"]["tick"], 1);

    let broken = dir.path().join("broken.csv");
    std::fs::write(&broken, "#inputs\nDriverBrake,Nope\n1,2\n").unwrap();
    let a = args(broken.to_str().unwrap());
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    assert_eq!(code(&a), 2);
}

#[test]
fn model_errors_point_at_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.scm.txt");
    std::fs::write(&p, "component X {\n    input a bool;\n}\n").unwrap();
    let o = run(&["simulate", "--model", p.to_str().unwrap(), "--component", "X"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("m.scm.txt:2:13"), "{err}");
}

#[test]
fn concretize_and_check() {
    let enc = f("encoder.scm.txt");
    let abs = f("encoder_abstract.tv.csv");
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("conc.csv");
    let o = run(&[
        "concretize",
        "--model",
        &enc,
        "--refinement",
        "Encoder",
        "--vectors",
        &abs,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("ci\n2.5\n-3.6\n0.3"), "{text}");

    assert_eq!(code(&["check", "--model", &enc, "--refinement", "Encoder", "--vectors", &abs]), 0);
    assert_eq!(
        code(&[
            "check",
            "--model",
            &enc,
            "--refinement",
            "EncoderChecked",
            "--vectors",
            &abs,
            "--concrete",
            &f("encoder_concrete.tv.csv")
        ]),
        0
    );
    let j = json(&["check", "--model", &enc, "--refinement", "EncoderBroken", "--vectors", &abs]);
    assert_eq!(j["exit_code"], 1);
    assert_eq!(j["outcome"], "fail");
}

#[test]
fn concretize_needs_params() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("noparams.csv");
    std::fs::write(&v, "#inputs\ni\ntrue\n#expected\no\ntrue\n").unwrap();
    let o = run(&[
        "concretize",
        "--model",
        &f("encoder.scm.txt"),
        "--refinement",
        "Encoder",
        "--vectors",
        v.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identity_concretizer_copies() {
    let o = run(&[
        "concretize",
        "--model",
        &f("identity.scm.txt"),
        "--refinement",
        "Identity",
        "--vectors",
        &f("identity.tv.csv"),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let abs = support::fixture("identity.tv.csv");
    let first_col: Vec<&str> = abs
        .lines()
        .skip_while(|l| *l != "x")
        .skip(1)
        .take_while(|l| !l.starts_with('#'))
        .collect();
    let out = stdout(&o);
    let got: Vec<&str> = out.lines().skip_while(|l| *l != "x2").skip(1).take(first_col.len()).collect();
    assert_eq!(got, first_col);
}

#[test]
fn galois_verdicts() {
    let enc = f("encoder.scm.txt");
    let j = json(&["verify-galois", "--model", &enc, "--galois", "G"]);
    assert_eq!(j["ok"], true);
    assert_eq!(j["pairs_checked"], 32);
    let j = json(&["verify-galois", "--model", &enc, "--galois", "GWeak"]);
    assert_eq!(j["exit_code"], 1);
    assert_eq!(j["counterexample"]["concrete_set"][0], "{ci=[0.0]}");
    assert_eq!(code(&["verify-galois", "--model", &enc, "--galois", "G", "--caps", "2"]), 2);
    assert_eq!(code(&["verify-galois", "--model", &enc, "--galois", "GBroken"]), 2);
    assert_eq!(code(&["verify-galois", "--model", &enc, "--refinement", "Encoder"]), 0);
}

#[test]
fn causality_checks() {
    assert_eq!(
        code(&[
            "causality",
            "--model",
            &f("passthrough_broken.scm.txt"),
            "--component",
            "Echo",
            "--mode",
            "strict"
        ]),
        1
    );
    assert_eq!(
        code(&["causality", "--model", &f("passthrough_broken.scm.txt"), "--component", "Echo"]),
        0
    );
    let j = json(&["causality", "--model", &f("brake_override.scm.txt"), "--component", "BrakeOverride"]);
    assert_eq!(j["exit_code"], 0);
    assert_eq!(j["kind"], "causality");
}
