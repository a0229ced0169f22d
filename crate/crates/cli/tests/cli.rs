use std::path::PathBuf;
use std::process::{Command, Output};

use ddae_cli::file::{parse_system, parse_system_str, SystemFile};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn ddae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ddae")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

#[test]
fn analyze_weakly_stable_system() {
    let o = ddae(&["--no-timestamp", "analyze", &path("weakly_stable.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["stability"]["label"], "weakly_stable(2)");
    assert_eq!(v["decomposition"]["weak_stability"]["p"], 2);
    assert_eq!(v["verification"]["passed"], true);
    assert!(v["verification"]["envelope"]["fit"]["decaying"].as_bool().unwrap());
    assert!(v.get("generated_at_unix").is_none());
}

#[test]
fn analyze_scalar_system_is_exponentially_stable() {
    let o = ddae(&["analyze", &path("scalar.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["stability"]["label"], "exponentially_stable");
    assert!(v["generated_at_unix"].as_u64().is_some());
    let rightmost = v["spectrum"]["roots"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["re"].as_f64().unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    // λ + 2 = e^{−λ}
    assert!((rightmost + 2.0 - (-rightmost).exp()).abs() < 1e-10, "{rightmost}");
}

#[test]
fn spectrum_csv_for_advanced_pair() {
    let o = ddae(&["spectrum", &path("advanced_pair.json"), "--re-min", "0", "--re-max", "3", "--im-max", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("re,im"), "{header}");
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let mut c = l.split(',').map(|x| x.parse::<f64>().unwrap());
            (c.next().unwrap(), c.next().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|&(re, _)| re > 0.0));
    // 1 = (λ/2)e^{−λ} at the leading pair
    assert!(rows.iter().any(|&(re, im)| (re - 1.3607494).abs() < 1e-6 && (im.abs() - 7.6785891).abs() < 1e-6));
}

#[test]
fn spectrum_writes_json_alongside_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("spec.json");
    let o = ddae(&["spectrum", &path("scalar.json"), "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["roots"].as_array().unwrap().len() + 1, stdout(&o).lines().count());
}

#[test]
fn irregular_system_exits_2() {
    for cmd in ["analyze", "condense", "spectrum", "solve", "verify", "decompose"] {
        let o = ddae(&[cmd, &path("irregular.json")]);
        assert_eq!(o.status.code(), Some(2), "{cmd}: {}", stderr(&o));
        assert!(stderr(&o).contains("irregular: 1 free variable, 1 consistency condition"), "{cmd}: {}", stderr(&o));
    }
    let v = json(&ddae(&["analyze", &path("irregular.json")]));
    assert_eq!(v["condensed"]["verdict"]["regular"], false);
    assert!(v.get("spectrum").is_none());
}

#[test]
fn input_errors_exit_3() {
    let o = ddae(&["analyze", &path("bad_tau.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("delay must be positive"), "{}", stderr(&o));

    let o = ddae(&["condense", &path("bad_shape.json")]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("E[0]: expected 2 entries"), "{}", stderr(&o));

    let o = ddae(&["analyze", &path("missing.json")]);
    assert_eq!(o.status.code(), Some(3));

    let o = ddae(&["analyze", "--bogus", &path("scalar.json")]);
    assert_eq!(o.status.code(), Some(3));

    let o = ddae(&["spectrum", &path("scalar.json"), "--re-min", "1", "--re-max", "0"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn malformed_rational_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sys.json");
    let text = std::fs::read_to_string(fixture("scalar.json")).unwrap().replace("\"-2\"", "\"1/0\"");
    std::fs::write(&file, text).unwrap();
    let o = ddae(&["analyze", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("A[0][0]") && err.contains("zero denominator") && err.contains("line"), "{err}");
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(ddae(&["--help"]).status.code(), Some(0));
    assert_eq!(ddae(&["--version"]).status.code(), Some(0));
}

#[test]
fn fixtures_round_trip() {
    let dir = fixture("");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        let Ok((file, sys)) = parse_system(&p) else { continue };
        let again = SystemFile::from_system(&sys, file.region).to_json();
        let (file2, sys2) = parse_system_str(&again).unwrap();
        assert_eq!(sys, sys2, "{}", p.display());
        assert_eq!(file.region, file2.region);
        seen += 1;
    }
    assert!(seen >= 6);
}

#[test]
fn no_timestamp_output_is_deterministic() {
    let a = ddae(&["--no-timestamp", "analyze", &path("weakly_stable.json")]);
    let b = ddae(&["--no-timestamp", "analyze", &path("weakly_stable.json")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = ddae(&["solve", &path("weakly_stable.json"), "--until", "3", "--sample-step", "0.25", "--csv", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x_1,x_2,x_3");
    assert_eq!(lines.len(), 1 + 13);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));

    let o = ddae(&["solve", &path("scalar.json"), "--until", "1", "--sample-step", "0.5"]);
    let text = stdout(&o);
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    // ẋ = −2x + 1 on [0, 1] from x(0) = 1
    assert!((last[1] - (1.0 + (-2f64).exp()) / 2.0).abs() < 1e-10, "{last:?}");
}

#[test]
fn unsupported_solve_exits_1() {
    let o = ddae(&["solve", &path("advanced_pair.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no solver applies"), "{}", stderr(&o));
}

#[test]
fn decompose_and_verify_reports() {
    let v = json(&ddae(&["decompose", &path("weakly_stable.json")]));
    assert_eq!(v["weak_stability"]["p"], 2);
    let o = ddae(&["verify", &path("scalar.json"), "--samples", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["method"], "closed_form");
    assert_eq!(v["passed"], true);
}
