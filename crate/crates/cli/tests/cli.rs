use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schwarz-lab"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn eval_reports_bounds() {
    let (code, out, _) = run(&["eval", "blaschke:0,0", "--z", "0.3,-0.4", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let q = v["q"].as_f64().unwrap();
    assert!((q - 1.25).abs() < 1e-12);
    assert!((v["rhs_main"].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert!((v["inner_bound"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn eval_text_marks_unbounded_simple_bound() {
    let (code, out, _) = run(&["eval", "S", "--z", "-0.2,0.1"]);
    assert_eq!(code, 0);
    assert!(
        out.lines()
            .any(|l| l.starts_with("rhs_simple") && l.ends_with("unbounded")),
        "{out}"
    );
}

#[test]
fn bad_input_exits_with_two() {
    let (code, _, err) = run(&["eval", "nonsense(", "--z", "0,0"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"));
    let (code, _, _) = run(&["eval", "S", "--z", "1.2,0"]);
    assert_eq!(code, 2);
}

#[test]
fn falsify_prints_record() {
    let (code, out, _) = run(&["falsify", "moebius", "--budget", "40", "--seed", "3", "--arcs", "full"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["samples"], 40);
    assert_eq!(v["violations"], 0);
    assert!(v["min_abs_slack"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn sweep_writes_polar_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heat.csv");
    let (code, _, _) = run(&["sweep", "balpha:0.5", "--polar", "3,5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,theta,q,abs_deriv,rhs_main");
    assert_eq!(lines.len(), 16);
    for row in &lines[1..] {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[2] <= v[4] * (1.0 + 1e-9), "{row}");
    }
}

#[test]
fn angular_certifies_divergence_for_s() {
    let (code, out, _) = run(&["angular", "S", "--zeta", "0", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["exists"], false);
    assert_eq!(v["liminf_estimate"], "inf");
    let (code, out, _) = run(&["angular", "blaschke:0,0.5", "--zeta", "0"]);
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "true");
    assert!((row[2].parse::<f64>().unwrap() - 4.0).abs() < 1e-4);
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.cfg");
    std::fs::write(
        &cfg,
        "samples = 4\nchain_samples = 1\nprobes = 4\nfamilies = moebius\nfamilies = blaschke\n",
    )
    .unwrap();
    let json = dir.path().join("out.json");
    let csv = dir.path().join("out.csv");
    let (code, out, _) = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("failed 0"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["summary"]["failed"], 0);
    assert!(std::fs::read_to_string(csv).unwrap().lines().count() > 1);
}
