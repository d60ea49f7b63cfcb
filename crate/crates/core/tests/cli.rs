use std::process::{Command, Output};

fn qst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qst"))
        .args(args)
        .env("QST_THREADS", "2")
        .output()
        .expect("qst binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn fields_for_harmonic_chain() {
    let out = qst(&["fields", "--n", "8", "--a", "0.5", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "site,field");
    assert_eq!(data[1], "1,6.125");
    assert_eq!(data[4], "4,0.125");
    assert_eq!(data.len(), 9);
}

#[test]
fn report_has_header_and_units() {
    let out = qst(&["report", "--n-sites", "8", "--a", "0.5", "--p", "3", "--time-metrics", "false"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("# "));
    assert!(text.contains("N,a,p,j_edge,j_bulk,F,E_plus,E_minus,ov_plus,ov_minus,t_est,t_thr,t_sm,p_max"));
}

#[test]
fn jsonl_output_parses() {
    let out = qst(&["spectrum", "--n", "5", "--format", "jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 5);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert!(v.get("value").is_some());
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["fields", "--n", "8", "--bogus", "1"],
        vec!["fields"],
        vec!["fields", "--n", "0"],
        vec!["sweep", "--preset", "fig9"],
        vec!["nonsense"],
        vec!["report", "--n", "8", "--threshold", "1.5"],
    ] {
        let out = qst(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "n_sites = 8\nspacing = 2.0\n").unwrap();
    let out = qst(&["report", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spacing"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.toml");
    std::fs::write(&path, "n_sites = 8\na = 0.5\np = 2.0\n").unwrap();
    let out = qst(&["fields", "--config", path.to_str().unwrap(), "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\n1,1.75\n"));
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|k| dir.path().join(format!("run{k}.csv"))).collect();
    for (k, path) in paths.iter().enumerate() {
        let threads = if k == 0 { "1" } else { "3" };
        let out = Command::new(env!("CARGO_BIN_EXE_qst"))
            .args(["sweep", "--preset", "fig3", "--out", path.to_str().unwrap()])
            .env("QST_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn exp_ratio_reference() {
    let out = qst(&["exp-ratio"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let ratio: f64 = text.lines().last().unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((ratio - 0.0863).abs() < 1e-3);
}

#[test]
fn write_failure_reports_path() {
    let out = qst(&["fields", "--n", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent-dir/x.csv"));
}

#[test]
fn help_exits_zero() {
    let out = qst(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sweep"));
}
