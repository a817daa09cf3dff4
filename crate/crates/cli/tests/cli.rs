use std::process::{Command, Output};

fn capwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn search_table() {
    let o = capwave(&["search"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r[0], ["k1", "k2", "k3", "omega_gen", "z"]);
    assert_eq!(r.len(), 1 + 5050);
    assert_eq!(&r[1][..3], ["1", "1", "2"]);
    let w: f64 = r[1][3].parse().unwrap();
    let expect = 2.0 * (7.23e-5f64 / 3.0).sqrt();
    assert!((w / expect - 1.0).abs() < 1e-12);
    let ws: Vec<f64> = r[1..].iter().map(|x| x[3].parse().unwrap()).collect();
    assert!(ws.windows(2).all(|p| p[0] <= p[1]));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut docs = Vec::new();
    for _ in 0..2 {
        for (fmt, ext) in [("json", "json"), ("dot", "dot")] {
            let p = dir.path().join(format!("c.{ext}"));
            let o = capwave(&[
                "cluster",
                "--epsilon",
                "1e-3",
                "--format",
                fmt,
                "--out",
                p.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", stderr(&o));
            docs.push(std::fs::read(&p).unwrap());
        }
        let o = capwave(&[
            "simulate",
            "--triad",
            "10,47",
            "--ic",
            "10:0.9:0.1",
            "--ic",
            "47:0.6:0",
            "--ic",
            "57:0.3:0",
        ]);
        docs.push(o.stdout);
    }
    assert_eq!(docs[0], docs[3]);
    assert_eq!(docs[1], docs[4]);
    assert_eq!(docs[2], docs[5]);
}

#[test]
fn cluster_summary_lines() {
    let o = capwave(&["cluster", "--epsilon", "1e-4"]);
    assert!(o.status.success());
    let e = stderr(&o);
    assert_eq!(e.lines().filter(|l| l.starts_with("cluster ")).count(), 4);
    assert!(e.contains("N=2 n=1 2N-n=3"));
    assert!(e.contains("5042 isolated triads"));
}

#[test]
fn zero_phase_and_drift_report() {
    let o = capwave(&[
        "simulate", "--triad", "3,5", "--ic", "3:1:0", "--ic", "5:0.6:0", "--ic", "8:0.2:0",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let e = stderr(&o);
    let grab = |key: &str| -> f64 {
        let line = e.lines().find(|l| l.starts_with(key)).unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    assert!(grab("max |phi|") < 1e-6);
    assert!(grab("drift") < 1e-8);
    let measured = grab("detected period");
    let analytic = grab("analytic period");
    assert!((measured / analytic - 1.0).abs() < 1e-6);
}

#[test]
fn passive_modes_at_rest_stay_constant() {
    let o = capwave(&[
        "simulate",
        "--triad",
        "3,5",
        "--ic",
        "3:0.7:0.4",
        "--ic",
        "5:0:0",
        "--ic",
        "8:0:0",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    let header = &r[0];
    for row in &r[2..] {
        for (i, name) in header.iter().enumerate() {
            if name != "t" && !name.starts_with("phi") {
                assert_eq!(row[i], r[1][i], "{name}");
            }
        }
    }
}

#[test]
fn missing_initial_conditions_are_listed() {
    let o = capwave(&[
        "simulate", "--triad", "10,47", "--triad", "3,10", "--ic", "10:1:0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("3, 13, 47, 57"));
    let o = capwave(&[
        "simulate", "--triad", "3,5", "--ic", "3:1:0", "--ic", "5:1:0", "--ic", "8:1:0", "--ic",
        "9:1:0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("9"));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "kmax = 10\nformat = json\n\n[initial]\n3 1 0\n").unwrap();
    let o = capwave(&["search", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["triads"].as_array().unwrap().len(), 55);
    let o = capwave(&[
        "search",
        "--config",
        cfg.to_str().unwrap(),
        "--kmax",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(rows(&stdout(&o)).len(), 1 + 10);
}

#[test]
fn exit_codes() {
    assert_eq!(capwave(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(capwave(&["search", "--sigma", "-1"]).status.code(), Some(2));
    assert_eq!(
        capwave(&["cluster", "--format", "csv"]).status.code(),
        Some(2)
    );
    assert_eq!(capwave(&["simulate"]).status.code(), Some(2));
    assert_eq!(
        capwave(&["search", "--out", "/nonexistent/dir/x.csv"])
            .status
            .code(),
        Some(2)
    );
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_capwave"))
        .arg("search")
        .env("CAPWAVE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn validate_and_fault_injection() {
    let ok = Command::new(env!("CARGO_BIN_EXE_capwave"))
        .arg("validate")
        .env("CAPWAVE_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert_eq!(
        stdout(&ok)
            .lines()
            .filter(|l| l.starts_with("PASS"))
            .count(),
        11
    );

    let bad = capwave(&["validate", "--inject-fault", "coupling-sign"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = stdout(&bad);
    assert!(report.lines().any(|l| l.starts_with("FAIL criterion 9")));
    assert_eq!(report.lines().filter(|l| l.starts_with("FAIL")).count(), 1);
}
