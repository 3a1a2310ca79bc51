use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sinai(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sinai"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env("SINAI_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn coarsen_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = [
        "coarsen",
        "--replicas",
        "10",
        "--x-max",
        "100",
        "--seed",
        "7",
        "--window",
        "1001",
    ];
    for d in [&a, &b] {
        let out = sinai(&args, d.path());
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["flips.csv", "survival.csv", "genfun.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    let flips = read(a.path(), "flips.csv");
    assert!(flips.starts_with("replica,flip_index,level\n"));
    let survival = read(a.path(), "survival.csv");
    assert!(survival.starts_with("x,n,p_hat,stderr,analytic\n"));
    assert_eq!(survival.lines().count(), 4);

    let other = tempfile::tempdir().unwrap();
    let mut args8 = args;
    args8[6] = "8";
    sinai(&args8, other.path());
    assert_ne!(read(a.path(), "flips.csv"), read(other.path(), "flips.csv"));
}

#[test]
fn genfun_at_one_is_one() {
    let d = tempfile::tempdir().unwrap();
    let out = sinai(
        &[
            "genfun",
            "--z",
            "1.0",
            "--x",
            "50",
            "--replicas",
            "20",
            "--window",
            "101",
        ],
        d.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = read(d.path(), "genfun.csv");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["x", "z", "n", "estimate", "stderr", "analytic"]);
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[5].parse::<f64>().unwrap(), 1.0);
    assert_eq!(row[3].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn gridslopes_and_json_output() {
    let d = tempfile::tempdir().unwrap();
    let out = sinai(
        &[
            "gridslopes",
            "--replicas",
            "5",
            "--grid-step",
            "0.01",
            "--half-length",
            "60",
            "--format",
            "json",
        ],
        d.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows: serde_json::Value = serde_json::from_str(&read(d.path(), "gridstats.json")).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        assert!(r["central_excess"].as_f64().unwrap() > 0.0);
        assert!(["up", "down"].contains(&r["direction"].as_str().unwrap()));
        let u = r["rel_origin"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&u));
    }
}

#[test]
fn config_file_with_flag_override() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(
        &cfg,
        "seed = 3\nreplicas = 4\nx_max = 20\nx_list = 5,20\nwindow = 101\n",
    )
    .unwrap();
    let out = sinai(
        &[
            "renewal",
            "--config",
            cfg.to_str().unwrap(),
            "--replicas",
            "6",
        ],
        d.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let survival = read(d.path(), "survival.csv");
    let rows: Vec<&str> = survival.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.split(',').nth(1) == Some("6")));
}

#[test]
fn ldp_and_pdecheck_write_tables() {
    let d = tempfile::tempdir().unwrap();
    let out = sinai(&["ldp", "--a", "0.5", "--t", "6", "--n", "20000"], d.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(read(d.path(), "ldp.csv").starts_with("a,t,n,hits,rate,stderr,analytic\n"));
    let out = sinai(&["pdecheck"], d.path());
    assert!(out.status.success());
    let text = read(d.path(), "pdecheck.csv");
    for line in text.lines().skip(1) {
        let r: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(r.abs() < 1e-5, "{line}");
    }
}

#[test]
fn usage_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(
        sinai(&["coarsen", "--window", "10"], d.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sinai(&["coarsen", "--bogus"], d.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        sinai(&["report", "--profile", "huge"], d.path())
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sinai(&["ldp", "--a", "0.2"], d.path()).status.code(),
        Some(1)
    );
}
