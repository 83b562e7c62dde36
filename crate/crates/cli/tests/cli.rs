use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dotqip(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dotqip"))
        .args(args)
        .current_dir(dir)
        .env_remove("DOTQIP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn error_record(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn csv_body(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn bell_example_writes_expected_columns_and_peak() {
    let dir = tempfile::tempdir().unwrap();
    let out = dotqip(
        &[
            "bell", "--W", "0.1", "--A", "0.02", "--phi", "1.5708", "--tmax", "800", "--dt", "0.1", "--gamma", "0",
            "--out", "bell.csv",
        ],
        dir.path(),
    );
    ok(&out);
    let (header, rows) = csv_body(&dir.path().join("bell.csv"));
    assert_eq!(header, ["t", "O_bell", "rho00", "rho11", "rho22", "purity"]);
    assert_eq!(rows.len(), 8001);
    let best = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    assert!(best > 0.99, "{best}");
    assert!(rows.iter().all(|r| (r[2] + r[3] + r[4] - 1.0).abs() < 1e-9));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        ok(&dotqip(&["ghz", "--tmax", "50", "--dt", "0.5", "--out", name], dir.path()));
    }
    assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), std::fs::read(dir.path().join("b.csv")).unwrap());

    // worker count changes scheduling, not output
    ok(&dotqip(&["nmr-sweep", "--steps", "300", "--workers", "1", "--out", "n1.csv"], dir.path()));
    ok(&dotqip(&["nmr-sweep", "--steps", "300", "--workers", "4", "--out", "n4.csv"], dir.path()));
    assert_eq!(std::fs::read(dir.path().join("n1.csv")).unwrap(), std::fs::read(dir.path().join("n4.csv")).unwrap());
}

#[test]
fn metadata_reproduces_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &[
            "bell",
            "--phi",
            "0.30000000000000004",
            "--A",
            "0.0123456789012345678",
            "--W",
            "9.87654321e-2",
            "--tmax",
            "5",
        ],
        &[
            "nmr-sweep",
            "--hbar-omega0-mev",
            "5.4",
            "--ratio",
            "3.0",
            "--mstar",
            "0.19",
            "--bmax",
            "12",
            "--steps",
            "600",
            "--ir",
            "off",
        ],
        &["decohere", "--gammas", "0,0.001", "--tmax", "40", "--dt", "1", "--target", "ghz"],
        &["vinter", "--steps", "7", "--format", "json"],
        &["teleport", "--alpha", "0.6", "--beta", "-0.8", "--seed", "11"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let ext = if args.contains(&"json") || args[0] == "teleport" { "json" } else { "csv" };
        let first = format!("first{k}.{ext}");
        let second = format!("second{k}.{ext}");
        let mut a: Vec<&str> = args.to_vec();
        a.extend(["--out", &first]);
        ok(&dotqip(&a, dir.path()));
        ok(&dotqip(&[args[0], "--config", &first, "--out", &second], dir.path()));
        assert_eq!(
            std::fs::read(dir.path().join(&first)).unwrap(),
            std::fs::read(dir.path().join(&second)).unwrap(),
            "{args:?}"
        );
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"experiment":"vinter","alpha":2.0,"steps":3}"#).unwrap();
    ok(&dotqip(&["vinter", "--config", "cfg.json", "--steps", "4", "--out", "v.csv"], dir.path()));
    let text = std::fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert!(text.contains(r#""alpha":2.0"#));
    assert!(text.contains(r#""steps":4"#));
    let (header, rows) = csv_body(&dir.path().join("v.csv"));
    assert_eq!(header, ["d", "v_inter_1", "v_inter_2"]);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[1] < r[2]));
}

#[test]
fn teleport_record_has_unit_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    ok(&dotqip(&["teleport", "--alpha", "0.6", "--beta", "0.8", "--seed", "7"], dir.path()));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("teleport.json")).unwrap()).unwrap();
    let fid = doc["record"]["fidelity"].as_f64().unwrap();
    assert!((fid - 1.0).abs() < 1e-12);
    assert_eq!(doc["metadata"]["config"]["seed"], 7);
    for outcome in ["00", "01", "10", "11"] {
        ok(&dotqip(
            &["teleport", "--alpha", "0.6", "--beta", "0.8", "--outcome", outcome, "--out", "t.json"],
            dir.path(),
        ));
    }
}

#[test]
fn nmr_sweep_columns_and_singlet_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(&dotqip(&["nmr-sweep", "--steps", "200", "--out", "n.csv"], dir.path()));
    let (header, rows) = csv_body(&dir.path().join("n.csv"));
    assert_eq!(header, ["B_T", "wc_over_w0", "m", "S", "A_m_MHz", "omega_nmr_MHz", "rel_shift"]);
    assert!(rows.iter().any(|r| r[3] == 0.0) && rows.iter().any(|r| r[3] == 1.0));
    for r in &rows {
        if r[3] == 0.0 {
            assert_eq!(r[6], 0.0);
        }
    }
}

#[test]
fn decohere_rows_keep_unit_trace() {
    let dir = tempfile::tempdir().unwrap();
    ok(&dotqip(
        &["decohere", "--gammas", "0.0,0.01", "--tmax", "30", "--dt", "1", "--workers", "2", "--out", "d.csv"],
        dir.path(),
    ));
    let (header, rows) = csv_body(&dir.path().join("d.csv"));
    assert_eq!(header, ["gamma", "t", "O_target", "O_envelope", "purity", "trace"]);
    assert_eq!(rows.len(), 62);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[61][0], 0.01);
    assert!(rows.iter().all(|r| (r[5] - 1.0).abs() < 1e-9 && r[2] <= r[3] + 1e-12));
}

#[test]
fn env_var_sets_default_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dotqip"))
        .args(["vinter", "--steps", "3"])
        .env("DOTQIP_OUT_DIR", dir.path())
        .output()
        .unwrap();
    ok(&out);
    assert!(dir.path().join("vinter.csv").is_file());
}

#[test]
fn validation_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["bell", "--W", "-0.1", "--out", "x.csv"],
        &["bell", "--convention", "sideways", "--out", "x.csv"],
        &["teleport", "--alpha", "0.6", "--beta", "0.6", "--out", "x.json"],
        &["teleport", "--outcome", "21", "--out", "x.json"],
        &["nmr-sweep", "--bmin", "5", "--bmax", "1", "--out", "x.csv"],
        &["bell", "--bogus", "1"],
    ];
    for args in cases {
        let out = dotqip(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_record(&out)["error"], "validation");
    }
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dotqip(&["bell", "--gamma", "1e12", "--tmax", "1", "--dt", "0.5", "--out", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"], "numerical");
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn lab_frame_overlap_oscillates_under_envelope() {
    let dir = tempfile::tempdir().unwrap();
    ok(&dotqip(&["bell", "--frame", "lab", "--tmax", "40", "--dt", "0.05", "--out", "lab.csv"], dir.path()));
    ok(&dotqip(&["bell", "--frame", "rotating", "--tmax", "40", "--dt", "0.05", "--out", "rot.csv"], dir.path()));
    let (_, lab) = csv_body(&dir.path().join("lab.csv"));
    let (_, rot) = csv_body(&dir.path().join("rot.csv"));
    // populations are frame independent, the fixed-phase overlap is not
    for (l, r) in lab.iter().zip(&rot) {
        assert!((l[2] - r[2]).abs() < 1e-12);
    }
    assert!(lab.iter().zip(&rot).any(|(l, r)| (l[1] - r[1]).abs() > 0.1));
}
