//! End-to-end tests of the `ideal-moments` binary: exit codes, report
//! formats, cache round trips, and configuration precedence.

use std::fs;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ideal-moments"));
    // isolate every test from an ambient cache override
    cmd.env_remove("IDEAL_MOMENTS_CACHE");
    cmd
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn constants_json_has_exact_keys() {
    let out = run(bin().args(["constants", "--field", "Q(sqrt{-1})"]));
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let obj = doc.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(|k| k.as_str()).collect();
    keys.sort();
    assert_eq!(
        keys,
        vec!["digits", "field", "provenance", "rho", "zeta0", "zeta2"]
    );
    assert_eq!(obj["field"], "Q(sqrt{-1})");
    let rho = obj["rho"].as_f64().unwrap();
    assert!((rho - std::f64::consts::PI / 4.0).abs() < 1e-10);
}

#[test]
fn bad_field_is_a_config_error() {
    let out = run(bin().args(["constants", "--field", "Q(sqrt{12})"]));
    assert_eq!(out.status.code(), Some(4));
    let out = run(bin().args(["moment", "--field", "Q", "--kind", "first", "--x", "10"]));
    assert_eq!(out.status.code(), Some(4), "missing y must be a config error");
    let out = run(bin().args(["moment", "--field", "Q", "--kind", "nope", "--x", "10", "--y", "5"]));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_passes_and_selftest_corrupt_fails() {
    let out = run(bin().args(["verify", "--field", "Q", "--max-n", "100"]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.lines().all(|l| l.starts_with("PASS")), "{text}");

    let out = run(bin().args([
        "verify",
        "--field",
        "Q",
        "--max-n",
        "100",
        "--selftest-corrupt",
    ]));
    assert_eq!(out.status.code(), Some(2));
    let text = stdout(&out);
    assert!(
        text.contains("FAIL Q selftest-corrupt") && text.contains("first-failure-n=50"),
        "{text}"
    );
}

#[test]
fn cache_build_validate_purge_round_trip() {
    let dir = tempdir().unwrap();
    let dir_arg = dir.path().to_str().unwrap();
    let out = run(bin().args([
        "cache", "build", "--field", "Q(sqrt{5})", "--max-n", "200", "--cache-dir", dir_arg,
    ]));
    assert_eq!(out.status.code(), Some(0));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec!["Q_sqrt_5__-a_K-200.cache", "Q_sqrt_5__-mertens-200.cache"]
    );

    let out = run(bin().args(["cache", "validate", "--cache-dir", dir_arg]));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("validated 2 file(s), 0 invalid"));

    // corrupt one file: validation must flag it and exit 2
    let victim = dir.path().join("Q_sqrt_5__-mertens-200.cache");
    let mut text = fs::read_to_string(&victim).unwrap();
    text = text.replacen("100,", "100,9", 1);
    fs::write(&victim, text).unwrap();
    let out = run(bin().args(["cache", "validate", "--cache-dir", dir_arg]));
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("INVALID"));

    let out = run(bin().args([
        "cache", "purge", "--cache-dir", dir_arg, "--tag", "mertens",
    ]));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("purged 1 file(s)"));
    let out = run(bin().args(["cache", "purge", "--cache-dir", dir_arg]));
    assert!(stdout(&out).contains("purged 1 file(s)"));
}

#[test]
fn env_var_overrides_cache_dir_flag() {
    let env_dir = tempdir().unwrap();
    let flag_dir = tempdir().unwrap();
    let out = run(bin()
        .args([
            "cache",
            "build",
            "--field",
            "Q",
            "--max-n",
            "50",
            "--cache-dir",
            flag_dir.path().to_str().unwrap(),
        ])
        .env("IDEAL_MOMENTS_CACHE", env_dir.path()));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_dir(env_dir.path()).unwrap().count(), 2);
    assert_eq!(fs::read_dir(flag_dir.path()).unwrap().count(), 0);
}

#[test]
fn moment_grid_emits_csv_and_json() {
    let dir = tempdir().unwrap();
    let csv_path = dir.path().join("report.csv");
    let json_path = dir.path().join("report.json");
    let out = run(bin().args([
        "moment",
        "--field",
        "Q(sqrt{-1})",
        "--kind",
        "second",
        "--x",
        "10,20,30",
        "--y-rule",
        "y=x^3",
        "--c2",
        "0.5",
        "--cache-dir",
        dir.path().join("cache").to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(0));

    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "field,x,y,kind,empirical,predicted,residual,normalized_residual,regime,c2,seed,runtime_ms"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4); // 3 data rows + #fit
    for row in &rows[..3] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 12, "{row}");
        assert_eq!(cols[0], "Q(sqrt{-1})");
        assert_eq!(cols[3], "second");
        assert_eq!(cols[9], "0.5");
    }
    assert!(rows[3].starts_with("#fit,slope="), "{}", rows[3]);

    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert!(doc["fit"]["slope"].is_number());
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(
        &conf,
        format!(
            "# experiment config\nfield=Q\nkind=avg-sigma\nz=-0.25\nx=100,200\n\
             cache-dir={}\n",
            dir.path().join("cache").display()
        ),
    )
    .unwrap();
    let out = run(bin().args(["moment", "--config", conf.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("Q,100,100,avg-sigma,"), "{text}");

    // a flag still overrides the file
    let out = run(bin().args([
        "moment",
        "--config",
        conf.to_str().unwrap(),
        "--x",
        "50",
    ]));
    let text = stdout(&out);
    assert!(text.contains("Q,50,50,avg-sigma,"), "{text}");
}
