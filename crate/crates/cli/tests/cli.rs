use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn discsde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_discsde"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn manifest_value(dir: &Path, key: &str) -> Option<String> {
    fs::read_to_string(dir.join("manifest.csv"))
        .unwrap()
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")).map(str::to_string))
}

#[test]
fn list_models_names_builtins() {
    let o = discsde(&["list-models"]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    for name in ["example1", "example2", "sign1d", "gbm", "custom"] {
        assert!(out.contains(name), "{out}");
    }
}

#[test]
fn check_geometry_on_sphere_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("sphere.cfg");
    fs::write(
        &cfg,
        "[model]\nname = custom\npieces = 1,0,0; -1,0,0\n[surface]\nkind = sphere\ncenter = 0,0,0\nradius = 1.5\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = discsde(&[
        "check-geometry",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(out.join("geometry_report.csv")).unwrap();
    assert!(report.starts_with("property,samples,failures,max_error,pass\n"));
    assert_eq!(report.lines().count(), 7);
    assert!(report.lines().skip(1).all(|l| l.ends_with(",true")), "{report}");
    assert_eq!(manifest_value(&out, "status").as_deref(), Some("ok"));
}

#[test]
fn check_transform_reports_failed_contraction() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    let o = discsde(&[
        "check-transform",
        "--model",
        "example2",
        "--eps",
        "1.5",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("contraction |Gamma|"), "{err}");
    let report = fs::read_to_string(out.join("transform_certificate.csv")).unwrap();
    assert!(report.contains("contraction |Gamma|,") && report.contains(",false"));
    assert!(manifest_value(&out, "status").unwrap().starts_with("failed (exit 3)"));
}

#[test]
fn check_transform_passes_with_default_eps() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("t");
    let o = discsde(&["check-transform", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn grid_mismatch_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "model = example1\nexperiment = error\nn = 64, 100\nN = 2^14\n").unwrap();
    let out = tmp.path().join("out");
    let o = discsde(&["run", "--config", cfg.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("n must divide N"));
    assert!(!out.exists());
}

#[test]
fn config_parse_error_names_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "model = example1\n\nnot a pair\n").unwrap();
    let o = discsde(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 3"));
}

#[test]
fn seed_flag_overrides_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.cfg");
    fs::write(&cfg, "model = gbm\nseed = 7\nm = 50\nn = 2^3, 2^4\nN = 2^6\n").unwrap();
    let out = tmp.path().join("out");
    let o = discsde(&[
        "run-error",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "42",
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(manifest_value(&out, "seed").as_deref(), Some("42"));
    assert_eq!(manifest_value(&out, "experiment").as_deref(), Some("error"));
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.csv")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out = tmp.path().join(name);
        let o = discsde(&[
            "run-error",
            "--model",
            "example1",
            "--seed",
            "1",
            "--m",
            "300",
            "--n",
            "2^4,2^5,2^6",
            "--N",
            "2^9",
            "--threads",
            threads,
            "--out-dir",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        outputs(&out)
    };
    let a = run("a", "1");
    let b = run("b", "1");
    let c = run("c", "2");
    assert_eq!(a.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(), ["error.csv", "rates.csv"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn remaining_experiments_write_their_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let common = ["--model", "example1", "--m", "40", "--n", "2^3,2^4", "--N", "2^6"];
    let cases: [(&str, &[&str], &[&str]); 4] = [
        ("run-diff", &[], &["diff.csv", "rates.csv"]),
        ("run-sup-error", &[], &["rates.csv", "sup_error.csv"]),
        ("run-hist", &["--p", "2"], &["histogram.csv"]),
        (
            "run-occupation",
            &[],
            &["neighborhood.csv", "neighborhood_fit.csv", "occupation.csv", "occupation_rate.csv"],
        ),
    ];
    for (cmd, extra, expected) in cases {
        let out = tmp.path().join(cmd);
        let mut args = vec![cmd, "--out-dir", out.to_str().unwrap()];
        args.extend(common);
        args.extend(extra);
        let o = discsde(&args);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        let names: Vec<_> = outputs(&out).into_iter().map(|f| f.0).collect();
        assert_eq!(names, expected, "{cmd}");
    }
}
