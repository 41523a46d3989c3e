use std::process::Command;

fn rosenbrock(args: &[&str], out: &std::path::Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rosenbrock")).args(args).arg("--out-dir").arg(out).output().unwrap()
}

#[test]
fn validate_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let common = [
        "validate",
        "--family",
        "twod",
        "--steps",
        "200000",
        "--warmup",
        "5000",
        "--thin",
        "10",
        "--n-exact",
        "20000",
        "--seed",
        "3",
    ];
    let ok = rosenbrock(&common, &dir.path().join("ok"));
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));

    // Negative control: the chain targets a different b than the exact sampler.
    let mut wrong = common.to_vec();
    wrong.extend(["--mcmc-b", "0.05"]);
    let bad = rosenbrock(&wrong, &dir.path().join("bad"));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let full = rosenbrock(&["sample", "--family", "full", "-n", "10"], dir.path());
    assert_eq!(full.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&full.stderr).contains("error"));

    let missing = rosenbrock(&["mcmc", "--config", "/nonexistent/manifest.json"], dir.path());
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn config_kind_must_match_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let run = rosenbrock(&["sample", "-n", "100", "--family", "twod"], &first);
    assert_eq!(run.status.code(), Some(0));
    let manifest = first.join("manifest.json");
    let other = rosenbrock(&["mcmc", "--config", manifest.to_str().unwrap()], &dir.path().join("b"));
    assert_eq!(other.status.code(), Some(1));
}

#[test]
fn seed_flag_overrides_manifest_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert_eq!(rosenbrock(&["sample", "-n", "50", "--seed", "1"], &a).status.code(), Some(0));
    let manifest = a.join("manifest.json");
    let b = dir.path().join("b");
    let out = rosenbrock(&["sample", "--config", manifest.to_str().unwrap(), "--seed", "2"], &b);
    assert_eq!(out.status.code(), Some(0));
    assert_ne!(std::fs::read(a.join("samples.bin")).unwrap(), std::fs::read(b.join("samples.bin")).unwrap());
}
