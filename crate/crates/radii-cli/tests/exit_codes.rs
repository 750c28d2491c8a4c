use std::fs;
use std::process::{Command, Output};

use radii_cli::certfile::CertFile;
use tempfile::TempDir;

fn radii(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radii"))
        .args(args)
        .env("RADII_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn codes_per_outcome() {
    let dir = TempDir::new().unwrap();
    let cert = dir.path().join("c.json");
    let cert_s = cert.to_str().unwrap();

    let ok = radii(&["continue", "--m0", "60", "--ds0", "5e-4", "--max-steps", "2", "--out", cert_s]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("2 segments verified"));
    assert_eq!(code(&radii(&["verify", cert_s])), 0);

    let bad_seed = radii(&["continue", "--seed", "constant@nope", "--out", cert_s]);
    assert_eq!(code(&bad_seed), 2);
    assert!(String::from_utf8_lossy(&bad_seed.stderr).contains("bad seed"));

    let conf = dir.path().join("run.conf");
    fs::write(&conf, "colour = blue\n").unwrap();
    let bad_key = radii(&["--config", conf.to_str().unwrap(), "prove-point", "--out", cert_s]);
    assert_eq!(code(&bad_key), 2);
    assert_eq!(code(&radii(&["verify", "/no/such/file.json"])), 2);

    let mut c = CertFile::from_json(&fs::read_to_string(&cert).unwrap()).unwrap();
    c.content_hash = "0".repeat(64);
    let tampered = dir.path().join("t.json");
    fs::write(&tampered, c.to_json()).unwrap();
    let out = radii(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("content hash mismatch"));

    let few = radii(&["prove-point", "--seed", "constant@0.02", "--m0", "6", "--out", cert_s]);
    assert_eq!(code(&few), 1);
}

#[test]
fn coexist_and_diagram_from_the_binary() {
    let dir = TempDir::new().unwrap();
    let cert = dir.path().join("c.json");
    let cert_s = cert.to_str().unwrap();
    let ok = radii(&["continue", "--m0", "60", "--ds0", "5e-4", "--max-steps", "2", "--out", cert_s]);
    assert_eq!(code(&ok), 0);

    let co = radii(&["coexist", cert_s, "--d-star", "0.04975"]);
    assert_eq!(code(&co), 0);
    assert!(String::from_utf8_lossy(&co.stdout).contains("1 distinct solutions"));

    let csv = dir.path().join("diag.csv");
    let dg = radii(&["diagram", cert_s, "--out", csv.to_str().unwrap(), "--verify-first"]);
    assert_eq!(code(&dg), 0);
    assert!(csv.with_extension("svg").exists());
}
