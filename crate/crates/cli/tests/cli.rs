use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn diagpair(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagpair")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn gen(dir: &Path, name: &str, args: &[&str]) {
    let mut all = vec!["gen"];
    all.extend_from_slice(args);
    let out = diagpair(&all, dir);
    assert!(out.status.success());
    fs::write(dir.join(name), stdout(&out)).unwrap();
}

#[test]
fn gen_is_deterministic_and_parses() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--p", "3", "--tau", "1", "--s", "97", "--seed", "5"];
    let a = stdout(&diagpair(&args, dir.path()));
    let b = stdout(&diagpair(&args, dir.path()));
    assert_eq!(a, b);
    assert!(a.starts_with("diagpair-system p=3 tau=1 K=11 s=97\n"));
    assert_eq!(a.lines().filter(|l| !l.starts_with("diagpair") && !l.starts_with("meta")).count(), 97);
}

#[test]
fn solve_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "sys.txt", &["--p", "5", "--tau", "1", "--s", "1541", "--seed", "2"]);
    let out = diagpair(&["solve", "sys.txt", "--lift-to", "10", "--log", "run.jsonl"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let cert = stdout(&out);
    assert!(cert.contains("modulo p^10"));
    fs::write(dir.path().join("cert.txt"), &cert).unwrap();
    assert_eq!(diagpair(&["verify", "sys.txt", "--certificate", "cert.txt"], dir.path()).status.code(), Some(0));

    let log = fs::read_to_string(dir.path().join("run.jsonl")).unwrap();
    let records: Vec<serde_json::Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(records.iter().any(|r| r["record"] == "contraction"));
    assert_eq!(records.last().unwrap()["record"], "result");

    // drop one support index: no longer a certificate
    let idx: Vec<&str> = cert.lines().filter(|l| !l.starts_with('#')).collect();
    fs::write(dir.path().join("short.txt"), idx[1..].join("\n")).unwrap();
    assert_eq!(diagpair(&["verify", "sys.txt", "--certificate", "short.txt"], dir.path()).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("junk.txt"), "not a system\n").unwrap();
    assert_eq!(diagpair(&["solve", "junk.txt"], dir.path()).status.code(), Some(2));
    assert_eq!(diagpair(&["solve", "missing.txt"], dir.path()).status.code(), Some(2));
    gen(dir.path(), "small.txt", &["--p", "5", "--tau", "1", "--s", "60"]);
    // below the variable bound: refused in guaranteed mode, solved opportunistically
    assert_eq!(diagpair(&["solve", "small.txt"], dir.path()).status.code(), Some(2));
    assert_eq!(diagpair(&["solve", "small.txt", "--mode", "opportunistic"], dir.path()).status.code(), Some(0));
    fs::write(dir.path().join("trivial.txt"), "diagpair-system p=3 tau=1 K=4 s=2\n1 0\n0 1\n").unwrap();
    assert_eq!(diagpair(&["solve", "trivial.txt", "--mode", "opportunistic"], dir.path()).status.code(), Some(1));
    assert_eq!(diagpair(&["oracle", "trivial.txt"], dir.path()).status.code(), Some(1));
    // strict constants make the variable bound enormous
    gen(dir.path(), "big.txt", &["--p", "5", "--tau", "1", "--s", "1541"]);
    assert_eq!(diagpair(&["solve", "big.txt", "--strict-paper-constants"], dir.path()).status.code(), Some(2));
}

#[test]
fn normalize_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), "raw.txt", &["--p", "3", "--tau", "1", "--s", "40", "--profile", "raw", "-K", "30", "--seed", "1"]);
    let out = diagpair(&["normalize", "raw.txt"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("meta theta_after="));
    fs::write(dir.path().join("norm.txt"), stdout(&out)).unwrap();
    let out = diagpair(&["oracle", "norm.txt"], dir.path());
    assert!(out.status.success());
    fs::write(dir.path().join("cert.txt"), stdout(&out)).unwrap();
    assert_eq!(diagpair(&["verify", "norm.txt", "--certificate", "cert.txt"], dir.path()).status.code(), Some(0));
}

#[test]
fn batch_mode() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch");
    fs::create_dir(&batch).unwrap();
    for seed in 0..4 {
        gen(&batch, &format!("s{seed}.txt"), &["--p", "5", "--tau", "1", "--s", "1541", "--seed", &seed.to_string()]);
    }
    let out = diagpair(&["solve", "--batch", "batch"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["status"] == "certified"));

    fs::write(batch.join("zz.txt"), "garbage").unwrap();
    assert_eq!(diagpair(&["solve", "--batch", "batch"], dir.path()).status.code(), Some(2));
}

#[test]
fn lemma_suites() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["lemma", "olson", "--p", "5", "--samples", "500"],
        vec!["lemma", "cd", "--p", "5", "--exhaustive"],
        vec!["lemma", "prop71", "--p", "3", "--exhaustive"],
        vec!["lemma", "alon", "--p", "5", "--samples", "200", "--seed", "3"],
        vec!["lemma", "davenport", "--p", "3", "--exhaustive"],
    ] {
        let out = diagpair(&args, dir.path());
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert!(stdout(&out).contains(" 0 failures"), "{}", stdout(&out));
    }
    assert_eq!(diagpair(&["lemma", "olson", "--p", "4"], dir.path()).status.code(), Some(2));
}
