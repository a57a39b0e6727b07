use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const HEADER: &str = "bpd-machine v1
input: 01
stack: z
states: q
start: q
start-stack: z
lambda-bound: 0
trans: q 0 z -> q z
trans: q 1 z -> q z
";

fn bpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bpd")).args(args).output().expect("run bpd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn machine(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, format!("{HEADER}{body}")).unwrap();
    path
}

fn c_id(dir: &Path) -> PathBuf {
    machine(dir, "c_id.bpd", "kind: compressor\nout: q 0 z -> 0\nout: q 1 z -> 1\n")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_seq_starts_with_early_segment() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.txt");
    let o = bpd(&["gen-seq", "--k", "3", "--upto", "3", "--out", s(&out)]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("0100011011111111"), "{text}");
    assert_eq!(text.trim_end().len(), 56);
}

#[test]
fn il_check_identity() {
    let dir = TempDir::new().unwrap();
    let o = bpd(&["il-check", s(&c_id(dir.path())), "--max-len", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("IL: yes"));
}

#[test]
fn il_check_lossy_fails_with_verification_code() {
    let dir = TempDir::new().unwrap();
    let c = machine(dir.path(), "drop.bpd", "kind: compressor\nout: q 0 z -> ~\nout: q 1 z -> 1\n");
    let o = bpd(&["il-check", s(&c), "--max-len", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("IL: no"));
}

#[test]
fn parse_claim_passes() {
    let o = bpd(&["verify", "parse-claim", "--k", "3", "--upto", "6"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn lz_parse_counts_tail() {
    let o = bpd(&["lz", "parse", "--input", "0000"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "n=4 phrases=2 tail=yes output_len=5");
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let c = c_id(dir.path());
    let bad_symbol = bpd(&["run-compressor", s(&c), "--input", "012"]);
    assert_eq!(bad_symbol.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_symbol.stderr).starts_with("error[alphabet]"));
    assert_eq!(bpd(&["gen-seq", "--k", "3"]).status.code(), Some(2));
    assert_eq!(bpd(&["lz", "ratio", "--seq", "sep:3"]).status.code(), Some(2));
}

#[test]
fn machine_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let c = c_id(dir.path());
    let o = bpd(&["run-gambler", s(&c), "--input", "01"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error[machine]"));
    let junk = dir.path().join("junk.bpd");
    fs::write(&junk, "not a machine\n").unwrap();
    assert_eq!(bpd(&["validate", s(&junk)]).status.code(), Some(3));
}

#[test]
fn failure_leaves_no_partial_csv() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope").join("zones.csv");
    let out = dir.path().join("s.txt");
    let o = bpd(&["gen-seq", "--k", "3", "--upto", "4", "--out", s(&out), "--zones", s(&missing)]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!out.exists());
}

#[test]
fn gambler_csv_and_capital() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("sep.bpd");
    assert!(bpd(&["sep-gambler", "--k", "3", "--export", s(&g)]).status.success());
    let csv = dir.path().join("cap.csv");
    let o = bpd(&["run-gambler", s(&g), "--seq", "sep:3:6", "--checkpoints", "56,555", "--csv", s(&csv)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("log_capital=181.000000"));
    let rows = fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 3);
    assert!(rows.lines().nth(1).unwrap().starts_with("56,32,1,5.0"));
}

#[test]
fn block_constructions_export_valid_machines() {
    let dir = TempDir::new().unwrap();
    let g = machine(dir.path(), "g_uni.bpd", "kind: gambler\nbet: q z -> 1/2 1/2\n");
    let bc = dir.path().join("bc.bpd");
    let o = bpd(&["g2c", s(&g), "--k", "3", "--input", "01101100", "--export", s(&bc)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ratio=1"));
    assert!(bpd(&["validate", s(&bc)]).status.success());
    let bg = dir.path().join("bg.bpd");
    assert!(bpd(&["c2g", s(&c_id(dir.path())), "--k", "2", "--export", s(&bg)]).status.success());
    assert!(bpd(&["validate", s(&bg)]).status.success());
}

#[test]
fn vanishing_bets_need_rho() {
    let dir = TempDir::new().unwrap();
    let g = machine(dir.path(), "g_all0.bpd", "kind: gambler\nbet: q z -> 1 0\n");
    assert_eq!(bpd(&["g2c", s(&g), "--k", "2", "--input", "01"]).status.code(), Some(3));
    let o = bpd(&["g2c", s(&g), "--k", "2", "--rho", "1/2", "--input", "0000"]);
    assert!(o.status.success());
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |tag: &str| {
        let lz = dir.path().join(format!("lz{tag}.csv"));
        let zones = dir.path().join(format!("z{tag}.csv"));
        let text = dir.path().join(format!("s{tag}.txt"));
        assert!(bpd(&["lz", "ratio", "--seq", "sep:3:7", "--checkpoints", "step:100", "--csv", s(&lz)])
            .status
            .success());
        assert!(bpd(&["gen-seq", "--k", "3", "--upto", "7", "--out", s(&text), "--zones", s(&zones)])
            .status
            .success());
        [lz, zones, text].map(|p| fs::read(p).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}
