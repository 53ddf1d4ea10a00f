use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const PSI: &str = env!("CARGO_BIN_EXE_psi");

fn psi(args: &[&str]) -> Output {
    Command::new(PSI).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn sample_index(dir: &TempDir) -> PathBuf {
    let text = dir.path().join("sample.txt");
    let index = dir.path().join("sample.psi");
    std::fs::write(&text, "abaabaa").unwrap();
    let out = psi(&["build", p(&text), "-r", "2", "-o", p(&index)]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("n=8 r=2 sigma=2 "));
    index
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn query_prints_positions_and_counts() {
    let dir = tempfile::tempdir().unwrap();
    let index = sample_index(&dir);
    assert_eq!(stdout(&psi(&["query", p(&index), "aba"])), "1\n4\n");
    assert_eq!(stdout(&psi(&["query", p(&index), "aba", "--count"])), "2\n");
    let none = psi(&["query", p(&index), "bbb"]);
    assert!(none.status.success());
    assert!(none.stdout.is_empty());
    // Repeated runs give identical output.
    assert_eq!(psi(&["query", p(&index), "a"]).stdout, psi(&["query", p(&index), "a"]).stdout);
}

#[test]
fn usage_and_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("t");
    std::fs::write(&text, "abc").unwrap();
    let out = dir.path().join("o");
    assert_eq!(psi(&["build", p(&text), "-r", "0", "-o", p(&out)]).status.code(), Some(1));
    assert_eq!(psi(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(psi(&["verify"]).status.code(), Some(1));
    assert_eq!(psi(&["--help"]).status.code(), Some(0));

    let missing = psi(&["build", "/nonexistent/file", "-r", "2", "-o", p(&out)]);
    assert_eq!(missing.status.code(), Some(2));

    let too_large = psi(&["build", p(&text), "-r", "40", "-o", p(&out)]);
    assert_eq!(too_large.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&too_large.stderr).contains("BlockTooLarge"));

    let overflow = psi(&["build", p(&text), "-r", "2", "--word-capacity", "40", "-o", p(&out)]);
    assert_eq!(overflow.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&overflow.stderr).contains("AlphabetOverflow"));

    let foreign = psi(&["query", p(&text), "a"]);
    assert_eq!(foreign.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&foreign.stderr).contains("BadMagic"));
}

#[test]
fn verify_detects_damage() {
    let dir = tempfile::tempdir().unwrap();
    let index = sample_index(&dir);
    let ok = psi(&["verify", p(&index)]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("failures=0"));

    let mut bytes = std::fs::read(&index).unwrap();
    let last = bytes.len() - 10;
    bytes[last] ^= 0xff;
    std::fs::write(&index, &bytes).unwrap();
    assert_eq!(psi(&["verify", p(&index)]).status.code(), Some(3));

    let empty = psi(&["verify", "--random", "--samples", "0"]);
    assert_eq!(empty.status.code(), Some(0));
    assert!(stdout(&empty).starts_with("failures=0 instances=0"));

    let random = psi(&["verify", "--random", "--samples", "5", "--seed", "3"]);
    assert_eq!(random.status.code(), Some(0));
}

#[test]
fn stats_report_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let index = sample_index(&dir);
    let out = stdout(&psi(&["stats", p(&index)]));
    assert!(out.contains("C: 16\n"));
    assert!(out.contains("within: true"));

    let text = dir.path().join("bytes");
    std::fs::write(&text, "some bytes").unwrap();
    let big = dir.path().join("big.psi");
    assert!(psi(&["build", p(&text), "-r", "4", "--alphabet", "byte", "-o", p(&big)]).status.success());
    assert!(stdout(&psi(&["stats", p(&big)])).contains("C: disabled\n"));
}

#[test]
fn bench_prints_counters() {
    let dir = tempfile::tempdir().unwrap();
    let index = sample_index(&dir);
    let patterns = dir.path().join("patterns");
    std::fs::write(&patterns, "aba\nab\nabaa\n").unwrap();

    let none = stdout(&psi(&["bench", p(&index), p(&patterns), "--repeat", "0"]));
    assert_eq!(none.lines().count(), 1);
    assert!(none.starts_with("pattern\tm\tocc"));

    let out = stdout(&psi(&["bench", p(&index), p(&patterns), "--repeat", "3"]));
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows.len(), 3);
    let (m, r) = (3, 2);
    let aba = &rows[0];
    assert_eq!(aba[0], "aba");
    assert_eq!(aba[2], "2");
    let right: usize = aba[3..6].iter().map(|x| x.parse::<usize>().unwrap()).sum();
    assert!(right <= 8 * (m + r * r + r));
}
