use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture { dir: tempfile::tempdir().unwrap() }
    }

    fn file(&self, name: &str, body: &[u8]) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    }

    fn re_and_text(&self, re: &str, text: &str) -> (PathBuf, PathBuf) {
        (self.file("e.re", format!("{re}\n").as_bytes()), self.file("t.txt", text.as_bytes()))
    }
}

fn regrep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regrep")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn count_of_ambiguous_text() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(a|b|ab)+", "abab");
    for engine in ["serial-nfa", "serial-dfa", "parallel"] {
        let o = regrep(&["parse", s(&re), s(&t), "--emit", "count", "--engine", engine, "--chunks", "2"]);
        assert_eq!(o.status.code(), Some(0), "{engine}");
        assert_eq!(stdout(&o), "4\n");
    }
}

#[test]
fn empty_text_and_rejection() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(ab|a)*", "");
    let o = regrep(&["parse", s(&re), s(&t)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");
    let bad = f.file("bad.txt", b"ba");
    let o = regrep(&["parse", s(&re), s(&bad), "--engine", "serial-dfa"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "reject at offset 1\n");
}

#[test]
fn lsts_with_limit() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(a|b|ab)+", "abab");
    let o = regrep(&["parse", s(&re), s(&t), "--emit", "lsts", "--limit", "2"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 2);
    assert!(out.lines().all(|l| l.starts_with("1( 2( ") && l.ends_with(" )1")));
}

#[test]
fn slpf_file_is_written() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(ab|a)*", "abaaba");
    let dest = f.dir.path().join("out.slpf");
    let o = regrep(&["parse", s(&re), s(&t), "--emit", "slpf", "-o", s(&dest)]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(&dest).unwrap();
    assert_eq!(&bytes[..5], b"SLPF1");
    let piped = regrep(&["parse", s(&re), s(&t), "--emit", "slpf"]);
    assert_eq!(piped.stdout, bytes);
}

#[test]
fn queries() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(ab|a)*", "ab");
    let o = regrep(&["query", s(&re), s(&t), "g3"]);
    assert_eq!(stdout(&o), "0\t2\tab\n");
    let o = regrep(&["query", s(&re), s(&t), "g1"]);
    assert_eq!(stdout(&o), "0\t2\tab\n");
    let (re, t) = f.re_and_text("(a|b|ab)+", "abab");
    let o = regrep(&["query", s(&re), s(&t), "g5"]);
    assert_eq!(stdout(&o), "0\t2\tab\n2\t4\tab\n");
    let o = regrep(&["query", s(&re), s(&t), "g5/g2"]);
    assert_eq!(stdout(&o), "0\t2\tab\n2\t4\tab\n");
    let o = regrep(&["query", s(&re), s(&t), "g42"]);
    assert_eq!(o.status.code(), Some(3));
    let o = regrep(&["query", s(&re), s(&t), "five"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bench_sweep_rows() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(ab|a)*", &"aba".repeat(1000));
    let o = regrep(&["bench", s(&re), s(&t), "--threads-sweep", "1..4", "--reps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("engine,threads,chunks,text_bytes,run,parse_ns,reach_ns,join_ns,build_ns"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.len() == 9 && r[0] == "parallel" && r[3] == "3000"));
    assert_eq!(rows[11][1], "4");
    assert_eq!(rows[11][4], "2");
}

#[test]
fn oracle_report() {
    let f = Fixture::new();
    let re = f.file("e3.re", b"(a|b|ab)+\n");
    let o = regrep(&["oracle", s(&re), "4"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("runs\t\"abab\"\t4\n"), "{out}");
    assert!(!out.contains("FAIL"));
    let re = f.file("e2.re", b"(ab|a)*");
    let o = regrep(&["oracle", s(&re), "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("dfa: 3\nmedfa: 13\n"));
    assert_eq!(regrep(&["oracle", s(&re), "9"]).status.code(), Some(3));
}

#[test]
fn dumps() {
    let f = Fixture::new();
    let re = f.file("e2.re", b"(ab|a)*");
    let o = regrep(&["parse", s(&re), "--dump", "segments"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains(")3 )2 2( 3( a4"));
    let o = regrep(&["parse", s(&re), "--dump", "dfa"]);
    assert!(stdout(&o).starts_with("states: 3\n"));
    let o = regrep(&["parse", s(&re), "--dump", "medfa"]);
    assert!(stdout(&o).starts_with("states: 14\n"));
    let o = regrep(&["parse", s(&re), "--dump", "nfa"]);
    assert!(!stdout(&o).is_empty());
}

#[test]
fn error_codes() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(ab", "ab");
    let o = regrep(&["parse", s(&re), s(&t)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("offset"));
    let missing = f.dir.path().join("nope.txt");
    let (re, _) = f.re_and_text("a", "");
    assert_eq!(regrep(&["parse", s(&re), s(&missing)]).status.code(), Some(2));
    assert_eq!(regrep(&["parse", s(&re), s(&t), "--engine", "quantum"]).status.code(), Some(3));
    assert_eq!(regrep(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(regrep(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let f = Fixture::new();
    let (re, t) = f.re_and_text("(a|b|ab)+", "abababba");
    let a = regrep(&["parse", s(&re), s(&t), "--emit", "matches", "--chunks", "3"]);
    let b = regrep(&["parse", s(&re), s(&t), "--emit", "matches", "--chunks", "1", "--engine", "serial-nfa"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("g1\t0\t8\tabababba\n"));
}
