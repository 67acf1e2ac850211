//! `regrep`: parse a text against a regular expression and inspect the
//! resulting forest.
//!
//! Exit codes: 0 accept, 1 reject (or oracle mismatch), 2 I/O error,
//! 3 usage or expression error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use slpf::oracle::{self, OracleError};
use slpf::parallel::{hardware_threads, parse_parallel_timed};
use slpf::slpf::encode;
use slpf::{parse_serial_dfa, parse_serial_nfa, BuildOptions, ParallelOptions, ParseError, ReParser, Slpf};
use std::io::{Read, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

#[derive(Parser, Debug)]
#[command(name = "regrep", version, about = "Parse texts with regular expressions into shared linear parse forests")]
struct Cli {
    #[command(flatten)]
    engine: EngineArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct EngineArgs {
    #[arg(long, value_enum, default_value_t = Engine::Parallel, global = true)]
    engine: Engine,
    /// Number of chunks (defaults to the thread count).
    #[arg(long, global = true)]
    chunks: Option<usize>,
    /// Worker threads (defaults to the hardware thread count).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Fragments per chunk in the reach phase.
    #[arg(long, default_value_t = 4, global = true)]
    fragments: usize,
    /// How often a meta symbol may repeat inside one segment.
    #[arg(long, default_value_t = 1, global = true)]
    repeat_limit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    SerialNfa,
    SerialDfa,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Slpf,
    Lsts,
    Count,
    Matches,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Dump {
    Segments,
    Nfa,
    Dfa,
    Medfa,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a text and emit the forest or a summary of it.
    Parse {
        re_file: PathBuf,
        /// Text to parse; `-` reads standard input. Optional with `--dump`.
        text_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Count)]
        emit: Emit,
        /// Most trees printed by `--emit lsts`.
        #[arg(long, default_value_t = 10)]
        limit: usize,
        #[arg(long, value_enum)]
        dump: Option<Dump>,
        /// Where `--emit slpf` writes (standard output by default).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List the spans matched by a group: `g<N>` or `g<N>/g<M>`.
    Query { re_file: PathBuf, text_file: PathBuf, query: String },
    /// Time the parse and print CSV rows.
    Bench {
        re_file: PathBuf,
        text_file: PathBuf,
        /// Inclusive thread range, e.g. `1..8`.
        #[arg(long, value_parser = parse_sweep)]
        threads_sweep: Option<RangeInclusive<usize>>,
        /// Repetitions per configuration.
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
    /// Cross-check every engine against brute force on all short strings.
    Oracle {
        re_file: PathBuf,
        #[arg(default_value_t = 4)]
        max_len: usize,
    },
}

fn parse_sweep(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let a: usize = a.parse().map_err(|e| format!("{a}: {e}"))?;
    let b: usize = b.trim_start_matches('=').parse().map_err(|e| format!("{b}: {e}"))?;
    if a == 0 || a > b {
        return Err(format!("empty or zero range {s}"));
    }
    Ok(a..=b)
}

struct Exit {
    code: u8,
    msg: String,
}

impl Exit {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Exit { code: 2, msg: format!("{}: {e}", path.display()) }
    }

    fn usage(msg: impl Into<String>) -> Self {
        Exit { code: 3, msg: msg.into() }
    }
}

impl From<ParseError> for Exit {
    fn from(e: ParseError) -> Self {
        Exit { code: 1, msg: e.to_string() }
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Exit> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(|e| Exit::io(path, e))?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| Exit::io(path, e))
}

/// The expression file, minus one trailing line break.
fn load_parser(path: &Path, limit: usize) -> Result<ReParser, Exit> {
    let bytes = read_bytes(path)?;
    let mut src = String::from_utf8(bytes).map_err(|_| Exit::usage(format!("{}: not UTF-8", path.display())))?;
    if src.ends_with('\n') {
        src.pop();
        if src.ends_with('\r') {
            src.pop();
        }
    }
    ReParser::with_options(&src, BuildOptions::with_repeat_limit(limit)).map_err(|e| Exit::usage(e.to_string()))
}

#[derive(Default)]
struct Timing {
    parse: Duration,
    reach: Duration,
    join: Duration,
    build: Duration,
}

impl EngineArgs {
    fn threads(&self) -> usize {
        self.threads.unwrap_or_else(hardware_threads).max(1)
    }

    fn run<'p>(&self, p: &'p ReParser, text: &[u8], threads: usize) -> (Result<Slpf<'p>, ParseError>, Timing) {
        let t0 = Instant::now();
        match self.engine {
            Engine::SerialNfa | Engine::SerialDfa => {
                let r = if self.engine == Engine::SerialNfa { parse_serial_nfa(p, text) } else { parse_serial_dfa(p, text) };
                let d = t0.elapsed();
                (r, Timing { parse: d, build: d, ..Timing::default() })
            }
            Engine::Parallel => {
                let chunks = self.chunks.unwrap_or(threads).max(1);
                let opts = ParallelOptions { chunks, workers: threads, fragments: self.fragments.max(1) };
                let (r, ph) = parse_parallel_timed(p, text, opts);
                let d = t0.elapsed();
                (r, Timing { parse: d, reach: ph.reach, join: ph.join, build: ph.build })
            }
        }
    }

    fn name(&self) -> &'static str {
        match self.engine {
            Engine::SerialNfa => "serial-nfa",
            Engine::SerialDfa => "serial-dfa",
            Engine::Parallel => "parallel",
        }
    }
}

const CSV_HEADER: &str = "engine,threads,chunks,text_bytes,run,parse_ns,reach_ns,join_ns,build_ns";

fn csv_row(e: &EngineArgs, threads: usize, n: usize, run: usize, t: &Timing) -> String {
    let chunks = match e.engine {
        Engine::Parallel => e.chunks.unwrap_or(threads).max(1),
        _ => 1,
    };
    format!(
        "{},{threads},{chunks},{n},{run},{},{},{},{}",
        e.name(),
        t.parse.as_nanos(),
        t.reach.as_nanos(),
        t.join.as_nanos(),
        t.build.as_nanos()
    )
}

fn dump(p: &ReParser, what: Dump, out: &mut impl Write) -> std::io::Result<()> {
    let s = match what {
        Dump::Segments => p.table().dump(p.numbered()),
        Dump::Nfa => p.nfa().dump(p.partition()),
        Dump::Dfa => p.dfa().table.dump(p.partition(), 0, Some(p.dfa().initial)),
        Dump::Medfa => p.medfa().table.dump(p.partition(), p.ell(), p.medfa().dfa_initial),
    };
    out.write_all(s.as_bytes())
}

fn span_line(text: &[u8], start: usize, end: usize) -> String {
    format!("{start}\t{end}\t{}", String::from_utf8_lossy(&text[start..end]))
}

#[allow(clippy::too_many_arguments)]
fn cmd_parse(
    e: &EngineArgs,
    re_file: &Path,
    text_file: Option<&Path>,
    emit: Emit,
    limit: usize,
    what: Option<Dump>,
    output: Option<&Path>,
    out: &mut impl Write,
) -> Result<(), Exit> {
    let p = load_parser(re_file, e.repeat_limit)?;
    let stdout_err = |err| Exit::io(Path::new("<stdout>"), err);
    if let Some(w) = what {
        dump(&p, w, out).map_err(stdout_err)?;
    }
    let Some(text_file) = text_file else {
        return if what.is_some() { Ok(()) } else { Err(Exit::usage("parse needs a text file unless --dump is given")) };
    };
    let text = read_bytes(text_file)?;
    let threads = e.threads();
    let (res, timing) = e.run(&p, &text, threads);
    let s = res?;
    let w = match emit {
        Emit::Count => writeln!(out, "{}", s.count_lsts()),
        Emit::Lsts => s.enumerate_lsts(limit).iter().try_for_each(|t| writeln!(out, "{}", s.render_lst(t))),
        Emit::Matches => {
            let mut r = Ok(());
            for op in p.numbered().ops() {
                for m in s.get_matches(op.number, None).expect("group of this expression") {
                    r = r.and_then(|_| writeln!(out, "g{}\t{}", op.number, span_line(&text, m.start, m.end)));
                }
            }
            r
        }
        Emit::Csv => writeln!(out, "{CSV_HEADER}\n{}", csv_row(e, threads, text.len(), 0, &timing)),
        Emit::Slpf => {
            let bytes = encode(&s, &text).to_bytes();
            match output {
                Some(path) => return std::fs::write(path, bytes).map_err(|err| Exit::io(path, err)),
                None => out.write_all(&bytes),
            }
        }
    };
    w.map_err(stdout_err)
}

/// `g<N>` or `g<N>/g<M>`.
fn parse_query(q: &str) -> Option<(u32, Option<u32>)> {
    let group = |s: &str| s.strip_prefix('g')?.parse::<u32>().ok();
    match q.split_once('/') {
        Some((a, b)) => Some((group(a)?, Some(group(b)?))),
        None => Some((group(q)?, None)),
    }
}

fn cmd_query(e: &EngineArgs, re_file: &Path, text_file: &Path, query: &str, out: &mut impl Write) -> Result<(), Exit> {
    let (g, within) = parse_query(query).ok_or_else(|| Exit::usage(format!("bad query {query:?}, expected g<N> or g<N>/g<M>")))?;
    let p = load_parser(re_file, e.repeat_limit)?;
    let text = read_bytes(text_file)?;
    let s = e.run(&p, &text, e.threads()).0?;
    let spans = s.get_matches(g, within).map_err(|err| Exit::usage(err.to_string()))?;
    for m in spans {
        writeln!(out, "{}", span_line(&text, m.start, m.end)).map_err(|err| Exit::io(Path::new("<stdout>"), err))?;
    }
    Ok(())
}

fn cmd_bench(
    e: &EngineArgs,
    re_file: &Path,
    text_file: &Path,
    sweep: Option<RangeInclusive<usize>>,
    reps: usize,
    out: &mut impl Write,
) -> Result<(), Exit> {
    let p = load_parser(re_file, e.repeat_limit)?;
    let text = read_bytes(text_file)?;
    let sweep = sweep.unwrap_or_else(|| {
        let t = e.threads();
        t..=t
    });
    let mut lines = vec![CSV_HEADER.to_string()];
    for threads in sweep {
        for run in 0..reps {
            let (res, timing) = e.run(&p, &text, threads);
            drop(res);
            lines.push(csv_row(e, threads, text.len(), run, &timing));
        }
    }
    writeln!(out, "{}", lines.join("\n")).map_err(|err| Exit::io(Path::new("<stdout>"), err))
}

fn cmd_oracle(e: &EngineArgs, re_file: &Path, max_len: usize, out: &mut impl Write) -> Result<(), Exit> {
    if max_len > 6 {
        return Err(Exit::usage("the oracle handles strings of length at most 6"));
    }
    let p = load_parser(re_file, e.repeat_limit)?;
    let alphabet = slpf::gen::test_alphabet(&p);
    let rep = match oracle::check_all(&p, &alphabet, max_len, &[1, 2, 3, 5]) {
        Ok(r) => r,
        Err(OracleError::TooMany) => return Err(Exit::usage("too many trees per string for brute force")),
        Err(err) => return Err(Exit { code: 1, msg: format!("{err:?}") }),
    };
    let m = p.medfa_plain();
    let mut text = format!(
        "expression: {}\nnfa: {}\ndfa: {}\nmedfa: {}\nmedfa entries: {}\nstrings: {} (alphabet {:?})\naccepted: {}\n",
        p.source(),
        p.ell(),
        p.dfa().state_count(),
        m.state_count(),
        m.entry_count(),
        rep.strings,
        String::from_utf8_lossy(&alphabet),
        rep.accepted,
    );
    for c in &rep.checks {
        let status = if c.passed { "pass" } else { "FAIL" };
        text.push_str(&format!("{status}\t{}", c.name));
        if let Some(x) = &c.counterexample {
            text.push_str(&format!("\t{x}"));
        }
        text.push('\n');
    }
    for (s, n) in &rep.runs {
        text.push_str(&format!("runs\t{:?}\t{n}\n", String::from_utf8_lossy(s)));
    }
    out.write_all(text.as_bytes()).map_err(|err| Exit::io(Path::new("<stdout>"), err))?;
    if rep.passed() {
        Ok(())
    } else {
        Err(Exit { code: 1, msg: "oracle mismatch".into() })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let e = &cli.engine;
    let r = match cli.cmd {
        Cmd::Parse { re_file, text_file, emit, limit, dump, output } => {
            cmd_parse(e, &re_file, text_file.as_deref(), emit, limit, dump, output.as_deref(), &mut out)
        }
        Cmd::Query { re_file, text_file, query } => cmd_query(e, &re_file, &text_file, &query, &mut out),
        Cmd::Bench { re_file, text_file, threads_sweep, reps } => {
            cmd_bench(e, &re_file, &text_file, threads_sweep, reps, &mut out)
        }
        Cmd::Oracle { re_file, max_len } => cmd_oracle(e, &re_file, max_len, &mut out),
    };
    let flushed = out.flush();
    match r {
        Ok(()) if flushed.is_ok() => ExitCode::SUCCESS,
        Ok(()) => ExitCode::from(2),
        Err(x) => {
            // a reject is an answer, not a diagnostic
            if x.code == 1 {
                println!("{}", x.msg);
            } else {
                eprintln!("regrep: {}", x.msg);
            }
            ExitCode::from(x.code)
        }
    }
}
