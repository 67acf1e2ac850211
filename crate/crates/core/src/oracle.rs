//! Brute-force reference for testing.
//!
//! LSTs are enumerated directly from the numbered expression tree, without
//! followers, segments or automata: every word of the parenthesized language
//! whose terminals spell the text. Iterations that consume nothing are
//! bounded, and trees whose segments repeat a symbol more often than the
//! repeat limit allows are dropped, which is the same bound the segment
//! construction applies.

use crate::numbering::{NTree, Pos, SymbolKind};
use crate::parallel::ParallelOptions;
use crate::segments::{Segment, SegmentId};
use crate::slpf::Slpf;
use crate::stateset::StateSet;
use crate::ReParser;
use std::collections::{BTreeSet, HashMap};

/// Upper bound on partial results kept while expanding one text.
pub const DEFAULT_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    /// Too many partial trees; the instance is too large for brute force.
    TooMany,
    /// A tree contains a segment that is missing from the table.
    MissingSegment(String),
}

struct Walker<'a> {
    nre: &'a crate::numbering::NumberedRe,
    text: &'a [u8],
    empties: usize,
    cap: usize,
    made: usize,
}

type Partial = (Vec<Pos>, usize);

impl Walker<'_> {
    fn bump(&mut self, k: usize) -> Result<(), OracleError> {
        self.made += k;
        if self.made > self.cap {
            Err(OracleError::TooMany)
        } else {
            Ok(())
        }
    }

    fn walk(&mut self, t: &NTree, at: usize) -> Result<Vec<Partial>, OracleError> {
        match t {
            NTree::Sym(p) => {
                let s = self.nre.symbol(*p);
                if s.kind == SymbolKind::Terminal {
                    let set = &self.nre.terminal_of(*p).unwrap().set;
                    match self.text.get(at) {
                        Some(&b) if set.contains(b) => Ok(vec![(vec![*p], at + 1)]),
                        _ => Ok(vec![]),
                    }
                } else if s.kind == SymbolKind::End {
                    Ok(if at == self.text.len() { vec![(vec![*p], at)] } else { vec![] })
                } else {
                    Ok(vec![(vec![*p], at)])
                }
            }
            NTree::Seq(items) => {
                let mut cur: Vec<Partial> = vec![(Vec::new(), at)];
                for it in items {
                    let mut next = Vec::new();
                    for (pre, p) in cur {
                        for (suf, q) in self.walk(it, p)? {
                            let mut w = pre.clone();
                            w.extend(suf);
                            next.push((w, q));
                        }
                    }
                    self.bump(next.len())?;
                    cur = next;
                }
                Ok(cur)
            }
            NTree::Alt(items) => {
                let mut out = Vec::new();
                for it in items {
                    out.extend(self.walk(it, at)?);
                }
                Ok(out)
            }
            NTree::Opt(b) => {
                let mut out = vec![(Vec::new(), at)];
                out.extend(self.walk(b, at)?);
                Ok(out)
            }
            NTree::Star(b) | NTree::Plus(b) => {
                let plus = matches!(t, NTree::Plus(_));
                let mut out = if plus { Vec::new() } else { vec![(Vec::new(), at)] };
                // (word, position, consecutive empty iterations)
                let mut frontier: Vec<(Vec<Pos>, usize, usize)> = vec![(Vec::new(), at, 0)];
                while !frontier.is_empty() {
                    let mut next = Vec::new();
                    for (pre, p, e) in frontier {
                        for (suf, q) in self.walk(b, p)? {
                            let e = if q == p { e + 1 } else { 0 };
                            if e > self.empties {
                                continue;
                            }
                            let mut w = pre.clone();
                            w.extend(suf);
                            out.push((w.clone(), q));
                            next.push((w, q, e));
                        }
                    }
                    self.bump(next.len())?;
                    frontier = next;
                }
                Ok(out)
            }
        }
    }
}

/// Splits an LST after each terminal and the end mark.
pub fn factor(parser: &ReParser, lst: &[Pos]) -> Vec<Segment> {
    let nre = parser.numbered();
    let mut out = Vec::new();
    let mut meta = Vec::new();
    for &p in lst {
        match nre.symbol(p).kind {
            SymbolKind::Terminal | SymbolKind::End => {
                out.push(Segment { meta: std::mem::take(&mut meta), end: p });
            }
            _ => meta.push(p),
        }
    }
    out
}

fn within_limit(seg: &Segment, limit: usize) -> bool {
    let mut seen: HashMap<Pos, usize> = HashMap::new();
    seg.meta.iter().all(|&p| {
        let c = seen.entry(p).or_default();
        *c += 1;
        *c <= limit
    })
}

/// All LSTs of `text` as symbol strings (end mark included), sorted.
pub fn tree_lsts(parser: &ReParser, text: &[u8], cap: usize) -> Result<Vec<Vec<Pos>>, OracleError> {
    let limit = parser.table().repeat_limit();
    let mut w = Walker { nre: parser.numbered(), text, empties: limit + 1, cap, made: 0 };
    let found = w.walk(parser.numbered().tree(), 0)?;
    let set: BTreeSet<Vec<Pos>> = found
        .into_iter()
        .filter(|(_, at)| *at == text.len())
        .map(|(lst, _)| lst)
        .filter(|lst| factor(parser, lst).iter().all(|s| within_limit(s, limit)))
        .collect();
    Ok(set.into_iter().collect())
}

/// The trees of [`tree_lsts`] as segment id sequences, sorted.
pub fn tree_segment_paths(parser: &ReParser, text: &[u8], cap: usize) -> Result<Vec<Vec<SegmentId>>, OracleError> {
    let t = parser.table();
    let mut out = Vec::new();
    for lst in tree_lsts(parser, text, cap)? {
        let mut ids = Vec::new();
        for seg in factor(parser, &lst) {
            let id = t.find(&seg).ok_or_else(|| {
                OracleError::MissingSegment(parser.numbered().render_symbols(&seg.symbols().collect::<Vec<_>>()))
            })?;
            ids.push(id);
        }
        out.push(ids);
    }
    out.sort();
    Ok(out)
}

/// Spans of operator `group` read off the enumerated trees, optionally only
/// occurrences nested inside operator `within`. Sorted, deduplicated.
pub fn tree_matches(
    parser: &ReParser,
    text: &[u8],
    group: u32,
    within: Option<u32>,
) -> Result<Vec<(usize, usize)>, OracleError> {
    let nre = parser.numbered();
    let mut out = BTreeSet::new();
    for lst in tree_lsts(parser, text, DEFAULT_CAP)? {
        let mut at = 0;
        let mut open: Option<usize> = None;
        let mut inside = within.is_none();
        for &p in &lst {
            let s = nre.symbol(p);
            match s.kind {
                SymbolKind::Terminal => at += 1,
                SymbolKind::Open if Some(s.number) == within => inside = true,
                SymbolKind::Close if Some(s.number) == within => inside = false,
                _ => {}
            }
            if s.number == group {
                match s.kind {
                    SymbolKind::Open if inside => open = Some(at),
                    SymbolKind::Close => {
                        if let Some(o) = open.take() {
                            out.insert((o, at));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Accepting runs of the parser NFA by depth-first search, sorted.
pub fn nfa_runs(parser: &ReParser, text: &[u8], cap: usize) -> Result<Vec<Vec<SegmentId>>, OracleError> {
    let nfa = parser.nfa();
    let cls = parser.classes();
    let mut out = Vec::new();
    let mut path: Vec<SegmentId> = Vec::new();
    fn dfs(
        nfa: &crate::nfa::ParserNfa,
        cls: &[u8; 256],
        text: &[u8],
        q: usize,
        path: &mut Vec<SegmentId>,
        out: &mut Vec<Vec<SegmentId>>,
        cap: usize,
    ) -> Result<(), OracleError> {
        path.push(q as SegmentId);
        let r = path.len() - 1;
        if r == text.len() {
            if nfa.finals().contains(q) {
                if out.len() >= cap {
                    return Err(OracleError::TooMany);
                }
                out.push(path.clone());
            }
        } else {
            for s in nfa.delta(q, cls[text[r] as usize]).iter() {
                dfs(nfa, cls, text, s, path, out, cap)?;
            }
        }
        path.pop();
        Ok(())
    }
    for q in nfa.initial().iter() {
        dfs(nfa, cls, text, q, &mut path, &mut out, cap)?;
    }
    out.sort();
    Ok(out)
}

/// Clean columns implied by a set of segment paths.
pub fn columns_of(parser: &ReParser, n: usize, paths: &[Vec<SegmentId>]) -> Vec<StateSet> {
    let mut cols = vec![StateSet::new(parser.ell()); n + 1];
    for p in paths {
        for (r, &q) in p.iter().enumerate() {
            cols[r].insert(q as usize);
        }
    }
    cols
}

/// Segments reachable in the NFA from `q` over `text`, by plain set
/// simulation.
pub fn nfa_reach(parser: &ReParser, q: usize, text: &[u8]) -> StateSet {
    let nfa = parser.nfa();
    let mut cur = StateSet::from_iter(parser.ell(), [q]);
    for &b in text {
        let c = parser.classes()[b as usize];
        let mut next = StateSet::new(parser.ell());
        for p in cur.iter() {
            next.union_with(&nfa.delta(p, c));
        }
        cur = next;
    }
    cur
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub checks: Vec<Check>,
    pub strings: usize,
    pub accepted: usize,
    /// Number of trees per accepted text, in enumeration order.
    pub runs: Vec<(Vec<u8>, usize)>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &'static str, failure: Option<String>) {
        if let Some(c) = self.checks.iter_mut().find(|c| c.name == name) {
            if c.passed && failure.is_some() {
                c.passed = false;
                c.counterexample = failure;
            }
        } else {
            self.checks.push(Check { name, passed: failure.is_none(), counterexample: failure });
        }
    }
}

fn show(text: &[u8]) -> String {
    format!("{:?}", String::from_utf8_lossy(text))
}

fn paths_of(s: &Slpf) -> Vec<Vec<SegmentId>> {
    s.enumerate_lsts(usize::MAX)
}

/// Checks the segment table on its own: usefulness of every segment and the
/// initial/final classification.
pub fn check_table(parser: &ReParser) -> Option<String> {
    let t = parser.table();
    let nre = parser.numbered();
    let l = t.len();
    // forward from I and backward from F over folseg
    let mut fwd = t.initial().clone();
    let mut stack: Vec<usize> = fwd.iter().collect();
    while let Some(q) = stack.pop() {
        for s in t.folseg(q as SegmentId).iter() {
            if !fwd.contains(s) {
                fwd.insert(s);
                stack.push(s);
            }
        }
    }
    let mut bwd = t.finals().clone();
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..l {
            if !bwd.contains(q) && t.folseg(q as SegmentId).intersects(&bwd) {
                bwd.insert(q);
                changed = true;
            }
        }
    }
    for q in 0..l {
        let seg = t.segment(q as SegmentId);
        if !fwd.contains(q) || !bwd.contains(q) {
            return Some(format!("useless segment {}", parser.render_segment(q as SegmentId)));
        }
        if t.initial().contains(q) != (seg.first() == nre.root_open()) {
            return Some(format!("initial flag of {}", parser.render_segment(q as SegmentId)));
        }
        if t.finals().contains(q) != (seg.end == nre.end_pos()) {
            return Some(format!("final flag of {}", parser.render_segment(q as SegmentId)));
        }
    }
    None
}

/// Cross-checks every engine against the brute-force trees on all strings
/// over `alphabet` up to `max_len`.
pub fn check_all(parser: &ReParser, alphabet: &[u8], max_len: usize, chunks: &[usize]) -> Result<Report, OracleError> {
    let mut rep = Report::default();
    rep.record("segment table", check_table(parser));
    let mats = crate::serial::ConnectionMatrices::new(parser);
    for text in crate::gen::all_strings(alphabet, max_len) {
        rep.strings += 1;
        let expect = tree_segment_paths(parser, &text, DEFAULT_CAP);
        let expect = match expect {
            Err(OracleError::MissingSegment(s)) => {
                rep.record("segment factorization", Some(format!("{} needs {s}", show(&text))));
                continue;
            }
            Err(e) => return Err(e),
            Ok(p) => p,
        };
        rep.record("segment factorization", None);
        let t = parser.table();
        let adj = expect.iter().all(|p| {
            t.initial().contains(p[0] as usize)
                && t.finals().contains(*p.last().unwrap() as usize)
                && p.windows(2).all(|w| t.folseg(w[0]).contains(w[1] as usize))
        });
        rep.record("folseg adjacency", (!adj).then(|| show(&text)));

        let runs = nfa_runs(parser, &text, DEFAULT_CAP)?;
        rep.record("nfa runs", (runs != expect).then(|| format!("{}: {} runs vs {} trees", show(&text), runs.len(), expect.len())));

        let accepted = !expect.is_empty();
        if accepted {
            rep.accepted += 1;
            rep.runs.push((text.clone(), expect.len()));
        }
        let cols = columns_of(parser, text.len(), &expect);
        let mut engines: Vec<(&'static str, Result<Slpf, crate::ParseError>)> = vec![
            ("serial-nfa", crate::serial::parse_serial_nfa_with(parser, &mats, &text)),
            ("serial-dfa", crate::parse_serial_dfa(parser, &text)),
        ];
        for &c in chunks {
            engines.push(("parallel", crate::parse_parallel(parser, &text, ParallelOptions::new(c, 2))));
        }
        for (name, res) in engines {
            let bad = match res {
                Err(_) if !accepted => None,
                Err(e) => Some(format!("{name} rejects {} ({e})", show(&text))),
                Ok(_) if !accepted => Some(format!("{name} accepts {}", show(&text))),
                Ok(s) => {
                    let got: Vec<StateSet> = (0..=text.len()).map(|r| s.column_set(r)).collect();
                    if got != cols {
                        Some(format!("{name} columns on {}", show(&text)))
                    } else if paths_of(&s) != expect {
                        Some(format!("{name} trees on {}", show(&text)))
                    } else if s.count_lsts().0 != expect.len() as u128 {
                        Some(format!("{name} count on {}", show(&text)))
                    } else if !s.is_clean() {
                        Some(format!("{name} not clean on {}", show(&text)))
                    } else {
                        None
                    }
                }
            };
            rep.record(name, bad);
        }
        let rec = crate::recognize_serial(parser, &text);
        let recp = crate::recognize_parallel(parser, &text, ParallelOptions::new(2, 2));
        rep.record("recognizers", (rec != accepted || recp != accepted).then(|| show(&text)));
    }
    Ok(rep)
}
