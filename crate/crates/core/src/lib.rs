//! Regular expression parsing into shared linear parse forests (SLPF).
//!
//! The expression is numbered, split into segments, and compiled into a
//! parser NFA over segments plus its deterministic variants. A text is
//! parsed into one column of segments per position; every path through the
//! columns spells one linearized syntax tree (LST).

pub mod ast;
pub mod charset;
pub mod error;
pub mod follow;
pub mod gen;
pub mod nfa;
pub mod numbering;
pub mod oracle;
pub mod parallel;
pub mod powerset;
pub mod segments;
pub mod serial;
pub mod slpf;
pub mod stateset;

pub use error::{BuildError, DecodeError, ParseError, QueryError, ReError};
pub use parallel::{parse_parallel, recognize_parallel, ParallelOptions};
pub use serial::{parse_serial_dfa, parse_serial_nfa, recognize_serial};
pub use slpf::Slpf;

use ast::Ast;
use charset::{partition_classes, AlphabetPartition};
use follow::{classic_followers, Followers};
use nfa::{build_nfa, ParserNfa};
use numbering::{number_re, NumberedRe};
use powerset::{build_dfa, build_medfa, merge_dfa_into_medfa, Dfa, MeDfa, DEFAULT_STATE_CAP};
use segments::{compute_segments, SegmentOptions, SegmentTable};

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    pub segments: SegmentOptions,
    /// Bound on the states of each deterministic automaton.
    pub state_cap: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { segments: SegmentOptions::default(), state_cap: DEFAULT_STATE_CAP }
    }
}

impl BuildOptions {
    pub fn with_repeat_limit(limit: usize) -> Self {
        let mut o = Self::default();
        o.segments.repeat_limit = limit;
        o
    }
}

/// Everything compiled from one regular expression.
#[derive(Debug)]
pub struct ReParser {
    source: String,
    ast: Ast,
    nre: NumberedRe,
    fol: Followers,
    part: AlphabetPartition,
    table: SegmentTable,
    nfa: ParserNfa,
    nfa_rev: ParserNfa,
    dfa: Dfa,
    dfa_rev: Dfa,
    medfa_plain: MeDfa,
    medfa: MeDfa,
    medfa_rev: MeDfa,
}

impl ReParser {
    pub fn new(source: &str) -> Result<Self, BuildError> {
        Self::with_options(source, BuildOptions::default())
    }

    pub fn with_options(source: &str, opts: BuildOptions) -> Result<Self, BuildError> {
        let ast = ast::parse_re(source)?;
        let nre = number_re(&ast);
        let fol = classic_followers(&nre);
        let sets: Vec<_> = nre.terminals().iter().map(|t| t.set).collect();
        let part = partition_classes(&sets);
        let table = compute_segments(&nre, &fol, opts.segments)?;
        let nfa = build_nfa(&nre, &table, &part);
        let nfa_rev = nfa.reverse();
        let dfa = build_dfa(&nfa, opts.state_cap)?;
        let dfa_rev = build_dfa(&nfa_rev, opts.state_cap)?;
        let medfa_plain = build_medfa(&nfa, opts.state_cap)?;
        let medfa = merge_dfa_into_medfa(&medfa_plain, &dfa);
        let medfa_rev = merge_dfa_into_medfa(&build_medfa(&nfa_rev, opts.state_cap)?, &dfa_rev);
        Ok(ReParser {
            source: source.to_string(),
            ast,
            nre,
            fol,
            part,
            table,
            nfa,
            nfa_rev,
            dfa,
            dfa_rev,
            medfa_plain,
            medfa,
            medfa_rev,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Ast {
        &self.ast
    }

    pub fn numbered(&self) -> &NumberedRe {
        &self.nre
    }

    pub fn followers(&self) -> &Followers {
        &self.fol
    }

    pub fn partition(&self) -> &AlphabetPartition {
        &self.part
    }

    pub fn classes(&self) -> &[u8; 256] {
        self.part.class_map()
    }

    pub fn table(&self) -> &SegmentTable {
        &self.table
    }

    pub fn nfa(&self) -> &ParserNfa {
        &self.nfa
    }

    pub fn nfa_rev(&self) -> &ParserNfa {
        &self.nfa_rev
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn dfa_rev(&self) -> &Dfa {
        &self.dfa_rev
    }

    /// The multi-entry DFA before the plain DFA is merged in.
    pub fn medfa_plain(&self) -> &MeDfa {
        &self.medfa_plain
    }

    /// Forward multi-entry DFA with the plain DFA merged in.
    pub fn medfa(&self) -> &MeDfa {
        &self.medfa
    }

    /// Reverse multi-entry DFA with the reverse DFA merged in.
    pub fn medfa_rev(&self) -> &MeDfa {
        &self.medfa_rev
    }

    /// Number of segments.
    pub fn ell(&self) -> usize {
        self.table.len()
    }

    pub fn render_segment(&self, id: segments::SegmentId) -> String {
        self.table.render(&self.nre, id)
    }

    pub fn segment_by_rendering(&self, text: &str) -> Option<segments::SegmentId> {
        self.table.by_rendering(&self.nre, text)
    }
}
