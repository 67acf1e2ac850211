use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported construct at offset {offset}: {construct}")]
    Unsupported { offset: usize, construct: String },
}

/// Failures while building the segment table or the automata.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Re(#[from] ReError),
    #[error("segment table exceeds {cap} segments")]
    SegmentExplosion { cap: usize },
    #[error("automaton exceeds {cap} states")]
    StateExplosion { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("reject at offset {offset}")]
    Reject { offset: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown group {0}")]
    UnknownGroup(u32),
    #[error("span {start}..{end} of group {group} is not in this forest")]
    StaleSpan { group: u32, start: usize, end: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("bad magic")]
    BadMagic,
    #[error("truncated input")]
    Truncated,
    #[error("segment table digest does not match")]
    DigestMismatch,
    #[error("text length {found} does not match encoded length {expected}")]
    LengthMismatch { expected: u64, found: u64 },
    #[error("corrupt record at column {0}")]
    Corrupt(usize),
}
