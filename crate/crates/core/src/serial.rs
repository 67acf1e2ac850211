//! Serial parsers: a forward pass computes the accessible segments of every
//! column, a backward pass intersects them with the co-accessible ones.

use crate::error::ParseError;
use crate::powerset::{PowersetTable, StateId, DEAD};
use crate::slpf::Slpf;
use crate::stateset::{and_into, bits, is_zero, or_into, StateSet};
use crate::ReParser;

/// One ℓ×ℓ Boolean matrix per byte class, stored by source column, for both
/// directions.
#[derive(Clone, Debug)]
pub struct ConnectionMatrices {
    words: usize,
    ell: usize,
    fwd: Vec<Vec<u64>>,
    bwd: Vec<Vec<u64>>,
}

impl ConnectionMatrices {
    pub fn new(parser: &ReParser) -> Self {
        let (nfa, rev) = (parser.nfa(), parser.nfa_rev());
        let w = nfa.words();
        let l = nfa.len();
        let build = |n: &crate::nfa::ParserNfa| {
            (0..n.nclasses() as u8)
                .map(|c| {
                    let mut m = vec![0u64; l * w];
                    for q in 0..l {
                        m[q * w..(q + 1) * w].copy_from_slice(n.delta(q, c).words());
                    }
                    m
                })
                .collect::<Vec<_>>()
        };
        ConnectionMatrices { words: w, ell: l, fwd: build(nfa), bwd: build(rev) }
    }

    /// Column `q` of the forward matrix for `class`.
    pub fn forward(&self, class: u8, q: usize) -> &[u64] {
        &self.fwd[class as usize][q * self.words..(q + 1) * self.words]
    }

    pub fn backward(&self, class: u8, q: usize) -> &[u64] {
        &self.bwd[class as usize][q * self.words..(q + 1) * self.words]
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    fn apply(m: &[u64], w: usize, from: &[u64], out: &mut [u64]) {
        out.iter_mut().for_each(|x| *x = 0);
        for q in bits(from) {
            or_into(out, &m[q * w..(q + 1) * w]);
        }
    }
}

/// Forward columns of the NFA simulation, stopping after the first empty one.
pub fn forward_columns(parser: &ReParser, text: &[u8]) -> Vec<StateSet> {
    let nfa = parser.nfa();
    let cls = parser.classes();
    let mut cols = vec![nfa.initial().clone()];
    for &b in text {
        let next = nfa.step(cols.last().unwrap(), cls[b as usize]);
        let dead = next.is_empty();
        cols.push(next);
        if dead {
            break;
        }
    }
    cols
}

/// Parses with the connection matrices (NFA simulation).
pub fn parse_serial_nfa<'p>(parser: &'p ReParser, text: &[u8]) -> Result<Slpf<'p>, ParseError> {
    let mats = ConnectionMatrices::new(parser);
    parse_serial_nfa_with(parser, &mats, text)
}

pub fn parse_serial_nfa_with<'p>(
    parser: &'p ReParser,
    mats: &ConnectionMatrices,
    text: &[u8],
) -> Result<Slpf<'p>, ParseError> {
    let n = text.len();
    let w = mats.words;
    let cls = parser.classes();
    let mut slpf = Slpf::empty(parser, n);
    let cols = slpf.raw_mut();
    cols[..w].copy_from_slice(parser.table().initial().words());
    for r in 1..=n {
        let (done, rest) = cols.split_at_mut(r * w);
        let c = cls[text[r - 1] as usize];
        ConnectionMatrices::apply(&mats.fwd[c as usize], w, &done[(r - 1) * w..], &mut rest[..w]);
        if is_zero(&rest[..w]) {
            return Err(ParseError::Reject { offset: r });
        }
    }
    and_into(&mut cols[n * w..], parser.table().finals().words());
    if is_zero(&cols[n * w..]) {
        return Err(ParseError::Reject { offset: n });
    }
    let mut tmp = vec![0u64; w];
    for r in (0..n).rev() {
        let c = cls[text[r] as usize];
        ConnectionMatrices::apply(&mats.bwd[c as usize], w, &cols[(r + 1) * w..(r + 2) * w], &mut tmp);
        and_into(&mut cols[r * w..(r + 1) * w], &tmp);
    }
    Ok(slpf)
}

/// Forward DFA pass over `text[start..end]` from state `from`, writing
/// columns `start + 1..=end` into `out` (`out` begins at column `start + 1`).
/// Returns the last state, or the offset of the first empty column.
#[inline]
pub(crate) fn forward_pass(
    fwd: &PowersetTable,
    cls: &[u8; 256],
    text: &[u8],
    start: usize,
    from: StateId,
    out: &mut [u64],
) -> Result<StateId, usize> {
    let w = fwd.words();
    let mut s = from;
    for (i, (&b, col)) in text.iter().zip(out.chunks_exact_mut(w)).enumerate() {
        s = fwd.next(s, cls[b as usize]);
        if s == DEAD {
            return Err(start + i + 1);
        }
        col.copy_from_slice(fwd.set(s));
    }
    Ok(s)
}

/// Backward pass: intersects columns `start + 1..=end` in `out` (laid out as
/// in [`forward_pass`]) with the reverse DFA run started at column `end`.
/// Returns the reverse state at column `start`.
#[inline]
pub(crate) fn backward_pass(
    bwd: &PowersetTable,
    cls: &[u8; 256],
    text: &[u8],
    from: StateId,
    out: &mut [u64],
) -> StateId {
    let w = bwd.words();
    let mut s = from;
    for (&b, col) in text.iter().rev().zip(out.chunks_exact_mut(w).rev()) {
        and_into(col, bwd.set(s));
        s = bwd.next(s, cls[b as usize]);
    }
    s
}

/// Parses with the DFA and the reverse DFA.
pub fn parse_serial_dfa<'p>(parser: &'p ReParser, text: &[u8]) -> Result<Slpf<'p>, ParseError> {
    let n = text.len();
    let (dfa, rev) = (parser.dfa(), parser.dfa_rev());
    let w = dfa.table.words();
    let cls = parser.classes();
    let mut slpf = Slpf::empty(parser, n);
    let (c0, rest) = slpf.raw_mut().split_at_mut(w);
    c0.copy_from_slice(dfa.table.set(dfa.initial));
    let last = forward_pass(&dfa.table, cls, text, 0, dfa.initial, rest).map_err(|offset| ParseError::Reject { offset })?;
    if !dfa.table.is_final(last) {
        return Err(ParseError::Reject { offset: n });
    }
    let at0 = backward_pass(&rev.table, cls, text, rev.initial, rest);
    and_into(c0, rev.table.set(at0));
    Ok(slpf)
}

/// Acceptance only, with one forward DFA run.
pub fn recognize_serial(parser: &ReParser, text: &[u8]) -> bool {
    let dfa = parser.dfa();
    let s = dfa.run(dfa.initial, text, parser.classes());
    s != DEAD && dfa.table.is_final(s)
}
