//! Shared linear parse forest: columns `C_0..C_n` of segment sets.

mod compress;
mod encode;
mod query;

pub use compress::{compress_to_dfa, SlpfDfa};
pub use encode::{decode, encode, pair_universe, segment_digest, EncodedSlpf, Record};
pub use query::MatchSpan;

use crate::segments::SegmentId;
use crate::stateset::{bits, is_zero, StateSet};
use crate::ReParser;
use std::fmt;

#[derive(Clone)]
pub struct Slpf<'p> {
    parser: &'p ReParser,
    n: usize,
    words: usize,
    cols: Vec<u64>,
}

/// Number of trees, saturating at `u128::MAX`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LstCount(pub u128);

impl LstCount {
    pub fn is_saturated(&self) -> bool {
        self.0 == u128::MAX
    }
}

impl fmt::Display for LstCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_saturated() {
            write!(f, "{}+", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl<'p> Slpf<'p> {
    /// A forest with `n + 1` empty columns.
    pub fn empty(parser: &'p ReParser, n: usize) -> Self {
        let words = crate::stateset::words_for(parser.ell());
        Slpf { parser, n, words, cols: vec![0; (n + 1) * words] }
    }

    pub fn parser(&self) -> &'p ReParser {
        self.parser
    }

    /// Text length `n`; there are `n + 1` columns.
    pub fn text_len(&self) -> usize {
        self.n
    }

    pub fn words_per_column(&self) -> usize {
        self.words
    }

    pub fn column(&self, r: usize) -> &[u64] {
        &self.cols[r * self.words..(r + 1) * self.words]
    }

    pub fn column_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.cols[r * self.words..(r + 1) * self.words]
    }

    pub fn column_set(&self, r: usize) -> StateSet {
        StateSet::from_words(self.parser.ell(), self.column(r))
    }

    pub fn raw(&self) -> &[u64] {
        &self.cols
    }

    pub fn raw_mut(&mut self) -> &mut [u64] {
        &mut self.cols
    }

    /// Storage in 64-bit words, column data plus the fixed header.
    pub fn memory_words(&self) -> usize {
        self.cols.len() + std::mem::size_of::<Self>().div_ceil(8)
    }

    fn succ(&self, r: usize, rho: usize) -> impl Iterator<Item = usize> + '_ {
        let f = self.parser.table().folseg(rho as SegmentId).words();
        let next = self.column(r + 1);
        f.iter().zip(next).enumerate().flat_map(|(i, (a, b))| {
            let mut x = a & b;
            std::iter::from_fn(move || {
                if x == 0 {
                    return None;
                }
                let t = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(i * 64 + t)
            })
        })
    }

    /// True when every segment lies on a path from `C_0 ⊆ I` to `C_n ⊆ F`.
    pub fn is_clean(&self) -> bool {
        let t = self.parser.table();
        if !self.column_set(0).is_subset(t.initial()) || !self.column_set(self.n).is_subset(t.finals()) {
            return false;
        }
        if self.n == 0 {
            return !is_zero(self.column(0));
        }
        // every node needs a successor (r < n) and a predecessor (r > 0)
        for r in 0..self.n {
            let mut reached = vec![0u64; self.words];
            for rho in bits(self.column(r)) {
                let mut any = false;
                for s in self.succ(r, rho) {
                    reached[s / 64] |= 1 << (s % 64);
                    any = true;
                }
                if !any {
                    return false;
                }
            }
            if reached != self.column(r + 1) {
                return false;
            }
        }
        !is_zero(self.column(0))
    }

    /// Up to `limit` trees in lexicographic order of their segment ids.
    pub fn enumerate_lsts(&self, limit: usize) -> Vec<Vec<SegmentId>> {
        let mut out = Vec::new();
        if limit == 0 {
            return out;
        }
        let mut path: Vec<SegmentId> = Vec::with_capacity(self.n + 1);
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(bits(self.column(0)).collect(), 0)];
        // stack[k] holds the candidates for position k; path holds the
        // choices made at positions 0..stack.len()-1
        while let Some((cands, idx)) = stack.last_mut() {
            if *idx == cands.len() {
                stack.pop();
                path.pop();
                continue;
            }
            let q = cands[*idx];
            *idx += 1;
            let r = stack.len() - 1;
            if r == self.n {
                let mut lst = path.clone();
                lst.push(q as SegmentId);
                out.push(lst);
                if out.len() >= limit {
                    break;
                }
                continue;
            }
            path.push(q as SegmentId);
            stack.push((self.succ(r, q).collect(), 0));
        }
        out
    }

    /// Renders a tree as space-separated symbols without the end mark.
    pub fn render_lst(&self, lst: &[SegmentId]) -> String {
        let nre = self.parser.numbered();
        let t = self.parser.table();
        let syms: Vec<_> = lst
            .iter()
            .flat_map(|&id| t.segment(id).symbols())
            .filter(|&p| p != nre.end_pos())
            .collect();
        nre.render_symbols(&syms)
    }

    pub fn count_lsts(&self) -> LstCount {
        let l = self.parser.ell();
        let mut next = vec![0u128; l];
        for q in bits(self.column(self.n)) {
            next[q] = 1;
        }
        let mut cur = vec![0u128; l];
        for r in (0..self.n).rev() {
            for q in bits(self.column(r)) {
                let mut acc = 0u128;
                for s in self.succ(r, q) {
                    acc = acc.saturating_add(next[s]);
                }
                cur[q] = acc;
            }
            std::mem::swap(&mut cur, &mut next);
            cur.iter_mut().for_each(|x| *x = 0);
        }
        LstCount(bits(self.column(0)).fold(0u128, |a, q| a.saturating_add(next[q])))
    }

    /// Columns as lists of 1-based segment ids, one line per column.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in 0..=self.n {
            let ids: Vec<String> = bits(self.column(r)).map(|i| (i + 1).to_string()).collect();
            out.push_str(&format!("C{r}: {{{}}}\n", ids.join(",")));
        }
        out
    }
}

impl PartialEq for Slpf<'_> {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.cols == o.cols
    }
}

impl fmt::Debug for Slpf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
