//! Match extraction: text spans enclosed by the parentheses of an operator
//! on at least one forest path.

use super::Slpf;
use crate::error::QueryError;
use crate::numbering::Pos;
use crate::segments::SegmentId;
use crate::stateset::{bits, is_zero, or_into};
use std::collections::BTreeSet;

/// Half-open byte span `[start, end)` matched by operator `group`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchSpan {
    pub start: usize,
    pub end: usize,
    pub group: u32,
}

impl<'p> Slpf<'p> {
    fn meta(&self, q: usize) -> &[Pos] {
        &self.parser.table().segment(q as SegmentId).meta
    }

    fn parens(&self, group: u32) -> Result<(Pos, Pos), QueryError> {
        let op = self.parser.numbered().op(group).ok_or(QueryError::UnknownGroup(group))?;
        Ok((op.open, op.close))
    }

    /// Followers of the segments in `from` (column `r`) that lie in column `r + 1`
    /// and are allowed by `mask`.
    fn step_set(&self, r: usize, from: &[u64], mask: &[u64]) -> Vec<u64> {
        let t = self.parser.table();
        let mut out = vec![0u64; self.words];
        for q in bits(from) {
            or_into(&mut out, t.folseg(q as SegmentId).words());
        }
        for ((o, c), m) in out.iter_mut().zip(self.column(r + 1)).zip(mask) {
            *o &= c & m;
        }
        out
    }

    /// Segments per column reachable from `C_0` with operator `m` open
    /// (index 1) or closed (index 0) at the segment's start.
    fn within_states(&self, m: (Pos, Pos)) -> Vec<[Vec<u64>; 2]> {
        let w = self.words;
        let t = self.parser.table();
        let mut out = Vec::with_capacity(self.n + 1);
        out.push([self.column(0).to_vec(), vec![0u64; w]]);
        for r in 0..self.n {
            let mut next = [vec![0u64; w], vec![0u64; w]];
            for (state, set) in out[r].iter().enumerate() {
                for q in bits(set) {
                    let mut open = state == 1;
                    for &p in self.meta(q) {
                        if p == m.0 {
                            open = true;
                        } else if p == m.1 {
                            open = false;
                        }
                    }
                    or_into(&mut next[open as usize], t.folseg(q as SegmentId).words());
                }
            }
            for half in next.iter_mut() {
                for (x, c) in half.iter_mut().zip(self.column(r + 1)) {
                    *x &= c;
                }
            }
            out.push(next);
        }
        out
    }

    /// All spans of operator `group`, optionally only those nested inside an
    /// occurrence of operator `within` on the same path. Sorted, deduplicated.
    pub fn get_matches(&self, group: u32, within: Option<u32>) -> Result<Vec<MatchSpan>, QueryError> {
        let g = self.parens(group)?;
        let m = within.map(|w| self.parens(w)).transpose()?;
        let mstates = m.map(|m| self.within_states(m));
        let full = vec![u64::MAX; self.words];
        let mut spans: BTreeSet<(usize, usize)> = BTreeSet::new();

        for r in 0..=self.n {
            let mut seeds = vec![0u64; self.words];
            for q in bits(self.column(r)) {
                let starts: &[bool] = match &mstates {
                    None => &[false],
                    Some(ms) => match (test(&ms[r][0], q), test(&ms[r][1], q)) {
                        (true, true) => &[false, true],
                        (true, false) => &[false],
                        (false, true) => &[true],
                        (false, false) => &[],
                    },
                };
                for &m_open in starts {
                    let mut m_open = m_open;
                    let mut g_open = false;
                    for &p in self.meta(q) {
                        if let Some(m) = m {
                            if p == m.0 {
                                m_open = true;
                            } else if p == m.1 {
                                m_open = false;
                            }
                        }
                        if p == g.0 && (m.is_none() || m_open) {
                            g_open = true;
                        } else if p == g.1 && g_open {
                            spans.insert((r, r));
                            g_open = false;
                        }
                    }
                    if g_open {
                        seeds[q / 64] |= 1 << (q % 64);
                    }
                }
            }
            if is_zero(&seeds) {
                continue;
            }
            let mut front = seeds;
            let mut r2 = r;
            while r2 < self.n && !is_zero(&front) {
                let next = self.step_set(r2, &front, &full);
                r2 += 1;
                let mut carry = vec![0u64; self.words];
                for q in bits(&next) {
                    if self.meta(q).contains(&g.1) {
                        spans.insert((r, r2));
                    } else {
                        carry[q / 64] |= 1 << (q % 64);
                    }
                }
                front = carry;
            }
        }
        Ok(spans.into_iter().map(|(start, end)| MatchSpan { start, end, group }).collect())
    }

    /// Spans of the operators directly nested in one occurrence of `span`.
    pub fn get_children(&self, span: MatchSpan) -> Result<Vec<MatchSpan>, QueryError> {
        let g = self.parens(span.group)?;
        let stale = QueryError::StaleSpan { group: span.group, start: span.start, end: span.end };
        let (s, e) = (span.start, span.end);
        if s > e || e > self.n {
            return Err(stale);
        }
        let nre = self.parser.numbered();
        let kids: Vec<(u32, Pos, Pos)> = nre
            .op(span.group)
            .unwrap()
            .children
            .iter()
            .map(|&c| {
                let o = nre.op(c).unwrap();
                (c, o.open, o.close)
            })
            .collect();
        let mut found: BTreeSet<MatchSpan> = BTreeSet::new();
        let mut present = false;

        // occurrences opened and closed inside one segment
        if s == e {
            for q in bits(self.column(s)) {
                let meta = self.meta(q);
                let mut open_at = None;
                for (i, &p) in meta.iter().enumerate() {
                    if p == g.0 {
                        open_at = Some(i);
                    } else if p == g.1 {
                        if let Some(o) = open_at.take() {
                            present = true;
                            for k in &kids {
                                if meta[o..i].contains(&k.1) {
                                    found.insert(MatchSpan { start: s, end: s, group: k.0 });
                                }
                            }
                        }
                    }
                }
            }
            if !present {
                return Err(stale);
            }
            return Ok(found.into_iter().collect());
        }

        // forward: segments on paths where g was opened at column s
        let w = self.words;
        let full = vec![u64::MAX; w];
        let mut inside: Vec<Vec<u64>> = Vec::with_capacity(e - s + 1);
        let mut seeds = vec![0u64; w];
        for q in bits(self.column(s)) {
            let mut open = false;
            for &p in self.meta(q) {
                if p == g.0 {
                    open = true;
                } else if p == g.1 {
                    open = false;
                }
            }
            if open {
                seeds[q / 64] |= 1 << (q % 64);
            }
        }
        inside.push(seeds);
        let mut closing = vec![0u64; w];
        for r in s..e {
            let next = self.step_set(r, &inside[r - s], &full);
            let mut carry = vec![0u64; w];
            for q in bits(&next) {
                let closes = self.meta(q).contains(&g.1);
                if r + 1 == e {
                    if closes {
                        closing[q / 64] |= 1 << (q % 64);
                    }
                } else if !closes {
                    carry[q / 64] |= 1 << (q % 64);
                }
            }
            inside.push(if r + 1 == e { closing.clone() } else { carry });
        }
        if is_zero(&closing) {
            return Err(stale);
        }
        // backward: keep the nodes that reach a closing segment at column e
        let t = self.parser.table();
        for r in (s..e).rev() {
            let later = inside[r + 1 - s].clone();
            let cur = &mut inside[r - s];
            for q in bits(&cur.clone()) {
                let f = t.folseg(q as SegmentId).words();
                if !f.iter().zip(&later).any(|(a, b)| a & b != 0) {
                    cur[q / 64] &= !(1 << (q % 64));
                }
            }
        }
        // the part of each segment's meta-prefix that lies inside g
        let window = |r: usize, q: usize| -> &[Pos] {
            let meta = self.meta(q);
            let lo = if r == s { meta.iter().rposition(|&p| p == g.0).map_or(0, |i| i + 1) } else { 0 };
            let hi = if r == e { meta.iter().position(|&p| p == g.1).unwrap_or(meta.len()) } else { meta.len() };
            &meta[lo..hi.max(lo)]
        };
        for k in &kids {
            for r in s..=e {
                let mut seeds = vec![0u64; w];
                for q in bits(&inside[r - s]) {
                    let win = window(r, q);
                    let mut open = false;
                    for &p in win {
                        if p == k.1 {
                            open = true;
                        } else if p == k.2 && open {
                            found.insert(MatchSpan { start: r, end: r, group: k.0 });
                            open = false;
                        }
                    }
                    if open {
                        seeds[q / 64] |= 1 << (q % 64);
                    }
                }
                let mut front = seeds;
                let mut r2 = r;
                while r2 < e && !is_zero(&front) {
                    let next = self.step_set(r2, &front, &inside[r2 + 1 - s]);
                    r2 += 1;
                    let mut carry = vec![0u64; w];
                    for q in bits(&next) {
                        if window(r2, q).contains(&k.2) {
                            found.insert(MatchSpan { start: r, end: r2, group: k.0 });
                        } else {
                            carry[q / 64] |= 1 << (q % 64);
                        }
                    }
                    front = carry;
                }
            }
        }
        Ok(found.into_iter().collect())
    }
}

fn test(w: &[u64], q: usize) -> bool {
    w[q / 64] >> (q % 64) & 1 == 1
}
