//! Compact column encoding. Column `r > 0` is stored as a bit string over the
//! sorted list of (end-letter, follower) pairs that column `r - 1` and the
//! byte `x_r` allow; bit `i` is set when the follower of pair `i` is kept.
//! `C_0` is a bit string over the sorted initial segments. Strings of at most
//! 64 bits are stored inline, longer ones in a deduplicated side table.
//!
//! File layout (little endian): `SLPF1`, ℓ as u32, n as u64, a 32-byte
//! SHA-256 digest of the segment table, `n + 1` records (tag 0 + u64 inline
//! code, or tag 1 + u32 side-table index), then the side table: u32 entry
//! count and per entry a u32 word count followed by the words.

use super::Slpf;
use crate::error::DecodeError;
use crate::numbering::Pos;
use crate::segments::SegmentId;
use crate::stateset::{bits, test_bit};
use crate::ReParser;
use sha2::{Digest, Sha256};
use std::collections::HashMap;

const MAGIC: &[u8; 5] = b"SLPF1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Record {
    Inline(u64),
    Wide(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedSlpf {
    pub ell: u32,
    pub n: u64,
    pub digest: [u8; 32],
    pub records: Vec<Record>,
    pub wide: Vec<Vec<u64>>,
}

/// Digest of the segment table and follower relation.
pub fn segment_digest(parser: &ReParser) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(parser.numbered().to_string().as_bytes());
    h.update(b"\n");
    h.update(parser.table().dump(parser.numbered()).as_bytes());
    h.finalize().into()
}

/// Sorted `(end-letter, follower)` pairs allowed after column `prev` on a
/// byte of class `class`.
pub fn pair_universe(parser: &ReParser, prev: &[u64], class: u8) -> Vec<(Pos, SegmentId)> {
    let t = parser.table();
    let nfa = parser.nfa();
    let mut ends: Vec<(Pos, SegmentId)> = bits(prev)
        .filter(|&q| nfa.by_class(class).contains(q))
        .map(|q| (t.segment(q as SegmentId).end, q as SegmentId))
        .collect();
    ends.sort_unstable();
    ends.dedup_by_key(|e| e.0);
    let mut out = Vec::new();
    for (end, rep) in ends {
        for s in t.folseg(rep).iter() {
            out.push((end, s as SegmentId));
        }
    }
    out
}

struct Coder {
    wide: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, u32>,
}

impl Coder {
    fn put(&mut self, code: Vec<u64>, len: usize) -> Record {
        if len <= 64 {
            return Record::Inline(code.first().copied().unwrap_or(0));
        }
        let next = self.wide.len() as u32;
        let id = *self.index.entry(code.clone()).or_insert(next);
        if id == next {
            self.wide.push(code);
        }
        Record::Wide(id)
    }
}

fn code_bits(rec: Record, wide: &[Vec<u64>], len: usize, col: usize) -> Result<Vec<u64>, DecodeError> {
    let words = len.div_ceil(64).max(1);
    match rec {
        Record::Inline(v) if len <= 64 => Ok(vec![v]),
        Record::Wide(i) if len > 64 => {
            let w = wide.get(i as usize).ok_or(DecodeError::Corrupt(col))?;
            if w.len() != words {
                return Err(DecodeError::Corrupt(col));
            }
            Ok(w.clone())
        }
        _ => Err(DecodeError::Corrupt(col)),
    }
}

pub fn encode(slpf: &Slpf, text: &[u8]) -> EncodedSlpf {
    let parser = slpf.parser();
    let classes = parser.classes();
    let mut coder = Coder { wide: Vec::new(), index: HashMap::new() };
    let mut records = Vec::with_capacity(slpf.text_len() + 1);

    let init: Vec<usize> = parser.table().initial().iter().collect();
    let mut code = vec![0u64; init.len().div_ceil(64).max(1)];
    for (i, &q) in init.iter().enumerate() {
        if test_bit(slpf.column(0), q) {
            code[i / 64] |= 1 << (i % 64);
        }
    }
    records.push(coder.put(code, init.len()));

    for r in 1..=slpf.text_len() {
        let pairs = pair_universe(parser, slpf.column(r - 1), classes[text[r - 1] as usize]);
        let col = slpf.column(r);
        let mut code = vec![0u64; pairs.len().div_ceil(64).max(1)];
        for (i, &(_, s)) in pairs.iter().enumerate() {
            if test_bit(col, s as usize) {
                code[i / 64] |= 1 << (i % 64);
            }
        }
        records.push(coder.put(code, pairs.len()));
    }
    EncodedSlpf {
        ell: parser.ell() as u32,
        n: slpf.text_len() as u64,
        digest: segment_digest(parser),
        records,
        wide: coder.wide,
    }
}

pub fn decode<'p>(enc: &EncodedSlpf, parser: &'p ReParser, text: &[u8]) -> Result<Slpf<'p>, DecodeError> {
    if enc.digest != segment_digest(parser) || enc.ell as usize != parser.ell() {
        return Err(DecodeError::DigestMismatch);
    }
    if enc.n != text.len() as u64 {
        return Err(DecodeError::LengthMismatch { expected: enc.n, found: text.len() as u64 });
    }
    if enc.records.len() != text.len() + 1 {
        return Err(DecodeError::Truncated);
    }
    let classes = parser.classes();
    let mut slpf = Slpf::empty(parser, text.len());

    let init: Vec<usize> = parser.table().initial().iter().collect();
    let c0 = code_bits(enc.records[0], &enc.wide, init.len(), 0)?;
    for (i, &q) in init.iter().enumerate() {
        if test_bit(&c0, i) {
            slpf.column_mut(0)[q / 64] |= 1 << (q % 64);
        }
    }
    for r in 1..=text.len() {
        let pairs = pair_universe(parser, slpf.column(r - 1), classes[text[r - 1] as usize]);
        let code = code_bits(enc.records[r], &enc.wide, pairs.len(), r)?;
        let col = slpf.column_mut(r);
        for (i, &(_, s)) in pairs.iter().enumerate() {
            if test_bit(&code, i) {
                col[s as usize / 64] |= 1 << (s % 64);
            }
        }
    }
    Ok(slpf)
}

impl EncodedSlpf {
    /// Storage in 64-bit words (records count one word each).
    pub fn memory_words(&self) -> usize {
        self.records.len() + self.wide.iter().map(|w| w.len()).sum::<usize>()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(49 + self.records.len() * 9);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&self.ell.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.digest);
        for r in &self.records {
            match *r {
                Record::Inline(v) => {
                    out.push(0);
                    out.extend_from_slice(&v.to_le_bytes());
                }
                Record::Wide(i) => {
                    out.push(1);
                    out.extend_from_slice(&i.to_le_bytes());
                }
            }
        }
        out.extend_from_slice(&(self.wide.len() as u32).to_le_bytes());
        for w in &self.wide {
            out.extend_from_slice(&(w.len() as u32).to_le_bytes());
            for x in w {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut rd = Reader { b: bytes, pos: 0 };
        if rd.take(5)? != MAGIC {
            return Err(DecodeError::BadMagic);
        }
        let ell = rd.u32()?;
        let n = rd.u64()?;
        let digest: [u8; 32] = rd.take(32)?.try_into().unwrap();
        let count = usize::try_from(n).ok().and_then(|n| n.checked_add(1)).ok_or(DecodeError::Truncated)?;
        if count > bytes.len() {
            return Err(DecodeError::Truncated);
        }
        let mut records = Vec::with_capacity(count);
        for col in 0..count {
            records.push(match rd.take(1)?[0] {
                0 => Record::Inline(rd.u64()?),
                1 => Record::Wide(rd.u32()?),
                _ => return Err(DecodeError::Corrupt(col)),
            });
        }
        let entries = rd.u32()? as usize;
        let mut wide = Vec::new();
        for _ in 0..entries {
            let len = rd.u32()? as usize;
            if len > bytes.len() / 8 {
                return Err(DecodeError::Truncated);
            }
            let mut w = Vec::with_capacity(len);
            for _ in 0..len {
                w.push(rd.u64()?);
            }
            wide.push(w);
        }
        Ok(EncodedSlpf { ell, n, digest, records, wide })
    }
}

struct Reader<'a> {
    b: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], DecodeError> {
        let s = self.b.get(self.pos..self.pos + k).ok_or(DecodeError::Truncated)?;
        self.pos += k;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, DecodeError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}
