//! Byte sets and the partition of the byte alphabet into classes.

use std::fmt;

/// A set of byte values.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ByteSet([u64; 4]);

impl ByteSet {
    pub const fn empty() -> Self {
        ByteSet([0; 4])
    }

    pub const fn full() -> Self {
        ByteSet([u64::MAX; 4])
    }

    pub fn single(b: u8) -> Self {
        let mut s = Self::empty();
        s.insert(b);
        s
    }

    pub fn range(lo: u8, hi: u8) -> Self {
        let mut s = Self::empty();
        for b in lo..=hi {
            s.insert(b);
        }
        s
    }

    pub fn insert(&mut self, b: u8) {
        self.0[(b >> 6) as usize] |= 1 << (b & 63);
    }

    pub fn contains(&self, b: u8) -> bool {
        self.0[(b >> 6) as usize] >> (b & 63) & 1 == 1
    }

    pub fn union(&self, o: &ByteSet) -> ByteSet {
        let mut r = *self;
        for i in 0..4 {
            r.0[i] |= o.0[i];
        }
        r
    }

    pub fn intersect(&self, o: &ByteSet) -> ByteSet {
        let mut r = *self;
        for i in 0..4 {
            r.0[i] &= o.0[i];
        }
        r
    }

    pub fn complement(&self) -> ByteSet {
        ByteSet([!self.0[0], !self.0[1], !self.0[2], !self.0[3]])
    }

    pub fn is_empty(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn min(&self) -> Option<u8> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&b| self.contains(b))
    }

    /// Maximal runs of consecutive bytes, ascending.
    pub fn ranges(&self) -> Vec<(u8, u8)> {
        let mut out: Vec<(u8, u8)> = Vec::new();
        for b in self.iter() {
            match out.last_mut() {
                Some((_, hi)) if *hi as u16 + 1 == b as u16 => *hi = b,
                _ => out.push((b, b)),
            }
        }
        out
    }
}

pub(crate) fn fmt_byte(b: u8, in_class: bool) -> String {
    let special: &[u8] = if in_class {
        b"\\]^-["
    } else {
        b"\\.[]()|*+?{}^$"
    };
    match b {
        b'\n' => "\\n".into(),
        b'\t' => "\\t".into(),
        b'\r' => "\\r".into(),
        _ if special.contains(&b) => format!("\\{}", b as char),
        0x21..=0x7e => (b as char).to_string(),
        _ => format!("\\x{:02x}", b),
    }
}

impl fmt::Debug for ByteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (lo, hi) in self.ranges() {
            if lo == hi {
                write!(f, "{}", fmt_byte(lo, true))?;
            } else {
                write!(f, "{}-{}", fmt_byte(lo, true), fmt_byte(hi, true))?;
            }
        }
        write!(f, "]")
    }
}

/// Partition of the 256 byte values into disjoint classes such that every
/// input set is a union of classes.
#[derive(Clone, Debug)]
pub struct AlphabetPartition {
    class_of: [u8; 256],
    classes: Vec<ByteSet>,
    /// For each input set, the classes it is made of.
    members: Vec<Vec<u8>>,
    /// Class holding the bytes no input set mentions, if any.
    unmatched: Option<u8>,
}

impl AlphabetPartition {
    pub fn class_of(&self, b: u8) -> u8 {
        self.class_of[b as usize]
    }

    pub fn class_map(&self) -> &[u8; 256] {
        &self.class_of
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class(&self, c: u8) -> &ByteSet {
        &self.classes[c as usize]
    }

    pub fn classes(&self) -> &[ByteSet] {
        &self.classes
    }

    /// Classes covering input set `i`.
    pub fn members(&self, i: usize) -> &[u8] {
        &self.members[i]
    }

    pub fn unmatched(&self) -> Option<u8> {
        self.unmatched
    }

    /// Classes touched by at least one input set.
    pub fn matched_classes(&self) -> Vec<ByteSet> {
        (0..self.classes.len() as u8)
            .filter(|&c| Some(c) != self.unmatched)
            .map(|c| self.classes[c as usize])
            .collect()
    }

    /// One representative byte per class, in class order.
    pub fn representatives(&self) -> Vec<u8> {
        self.classes.iter().map(|c| c.min().unwrap()).collect()
    }
}

/// Splits the byte alphabet into classes refined by `sets`. Classes are
/// numbered by their smallest byte.
pub fn partition_classes(sets: &[ByteSet]) -> AlphabetPartition {
    let words = sets.len().div_ceil(64).max(1);
    let mut sig_of: Vec<Vec<u64>> = Vec::with_capacity(256);
    for b in 0..=255u8 {
        let mut sig = vec![0u64; words];
        for (i, s) in sets.iter().enumerate() {
            if s.contains(b) {
                sig[i / 64] |= 1 << (i % 64);
            }
        }
        sig_of.push(sig);
    }
    // matched bytes form classes of consecutive bytes with equal membership;
    // bytes no set mentions share one class
    let mut unmatched: Option<u8> = None;
    let mut classes: Vec<ByteSet> = Vec::new();
    let mut class_of = [0u8; 256];
    for b in 0..=255u8 {
        let sig = &sig_of[b as usize];
        let id = if sig.iter().all(|&w| w == 0) {
            *unmatched.get_or_insert_with(|| {
                classes.push(ByteSet::empty());
                (classes.len() - 1) as u8
            })
        } else if b > 0 && sig_of[b as usize - 1] == *sig {
            class_of[b as usize - 1]
        } else {
            classes.push(ByteSet::empty());
            (classes.len() - 1) as u8
        };
        classes[id as usize].insert(b);
        class_of[b as usize] = id;
    }
    let members = sets
        .iter()
        .map(|s| {
            let mut m: Vec<u8> = s.iter().map(|b| class_of[b as usize]).collect();
            m.sort_unstable();
            m.dedup();
            m
        })
        .collect();
    AlphabetPartition {
        class_of,
        classes,
        members,
        unmatched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cls(lo: u8, hi: u8) -> ByteSet {
        ByteSet::range(lo, hi)
    }

    #[test]
    fn overlapping_ranges_split() {
        let p = partition_classes(&[cls(b'a', b'e'), cls(b'd', b'g')]);
        assert_eq!(
            p.matched_classes(),
            vec![cls(b'a', b'c'), cls(b'd', b'e'), cls(b'f', b'g')]
        );
        assert_eq!(p.members(0).len(), 2);
        assert_eq!(p.members(1).len(), 2);
    }

    #[test]
    fn nested_range_splits_outer() {
        let p = partition_classes(&[cls(b'a', b'z'), ByteSet::single(b'm')]);
        assert_eq!(
            p.matched_classes(),
            vec![cls(b'a', b'l'), ByteSet::single(b'm'), cls(b'n', b'z')]
        );
    }

    #[test]
    fn classes_cover_alphabet_disjointly() {
        let p = partition_classes(&[cls(b'0', b'9'), ByteSet::single(b'5'), ByteSet::full()]);
        let mut all = ByteSet::empty();
        for c in p.classes() {
            assert!(all.intersect(c).is_empty());
            all = all.union(c);
        }
        assert_eq!(all, ByteSet::full());
        assert_eq!(p.unmatched(), None);
    }

    #[test]
    fn ranges_roundtrip() {
        let s = cls(b'a', b'c').union(&ByteSet::single(b'x'));
        assert_eq!(s.ranges(), vec![(b'a', b'c'), (b'x', b'x')]);
        assert_eq!(format!("{:?}", s), "[a-cx]");
    }
}
