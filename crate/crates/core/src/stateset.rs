//! Fixed-width bit sets over segment indices.

use std::fmt;

pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64).max(1)
}

#[inline]
pub fn or_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d |= *s;
    }
}

#[inline]
pub fn and_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= *s;
    }
}

#[inline]
pub fn is_zero(w: &[u64]) -> bool {
    w.iter().all(|&x| x == 0)
}

#[inline]
pub fn test_bit(w: &[u64], i: usize) -> bool {
    w[i / 64] >> (i % 64) & 1 == 1
}

/// Iterates the set bits of a word slice.
pub fn bits(w: &[u64]) -> impl Iterator<Item = usize> + '_ {
    w.iter().enumerate().flat_map(|(i, &word)| {
        let mut x = word;
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

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    words: Vec<u64>,
    len: usize,
}

impl StateSet {
    pub fn new(len: usize) -> Self {
        StateSet { words: vec![0; words_for(len)], len }
    }

    pub fn from_words(len: usize, words: &[u64]) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        StateSet { words: words.to_vec(), len }
    }

    pub fn from_iter<I: IntoIterator<Item = usize>>(len: usize, it: I) -> Self {
        let mut s = Self::new(len);
        for i in it {
            s.insert(i);
        }
        s
    }

    /// Universe size.
    pub fn width(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && test_bit(&self.words, i)
    }

    pub fn is_empty(&self) -> bool {
        is_zero(&self.words)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn union_with(&mut self, o: &StateSet) {
        or_into(&mut self.words, &o.words);
    }

    pub fn intersect_with(&mut self, o: &StateSet) {
        and_into(&mut self.words, &o.words);
    }

    pub fn intersects(&self, o: &StateSet) -> bool {
        self.words.iter().zip(&o.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, o: &StateSet) -> bool {
        self.words.iter().zip(&o.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        bits(&self.words)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut a = StateSet::from_iter(130, [0, 64, 129]);
        let b = StateSet::from_iter(130, [64, 5]);
        assert_eq!(a.count(), 3);
        assert!(a.intersects(&b));
        a.union_with(&b);
        assert_eq!(a.to_vec(), vec![0, 5, 64, 129]);
        a.intersect_with(&b);
        assert_eq!(a, b);
        assert!(b.is_subset(&a));
        assert!(!a.contains(200));
    }
}
