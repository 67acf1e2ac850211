//! Parser NFA over segments. An arc `ρ -a-> σ` exists when `σ` follows `ρ`
//! and `a` matches the end-letter of `ρ`.

use crate::charset::AlphabetPartition;
use crate::numbering::{NumberedRe, SymbolKind};
use crate::segments::SegmentTable;
use crate::stateset::{or_into, words_for, StateSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reverse,
}

#[derive(Clone, Debug)]
pub struct ParserNfa {
    dir: Direction,
    len: usize,
    nclasses: usize,
    /// Forward: followers of each segment. Reverse: predecessors.
    adj: Vec<StateSet>,
    /// Segments whose end-letter matches each class.
    by_class: Vec<StateSet>,
    /// Classes matched by the end-letter of each segment.
    classes_of: Vec<Vec<u8>>,
    initial: StateSet,
    finals: StateSet,
}

pub fn build_nfa(nre: &NumberedRe, table: &SegmentTable, part: &AlphabetPartition) -> ParserNfa {
    let l = table.len();
    let nclasses = part.len();
    let mut by_class = vec![StateSet::new(l); nclasses];
    let mut classes_of = vec![Vec::new(); l];
    for (i, seg) in table.segments().iter().enumerate() {
        let sym = nre.symbol(seg.end);
        if sym.kind == SymbolKind::Terminal {
            let cs = part.members(sym.terminal.unwrap() as usize).to_vec();
            for &c in &cs {
                by_class[c as usize].insert(i);
            }
            classes_of[i] = cs;
        }
    }
    ParserNfa {
        dir: Direction::Forward,
        len: l,
        nclasses,
        adj: (0..l as u32).map(|i| table.folseg(i).clone()).collect(),
        by_class,
        classes_of,
        initial: table.initial().clone(),
        finals: table.finals().clone(),
    }
}

impl ParserNfa {
    pub fn direction(&self) -> Direction {
        self.dir
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> usize {
        words_for(self.len)
    }

    pub fn nclasses(&self) -> usize {
        self.nclasses
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    pub fn by_class(&self, c: u8) -> &StateSet {
        &self.by_class[c as usize]
    }

    pub fn classes_of(&self, q: usize) -> &[u8] {
        &self.classes_of[q]
    }

    /// Targets of `q` on class `c`.
    pub fn delta(&self, q: usize, c: u8) -> StateSet {
        match self.dir {
            Direction::Forward => {
                if self.by_class[c as usize].contains(q) {
                    self.adj[q].clone()
                } else {
                    StateSet::new(self.len)
                }
            }
            Direction::Reverse => {
                let mut s = self.adj[q].clone();
                s.intersect_with(&self.by_class[c as usize]);
                s
            }
        }
    }

    pub fn step(&self, from: &StateSet, c: u8) -> StateSet {
        let mut out = StateSet::new(self.len);
        match self.dir {
            Direction::Forward => {
                for q in from.iter() {
                    if self.by_class[c as usize].contains(q) {
                        out.union_with(&self.adj[q]);
                    }
                }
            }
            Direction::Reverse => {
                for q in from.iter() {
                    out.union_with(&self.adj[q]);
                }
                out.intersect_with(&self.by_class[c as usize]);
            }
        }
        out
    }

    /// Successor sets for every class at once, as `nclasses * words` words.
    pub fn step_all(&self, from: &[u64], out: &mut Vec<u64>) {
        let w = self.words();
        out.clear();
        out.resize(self.nclasses * w, 0);
        match self.dir {
            Direction::Forward => {
                for q in crate::stateset::bits(from) {
                    for &c in &self.classes_of[q] {
                        let c = c as usize;
                        or_into(&mut out[c * w..(c + 1) * w], self.adj[q].words());
                    }
                }
            }
            Direction::Reverse => {
                let mut p = vec![0u64; w];
                for q in crate::stateset::bits(from) {
                    or_into(&mut p, self.adj[q].words());
                }
                for c in 0..self.nclasses {
                    let dst = &mut out[c * w..(c + 1) * w];
                    for ((d, a), b) in dst.iter_mut().zip(&p).zip(self.by_class[c].words()) {
                        *d = a & b;
                    }
                }
            }
        }
    }

    /// Transpose of every per-class relation, with I and F swapped.
    pub fn reverse(&self) -> ParserNfa {
        let mut adj = vec![StateSet::new(self.len); self.len];
        for (q, s) in self.adj.iter().enumerate() {
            for t in s.iter() {
                adj[t].insert(q);
            }
        }
        ParserNfa {
            dir: match self.dir {
                Direction::Forward => Direction::Reverse,
                Direction::Reverse => Direction::Forward,
            },
            len: self.len,
            nclasses: self.nclasses,
            adj,
            by_class: self.by_class.clone(),
            classes_of: self.classes_of.clone(),
            initial: self.finals.clone(),
            finals: self.initial.clone(),
        }
    }

    /// Number of (source, class, target) arcs.
    pub fn arc_count(&self) -> usize {
        (0..self.len)
            .flat_map(|q| (0..self.nclasses as u8).map(move |c| (q, c)))
            .map(|(q, c)| self.delta(q, c).count())
            .sum()
    }

    pub fn dump(&self, part: &AlphabetPartition) -> String {
        let ids = |s: &StateSet| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        let mut out = format!("states: {}\nI: {}\nF: {}\n", self.len, ids(&self.initial), ids(&self.finals));
        for q in 0..self.len {
            for c in 0..self.nclasses as u8 {
                let t = self.delta(q, c);
                if !t.is_empty() {
                    out.push_str(&format!("{} -{:?}-> {}\n", q + 1, part.class(c), ids(&t)));
                }
            }
        }
        out
    }
}
