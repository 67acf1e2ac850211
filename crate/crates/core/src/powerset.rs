//! Deterministic automata built by the subset construction over the parser
//! NFA: the plain DFA (one initial state) and the multi-entry DFA (one entry
//! per segment).

use crate::charset::AlphabetPartition;
use crate::error::BuildError;
use crate::nfa::ParserNfa;
use crate::stateset::{is_zero, StateSet};
use std::collections::HashMap;

pub type StateId = u32;
pub const DEAD: StateId = 0;

/// Default bound on the number of states of one deterministic automaton.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// Dense transition table over sets of segments. State 0 is the dead state.
#[derive(Clone, Debug)]
pub struct PowersetTable {
    ell: usize,
    words: usize,
    nclasses: usize,
    sets: Vec<u64>,
    trans: Vec<StateId>,
    explored: Vec<bool>,
    finals: Vec<bool>,
    index: HashMap<Box<[u64]>, StateId>,
    final_mask: StateSet,
}

impl PowersetTable {
    fn new(nfa: &ParserNfa) -> Self {
        let mut t = PowersetTable {
            ell: nfa.len(),
            words: nfa.words(),
            nclasses: nfa.nclasses(),
            sets: Vec::new(),
            trans: Vec::new(),
            explored: Vec::new(),
            finals: Vec::new(),
            index: HashMap::new(),
            final_mask: nfa.finals().clone(),
        };
        let zero = vec![0u64; t.words];
        t.intern(&zero);
        t.explored[0] = true;
        t
    }

    fn intern(&mut self, set: &[u64]) -> StateId {
        if let Some(&id) = self.index.get(set) {
            return id;
        }
        let id = self.explored.len() as StateId;
        self.index.insert(set.into(), id);
        self.sets.extend_from_slice(set);
        self.trans.extend(std::iter::repeat_n(DEAD, self.nclasses));
        self.explored.push(false);
        let fin = set.iter().zip(self.final_mask.words()).any(|(a, b)| a & b != 0);
        self.finals.push(fin);
        id
    }

    /// Computes transitions for every unexplored state reachable from the
    /// states already present.
    fn explore(&mut self, nfa: &ParserNfa, cap: usize) -> Result<(), BuildError> {
        let mut buf = Vec::new();
        let mut next = 0usize;
        while next < self.explored.len() {
            let s = next;
            next += 1;
            if self.explored[s] {
                continue;
            }
            self.explored[s] = true;
            let from = self.sets[s * self.words..(s + 1) * self.words].to_vec();
            nfa.step_all(&from, &mut buf);
            for c in 0..self.nclasses {
                let target = &buf[c * self.words..(c + 1) * self.words];
                let id = if is_zero(target) { DEAD } else { self.intern(target) };
                self.trans[s * self.nclasses + c] = id;
            }
            if self.explored.len() - 1 > cap {
                return Err(BuildError::StateExplosion { cap });
            }
        }
        Ok(())
    }

    /// Number of states, dead state excluded.
    pub fn state_count(&self) -> usize {
        self.explored.len() - 1
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn nclasses(&self) -> usize {
        self.nclasses
    }

    #[inline]
    pub fn set(&self, s: StateId) -> &[u64] {
        let s = s as usize;
        &self.sets[s * self.words..(s + 1) * self.words]
    }

    pub fn state_set(&self, s: StateId) -> StateSet {
        StateSet::from_words(self.ell, self.set(s))
    }

    #[inline]
    pub fn next(&self, s: StateId, class: u8) -> StateId {
        self.trans[s as usize * self.nclasses + class as usize]
    }

    /// The raw transition table, row-major by state.
    pub fn transitions(&self) -> &[StateId] {
        &self.trans
    }

    /// All segment sets, `words()` words per state.
    pub fn sets(&self) -> &[u64] {
        &self.sets
    }

    pub fn is_final(&self, s: StateId) -> bool {
        self.finals[s as usize]
    }

    pub fn lookup(&self, set: &StateSet) -> Option<StateId> {
        if set.is_empty() {
            return Some(DEAD);
        }
        self.index.get(set.words()).copied()
    }

    pub fn dump(&self, part: &AlphabetPartition, entries: usize, initial: Option<StateId>) -> String {
        let ids = |s: StateId| {
            crate::stateset::bits(self.set(s)).map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
        };
        let mut out = format!("states: {}\n", self.state_count());
        if entries > 0 {
            out.push_str(&format!("entries: S1..S{entries}\n"));
        }
        if let Some(i) = initial {
            out.push_str(&format!("initial: S{i}\n"));
        }
        for s in 1..=self.state_count() as StateId {
            let mark = if self.is_final(s) { " final" } else { "" };
            out.push_str(&format!("S{s} = {{{}}}{mark}\n", ids(s)));
        }
        for s in 1..=self.state_count() as StateId {
            for c in 0..self.nclasses as u8 {
                let t = self.next(s, c);
                if t != DEAD {
                    out.push_str(&format!("S{s} -{:?}-> S{t}\n", part.class(c)));
                }
            }
        }
        out
    }
}

/// Subset-construction DFA with the NFA's initial set as its start state.
#[derive(Clone, Debug)]
pub struct Dfa {
    pub table: PowersetTable,
    pub initial: StateId,
}

pub fn build_dfa(nfa: &ParserNfa, cap: usize) -> Result<Dfa, BuildError> {
    let mut table = PowersetTable::new(nfa);
    let initial = if nfa.initial().is_empty() { DEAD } else { table.intern(nfa.initial().words()) };
    table.explore(nfa, cap)?;
    Ok(Dfa { table, initial })
}

impl Dfa {
    pub fn state_count(&self) -> usize {
        self.table.state_count()
    }

    /// Runs the automaton over `text` (left to right).
    pub fn run(&self, from: StateId, text: &[u8], classes: &[u8; 256]) -> StateId {
        let mut s = from;
        for &b in text {
            s = self.table.next(s, classes[b as usize]);
            if s == DEAD {
                break;
            }
        }
        s
    }
}

/// Multi-entry DFA: states `1..=ℓ` are the singletons `{q_j}`; the remaining
/// states are whatever the subset construction reaches from them. After
/// [`merge_dfa_into_medfa`] the plain DFA's states live in the same table.
#[derive(Clone, Debug)]
pub struct MeDfa {
    pub table: PowersetTable,
    pub dfa_initial: Option<StateId>,
}

pub fn build_medfa(nfa: &ParserNfa, cap: usize) -> Result<MeDfa, BuildError> {
    let mut table = PowersetTable::new(nfa);
    for q in 0..nfa.len() {
        let s = StateSet::from_iter(nfa.len(), [q]);
        table.intern(s.words());
    }
    table.explore(nfa, cap)?;
    Ok(MeDfa { table, dfa_initial: None })
}

impl MeDfa {
    pub fn entry(&self, segment: usize) -> StateId {
        segment as StateId + 1
    }

    pub fn entry_count(&self) -> usize {
        self.table.ell()
    }

    pub fn state_count(&self) -> usize {
        self.table.state_count()
    }
}

/// Adds the states of `dfa` to `medfa`, identifying states by their segment
/// sets, and records the DFA's initial state.
pub fn merge_dfa_into_medfa(medfa: &MeDfa, dfa: &Dfa) -> MeDfa {
    let mut m = medfa.clone();
    let d = &dfa.table;
    let mut map = vec![DEAD; d.state_count() + 1];
    for s in 1..=d.state_count() as StateId {
        map[s as usize] = m.table.intern(d.set(s));
    }
    for s in 1..=d.state_count() as StateId {
        let ms = map[s as usize] as usize;
        if m.table.explored[ms] {
            continue;
        }
        m.table.explored[ms] = true;
        for c in 0..d.nclasses() {
            m.table.trans[ms * m.table.nclasses + c] = map[d.next(s, c as u8) as usize];
        }
    }
    m.dfa_initial = Some(map[dfa.initial as usize]);
    m
}
