//! SLPF-DFA: the forest folded into an automaton whose states are the
//! distinct columns. A (state, byte) pair normally has one target. When the
//! column that follows depends on text further right, the pair keeps an
//! ordered run-length list of targets that replay consumes in order.

use super::Slpf;
use crate::stateset::StateSet;
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct SlpfDfa {
    states: Vec<StateSet>,
    initial: u32,
    /// Targets of each (state, byte) pair as `(target, run length)` in
    /// replay order.
    trans: HashMap<(u32, u8), Vec<(u32, u64)>>,
    n: usize,
}

pub fn compress_to_dfa(slpf: &Slpf, text: &[u8]) -> SlpfDfa {
    assert_eq!(text.len(), slpf.text_len(), "text does not belong to this forest");
    let mut ids: HashMap<StateSet, u32> = HashMap::new();
    let mut states = Vec::new();
    let mut id_of = |s: StateSet, states: &mut Vec<StateSet>| {
        *ids.entry(s.clone()).or_insert_with(|| {
            states.push(s);
            (states.len() - 1) as u32
        })
    };
    let initial = id_of(slpf.column_set(0), &mut states);
    let mut trans: HashMap<(u32, u8), Vec<(u32, u64)>> = HashMap::new();
    let mut cur = initial;
    for (r, &b) in text.iter().enumerate() {
        let next = id_of(slpf.column_set(r + 1), &mut states);
        let runs = trans.entry((cur, b)).or_default();
        match runs.last_mut() {
            Some((t, k)) if *t == next => *k += 1,
            _ => runs.push((next, 1)),
        }
        cur = next;
    }
    SlpfDfa { states, initial, trans, n: text.len() }
}

impl SlpfDfa {
    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, i: u32) -> &StateSet {
        &self.states[i as usize]
    }

    /// True when no transition needs a target list.
    pub fn is_deterministic(&self) -> bool {
        self.trans.values().all(|v| v.len() == 1)
    }

    /// Number of stored `(target, run)` entries.
    pub fn transition_entries(&self) -> usize {
        self.trans.values().map(|v| v.len()).sum()
    }

    /// Replays `text` from the initial column and rebuilds the forest.
    pub fn replay<'p>(&self, parser: &'p crate::ReParser, text: &[u8]) -> Option<Slpf<'p>> {
        if text.len() != self.n {
            return None;
        }
        let mut out = Slpf::empty(parser, text.len());
        out.column_mut(0).copy_from_slice(self.states[self.initial as usize].words());
        let mut cursor: HashMap<(u32, u8), (usize, u64)> = HashMap::new();
        let mut cur = self.initial;
        for (r, &b) in text.iter().enumerate() {
            let runs = self.trans.get(&(cur, b))?;
            let c = cursor.entry((cur, b)).or_insert((0, 0));
            let (target, len) = *runs.get(c.0)?;
            c.1 += 1;
            if c.1 == len && c.0 + 1 < runs.len() {
                *c = (c.0 + 1, 0);
            }
            cur = target;
            out.column_mut(r + 1).copy_from_slice(self.states[cur as usize].words());
        }
        Some(out)
    }
}
