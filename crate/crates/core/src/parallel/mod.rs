//! Parallel parser.
//!
//! The text is cut into chunks, each chunk into fragments. Three phases
//! separated by barriers:
//!
//! 1. reach: per fragment, run the multi-entry DFA from every entry (and the
//!    reverse one over the reversed fragment), so the fragment's effect on
//!    any incoming set of segments is known;
//! 2. join: chain those effects left to right (and right to left) to get
//!    the exact forward and backward sets at every fragment boundary;
//! 3. build & merge: per fragment, a forward DFA run from the joined set
//!    writes the columns, a reverse DFA run from the joined backward set
//!    intersects them in place.
//!
//! Reach work the join never reads is skipped: the first fragment starts
//! from the initial set only, the last one backward from the final set only,
//! and the last fragment's forward effect and the first fragment's backward
//! effect are produced by build & merge itself. With a single chunk the
//! text is not fragmented, so that case costs one forward and one backward
//! DFA pass, like the serial parser.

pub mod pool;

use crate::error::ParseError;
use crate::powerset::{MeDfa, PowersetTable, StateId, DEAD};
use crate::serial::{backward_pass, forward_pass};
use crate::slpf::Slpf;
use crate::stateset::{and_into, bits, or_into, StateSet};
use crate::ReParser;
use std::ops::Range;
use std::time::{Duration, Instant};

/// Distance between convergence checkpoints in a reach run.
const CHECKPOINT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParallelOptions {
    pub chunks: usize,
    pub workers: usize,
    pub fragments: usize,
}

pub fn hardware_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Default for ParallelOptions {
    fn default() -> Self {
        let t = hardware_threads();
        ParallelOptions { chunks: t, workers: t, fragments: 4 }
    }
}

impl ParallelOptions {
    pub fn new(chunks: usize, workers: usize) -> Self {
        ParallelOptions { chunks, workers, fragments: 4 }
    }
}

/// Chunk and fragment boundaries. Chunks have length `ceil(n / c)` except
/// possibly the last; the chunk count never exceeds `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChunkPlan {
    pub n: usize,
    pub chunks: Vec<Range<usize>>,
    pub fragments: Vec<Range<usize>>,
    /// Index of the first fragment of each chunk, plus a final sentinel.
    pub chunk_start: Vec<usize>,
}

fn split(range: Range<usize>, parts: usize) -> Vec<Range<usize>> {
    let len = range.len();
    if len == 0 {
        return Vec::new();
    }
    let k = len.div_ceil(parts.clamp(1, len));
    (range.start..range.end).step_by(k).map(|s| s..(s + k).min(range.end)).collect()
}

impl ChunkPlan {
    pub fn new(n: usize, chunks: usize, fragments: usize) -> Self {
        let chunks = split(0..n, chunks);
        let per = if chunks.len() <= 1 { 1 } else { fragments.max(1) };
        let mut frags = Vec::new();
        let mut chunk_start = Vec::new();
        for c in &chunks {
            chunk_start.push(frags.len());
            frags.extend(split(c.clone(), per));
        }
        chunk_start.push(frags.len());
        ChunkPlan { n, chunks, fragments: frags, chunk_start }
    }

    pub fn chunk_count(&self) -> usize {
        self.chunks.len()
    }
}

/// Which reach runs to perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReachMode {
    /// Every fragment, every entry, both directions.
    Full,
    /// Only what the parser's join reads.
    Parse,
    /// Forward only, for recognition.
    Recognize,
}

/// Effect of one fragment in one direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragReach {
    Skipped,
    /// End state of the run from the DFA's start state.
    Single(StateId),
    /// End state of the run from each entry `j` (segment `j`).
    Entries(Vec<StateId>),
}

#[derive(Clone, Debug)]
pub struct ReachArrays {
    pub forward: Vec<FragReach>,
    pub backward: Vec<FragReach>,
}

/// Runs from every entry of `m` over `text` (or its reverse), sharing the
/// remainder of a run once it meets an earlier run at a checkpoint.
#[allow(clippy::needless_range_loop)]
fn run_entries(m: &MeDfa, cls: &[u8; 256], text: &[u8], reverse: bool) -> Vec<StateId> {
    let t = &m.table;
    let blocks: Vec<&[u8]> = text.chunks(CHECKPOINT).collect();
    let mut seen: Vec<Vec<(StateId, usize)>> = vec![Vec::new(); blocks.len()];
    let mut out: Vec<StateId> = Vec::with_capacity(m.entry_count());
    for j in 0..m.entry_count() {
        let mut s = m.entry(j);
        let mut result = None;
        for i in 0..blocks.len() {
            let bi = if reverse { blocks.len() - 1 - i } else { i };
            s = if reverse { run_rev(t, cls, blocks[bi], s) } else { run_fwd(t, cls, blocks[bi], s) };
            if s == DEAD {
                break;
            }
            if i + 1 < blocks.len() {
                if let Some(&(_, k)) = seen[i].iter().find(|(st, _)| *st == s) {
                    result = Some(out[k]);
                    break;
                }
                seen[i].push((s, j));
            }
        }
        out.push(result.unwrap_or(s));
    }
    out
}

#[inline]
fn run_fwd(t: &PowersetTable, cls: &[u8; 256], text: &[u8], mut s: StateId) -> StateId {
    for &b in text {
        s = t.next(s, cls[b as usize]);
    }
    s
}

#[inline]
fn run_rev(t: &PowersetTable, cls: &[u8; 256], text: &[u8], mut s: StateId) -> StateId {
    for &b in text.iter().rev() {
        s = t.next(s, cls[b as usize]);
    }
    s
}

/// Reach phase over the fragments of `plan`.
pub fn reach(parser: &ReParser, plan: &ChunkPlan, text: &[u8], mode: ReachMode, workers: usize) -> ReachArrays {
    let m = plan.fragments.len();
    let cls = parser.classes();
    let (fw, bw) = (parser.medfa(), parser.medfa_rev());
    let tasks: Vec<usize> = (0..m).collect();
    let results = pool::run_fifo(workers, tasks, |t| {
        let y = &text[plan.fragments[t].clone()];
        let f = match mode {
            ReachMode::Full => FragReach::Entries(run_entries(fw, cls, y, false)),
            _ if t == 0 && (mode == ReachMode::Recognize || m > 1) => {
                FragReach::Single(run_fwd(&fw.table, cls, y, fw.dfa_initial.unwrap()))
            }
            ReachMode::Parse if t + 1 == m => FragReach::Skipped,
            _ => FragReach::Entries(run_entries(fw, cls, y, false)),
        };
        let b = match mode {
            ReachMode::Full => FragReach::Entries(run_entries(bw, cls, y, true)),
            ReachMode::Recognize => FragReach::Skipped,
            ReachMode::Parse if t == 0 => FragReach::Skipped,
            ReachMode::Parse if t + 1 == m => {
                FragReach::Single(run_rev(&bw.table, cls, y, bw.dfa_initial.unwrap()))
            }
            ReachMode::Parse => FragReach::Entries(run_entries(bw, cls, y, true)),
        };
        (f, b)
    });
    let (forward, backward) = results.into_iter().unzip();
    ReachArrays { forward, backward }
}

impl ReachArrays {
    /// `R[i][j]` at chunk level (1-based chunk index `i`, 0-based segment
    /// `j`): the segments reached from `{q_j}` across chunk `i`. Needs
    /// [`ReachMode::Full`].
    pub fn chunk_forward(&self, parser: &ReParser, plan: &ChunkPlan, i: usize, j: usize) -> StateSet {
        let frags = plan.chunk_start[i - 1]..plan.chunk_start[i];
        let mut set = StateSet::from_iter(parser.ell(), [j]);
        for f in frags {
            set = apply(&parser.medfa().table, &self.forward[f], &set).expect("full reach");
        }
        set
    }

    /// `R̂[i][j]`: segments reached backward from `{q_j}` across chunk `i`.
    pub fn chunk_backward(&self, parser: &ReParser, plan: &ChunkPlan, i: usize, j: usize) -> StateSet {
        let frags = plan.chunk_start[i - 1]..plan.chunk_start[i];
        let mut set = StateSet::from_iter(parser.ell(), [j]);
        for f in frags.rev() {
            set = apply(&parser.medfa_rev().table, &self.backward[f], &set).expect("full reach");
        }
        set
    }
}

/// Effect of a fragment on an incoming set; `None` when it was skipped.
fn apply(t: &PowersetTable, r: &FragReach, incoming: &StateSet) -> Option<StateSet> {
    match r {
        FragReach::Skipped => None,
        FragReach::Single(s) => Some(t.state_set(*s)),
        FragReach::Entries(v) => {
            let mut out = vec![0u64; t.words()];
            for q in incoming.iter() {
                or_into(&mut out, t.set(v[q]));
            }
            Some(StateSet::from_words(t.ell(), &out))
        }
    }
}

/// Forward and backward sets at every fragment boundary (`m + 1` entries);
/// `None` where the reach phase skipped the work.
#[derive(Clone, Debug)]
pub struct JoinColumns {
    pub forward: Vec<Option<StateSet>>,
    pub backward: Vec<Option<StateSet>>,
}

impl JoinColumns {
    /// `J_i` for chunk `i` (`J_0 = I`).
    pub fn chunk_forward(&self, plan: &ChunkPlan, i: usize) -> Option<&StateSet> {
        self.forward[plan.chunk_start[i]].as_ref()
    }

    /// `Ĵ_i`: backward set at the left edge of chunk `i` (1-based);
    /// `Ĵ_{c+1} = F`.
    pub fn chunk_backward(&self, plan: &ChunkPlan, i: usize) -> Option<&StateSet> {
        self.backward[plan.chunk_start[i - 1]].as_ref()
    }
}

/// Join phase. Fails with the exact offset when the text is rejected and
/// the failure is visible from the joined sets.
pub fn join(parser: &ReParser, plan: &ChunkPlan, reach: &ReachArrays, text: &[u8]) -> Result<JoinColumns, ParseError> {
    let m = plan.fragments.len();
    let (fw, bw) = (&parser.medfa().table, &parser.medfa_rev().table);
    let mut forward: Vec<Option<StateSet>> = vec![Some(parser.table().initial().clone())];
    for t in 0..m {
        let prev = forward[t].clone();
        let next = prev.as_ref().and_then(|p| apply(fw, &reach.forward[t], p));
        if let Some(s) = &next {
            if s.is_empty() {
                return Err(rescan(parser, plan, t, prev.as_ref().unwrap(), text));
            }
        }
        forward.push(next);
    }
    if let Some(Some(last)) = forward.last() {
        if !last.intersects(parser.table().finals()) {
            return Err(ParseError::Reject { offset: plan.n });
        }
    }
    let mut backward: Vec<Option<StateSet>> = vec![None; m + 1];
    backward[m] = Some(parser.table().finals().clone());
    for t in (0..m).rev() {
        backward[t] = backward[t + 1].as_ref().and_then(|b| apply(bw, &reach.backward[t], b));
        if backward[t].as_ref().is_some_and(|b| b.is_empty()) {
            // the forward sets reached the last fragment, so the failure is there
            let last = m - 1;
            return match &forward[last] {
                Some(p) => Err(rescan(parser, plan, last, p, text)),
                None => Err(ParseError::Reject { offset: plan.n }),
            };
        }
    }
    Ok(JoinColumns { forward, backward })
}

/// Finds the first empty forward column inside fragment `t`.
fn rescan(parser: &ReParser, plan: &ChunkPlan, t: usize, from: &StateSet, text: &[u8]) -> ParseError {
    let fw = &parser.medfa().table;
    let r = plan.fragments[t].clone();
    let mut s = fw.lookup(from).expect("joined set is a DFA state");
    for (i, &b) in text[r.clone()].iter().enumerate() {
        s = fw.next(s, parser.classes()[b as usize]);
        if s == DEAD {
            return ParseError::Reject { offset: r.start + i + 1 };
        }
    }
    ParseError::Reject { offset: r.end }
}

/// Build & merge phase: writes the clean columns of every fragment.
pub fn build_and_merge<'p>(
    parser: &'p ReParser,
    plan: &ChunkPlan,
    joined: &JoinColumns,
    text: &[u8],
    workers: usize,
) -> Result<Slpf<'p>, ParseError> {
    let n = plan.n;
    let m = plan.fragments.len();
    let (fw, bw) = (&parser.medfa().table, &parser.medfa_rev().table);
    let cls = parser.classes();
    let w = fw.words();
    let mut slpf = Slpf::empty(parser, n);
    let (c0, mut rest) = slpf.raw_mut().split_at_mut(w);
    let mut c0 = Some(c0);
    let mut tasks = Vec::with_capacity(m);
    for (t, r) in plan.fragments.iter().enumerate() {
        let (mine, tail) = rest.split_at_mut(r.len() * w);
        rest = tail;
        tasks.push((t, mine, if t == 0 { c0.take() } else { None }));
    }
    let results = pool::run_fifo(workers, tasks, |(t, out, col0)| -> Result<(), ParseError> {
        let r = plan.fragments[t].clone();
        let y = &text[r.clone()];
        let from = joined.forward[t].as_ref().expect("forward set joined");
        let fs = fw.lookup(from).expect("joined set is a DFA state");
        let last = forward_pass(fw, cls, y, r.start, fs, out).map_err(|offset| ParseError::Reject { offset })?;
        if t + 1 == m && !fw.is_final(last) {
            return Err(ParseError::Reject { offset: n });
        }
        let bset = joined.backward[t + 1].as_ref().expect("backward set joined");
        let bs = bw.lookup(bset).expect("joined set is a reverse DFA state");
        let at_start = backward_pass(bw, cls, y, bs, out);
        if let Some(c0) = col0 {
            c0.copy_from_slice(from.words());
            and_into(c0, bw.set(at_start));
        }
        Ok(())
    });
    for r in results {
        r?;
    }
    Ok(slpf)
}

/// Wall-clock time spent in each phase.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseTimes {
    pub reach: Duration,
    pub join: Duration,
    pub build: Duration,
}

impl PhaseTimes {
    pub fn total(&self) -> Duration {
        self.reach + self.join + self.build
    }
}

pub fn parse_parallel<'p>(parser: &'p ReParser, text: &[u8], opts: ParallelOptions) -> Result<Slpf<'p>, ParseError> {
    parse_parallel_timed(parser, text, opts).0
}

pub fn parse_parallel_timed<'p>(
    parser: &'p ReParser,
    text: &[u8],
    opts: ParallelOptions,
) -> (Result<Slpf<'p>, ParseError>, PhaseTimes) {
    let mut times = PhaseTimes::default();
    if text.is_empty() {
        let t0 = Instant::now();
        let r = crate::serial::parse_serial_dfa(parser, text);
        times.build = t0.elapsed();
        return (r, times);
    }
    let plan = ChunkPlan::new(text.len(), opts.chunks, opts.fragments);
    let t0 = Instant::now();
    let reached = reach(parser, &plan, text, ReachMode::Parse, opts.workers);
    let t1 = Instant::now();
    times.reach = t1 - t0;
    let joined = join(parser, &plan, &reached, text);
    let t2 = Instant::now();
    times.join = t2 - t1;
    let joined = match joined {
        Ok(j) => j,
        Err(e) => return (Err(e), times),
    };
    let out = build_and_merge(parser, &plan, &joined, text, opts.workers);
    times.build = t2.elapsed();
    (out, times)
}

/// Acceptance test with forward reach and join only.
pub fn recognize_parallel(parser: &ReParser, text: &[u8], opts: ParallelOptions) -> bool {
    if text.is_empty() {
        return parser.table().initial().intersects(parser.table().finals());
    }
    let plan = ChunkPlan::new(text.len(), opts.chunks, opts.fragments);
    let reached = reach(parser, &plan, text, ReachMode::Recognize, opts.workers);
    let fw = &parser.medfa().table;
    let mut cur = parser.table().initial().clone();
    for f in &reached.forward {
        cur = apply(fw, f, &cur).expect("forward reach");
        if cur.is_empty() {
            return false;
        }
    }
    cur.intersects(parser.table().finals())
}

/// Segment sets of chunk-level forward join columns, for inspection.
pub fn chunk_join_sets(joined: &JoinColumns, plan: &ChunkPlan) -> Vec<Option<Vec<usize>>> {
    (0..=plan.chunk_count())
        .map(|i| joined.chunk_forward(plan, i).map(|s| bits(s.words()).collect()))
        .collect()
}
