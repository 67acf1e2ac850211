//! Segments: maximal runs of parentheses and epsilons closed by one terminal
//! (the end-letter) or by the end mark. Ids list the segments that are both
//! initial and final first, then initial, internal and final ones, each group
//! ordered by the textual positions of its symbols.

use crate::error::BuildError;
use crate::follow::Followers;
use crate::numbering::{NumberedRe, Pos, SymbolKind};
use crate::stateset::StateSet;
use std::collections::{HashMap, HashSet};

/// Dense segment index, 0-based. Displayed 1-based.
pub type SegmentId = u32;

#[derive(Clone, Copy, Debug)]
pub struct SegmentOptions {
    /// Occurrences of one numbered symbol allowed in a single meta-prefix.
    pub repeat_limit: usize,
    /// Upper bound on the number of segments.
    pub cap: usize,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions { repeat_limit: 1, cap: 1 << 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Segment {
    /// Parentheses and epsilons before the end-letter.
    pub meta: Vec<Pos>,
    /// A terminal or the end mark.
    pub end: Pos,
}

impl Segment {
    pub fn first(&self) -> Pos {
        self.meta.first().copied().unwrap_or(self.end)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Pos> + '_ {
        self.meta.iter().copied().chain(std::iter::once(self.end))
    }
}

#[derive(Clone, Debug)]
pub struct SegmentTable {
    segments: Vec<Segment>,
    initial: StateSet,
    finals: StateSet,
    folseg: Vec<StateSet>,
    repeat_limit: usize,
}

impl SegmentTable {
    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn segment(&self, id: SegmentId) -> &Segment {
        &self.segments[id as usize]
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn finals(&self) -> &StateSet {
        &self.finals
    }

    pub fn folseg(&self, id: SegmentId) -> &StateSet {
        &self.folseg[id as usize]
    }

    pub fn repeat_limit(&self) -> usize {
        self.repeat_limit
    }

    pub fn find(&self, seg: &Segment) -> Option<SegmentId> {
        self.segments.iter().position(|s| s == seg).map(|i| i as SegmentId)
    }

    pub fn render(&self, nre: &NumberedRe, id: SegmentId) -> String {
        let s = self.segment(id);
        let ps: Vec<Pos> = s.symbols().collect();
        nre.render_symbols(&ps)
    }

    /// Looks a segment up by its rendering, e.g. `)3 )2 2( a6`.
    pub fn by_rendering(&self, nre: &NumberedRe, text: &str) -> Option<SegmentId> {
        let want: Vec<&str> = text.split_whitespace().collect();
        (0..self.len() as SegmentId).find(|&id| {
            let r = self.render(nre, id);
            r.split_whitespace().eq(want.iter().copied())
        })
    }

    /// Text dump: one `id: symbols` line per segment, then I, F and FolSeg.
    pub fn dump(&self, nre: &NumberedRe) -> String {
        let mut out = String::new();
        for id in 0..self.len() as SegmentId {
            out.push_str(&format!("{}: {}\n", id + 1, self.render(nre, id)));
        }
        let ids = |s: &StateSet| s.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        out.push_str(&format!("I: {}\n", ids(&self.initial)));
        out.push_str(&format!("F: {}\n", ids(&self.finals)));
        for id in 0..self.len() {
            out.push_str(&format!("FolSeg({}): {}\n", id + 1, ids(&self.folseg[id])));
        }
        out
    }
}

/// Enumerates all segments of the numbered expression.
pub fn compute_segments(
    nre: &NumberedRe,
    fol: &Followers,
    opts: SegmentOptions,
) -> Result<SegmentTable, BuildError> {
    let syms = nre.symbols();
    let root = nre.root_open();
    let limit = opts.repeat_limit.max(1);
    let work_cap = opts.cap.saturating_mul(16);
    let mut found: HashSet<Segment> = HashSet::new();
    let mut work = 0usize;

    for (a, s) in syms.iter().enumerate() {
        if !matches!(s.kind, SymbolKind::Terminal | SymbolKind::End) {
            continue;
        }
        // partial meta-prefixes kept reversed: the end-letter first
        let mut stack: Vec<Vec<Pos>> = vec![vec![a as Pos]];
        while let Some(rev) = stack.pop() {
            work += 1;
            if work > work_cap {
                return Err(BuildError::SegmentExplosion { cap: opts.cap });
            }
            let left = *rev.last().unwrap();
            let mut close = false;
            if left == root {
                close = true;
            }
            for &r in &fol.pred[left as usize] {
                if syms[r as usize].kind == SymbolKind::Terminal {
                    close = true;
                } else if rev.iter().filter(|&&x| x == r).count() < limit {
                    let mut next = rev.clone();
                    next.push(r);
                    stack.push(next);
                }
            }
            if close {
                let mut meta: Vec<Pos> = rev[1..].to_vec();
                meta.reverse();
                found.insert(Segment { meta, end: a as Pos });
                if found.len() > opts.cap {
                    return Err(BuildError::SegmentExplosion { cap: opts.cap });
                }
            }
        }
    }

    // initial-and-final, initial, internal, final; then by symbol positions
    let end = nre.end_pos();
    let group = |s: &Segment| match (s.first() == root, s.end == end) {
        (true, true) => 0,
        (true, false) => 1,
        (false, false) => 2,
        (false, true) => 3,
    };
    let mut segments: Vec<Segment> = found.into_iter().collect();
    segments.sort_by(|x, y| group(x).cmp(&group(y)).then_with(|| x.symbols().cmp(y.symbols())));

    let l = segments.len();
    let initial = StateSet::from_iter(l, (0..l).filter(|&i| segments[i].first() == root));
    let finals = StateSet::from_iter(l, (0..l).filter(|&i| segments[i].end == nre.end_pos()));
    let folseg = follower_segments(&segments, fol);
    Ok(SegmentTable { segments, initial, finals, folseg, repeat_limit: limit })
}

/// `σ` follows `ρ` when the first symbol of `σ` follows the end-letter of `ρ`.
pub fn follower_segments(segments: &[Segment], fol: &Followers) -> Vec<StateSet> {
    let l = segments.len();
    let mut by_first: HashMap<Pos, Vec<usize>> = HashMap::new();
    for (i, s) in segments.iter().enumerate() {
        by_first.entry(s.first()).or_default().push(i);
    }
    let mut per_end: HashMap<Pos, StateSet> = HashMap::new();
    segments
        .iter()
        .map(|s| {
            per_end
                .entry(s.end)
                .or_insert_with(|| {
                    let mut set = StateSet::new(l);
                    for f in &fol.fol[s.end as usize] {
                        for &i in by_first.get(f).map(|v| v.as_slice()).unwrap_or(&[]) {
                            set.insert(i);
                        }
                    }
                    set
                })
                .clone()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_re;
    use crate::follow::classic_followers;
    use crate::numbering::number_re;

    fn build(src: &str) -> (NumberedRe, SegmentTable) {
        let nre = number_re(&parse_re(src).unwrap());
        let fol = classic_followers(&nre);
        let t = compute_segments(&nre, &fol, SegmentOptions::default()).unwrap();
        (nre, t)
    }

    #[test]
    fn ordering_is_by_role_then_positions() {
        let (nre, t) = build("(ab|a)*");
        let got: Vec<String> = (0..t.len() as u32).map(|i| t.render(&nre, i)).collect();
        assert_eq!(
            got,
            [
                "1( )1 ⊣",
                "1( 2( 3( a4",
                "1( 2( a6",
                "b5",
                ")3 )2 2( 3( a4",
                ")3 )2 2( a6",
                ")2 2( 3( a4",
                ")2 2( a6",
                ")3 )2 )1 ⊣",
                ")2 )1 ⊣",
            ]
        );
    }

    #[test]
    fn single_terminal() {
        let (nre, t) = build("a");
        let got: Vec<String> = (0..t.len() as u32).map(|i| t.render(&nre, i)).collect();
        assert_eq!(got, ["1( a2", ")1 ⊣"]);
        assert_eq!(t.folseg(0).to_vec(), vec![1]);
    }

    #[test]
    fn repeat_limit_bounds_nullable_loops() {
        let nre = number_re(&parse_re("(a*|ab)+").unwrap());
        let fol = classic_followers(&nre);
        let one = compute_segments(&nre, &fol, SegmentOptions { repeat_limit: 1, cap: 1 << 16 }).unwrap();
        let two = compute_segments(&nre, &fol, SegmentOptions { repeat_limit: 2, cap: 1 << 16 }).unwrap();
        assert!(one.len() < two.len());
        let tiny = compute_segments(&nre, &fol, SegmentOptions { repeat_limit: 3, cap: 4 });
        assert!(matches!(tiny, Err(BuildError::SegmentExplosion { .. })));
    }
}
