//! Random expressions and texts for tests and benchmarks.
//!
//! Expressions are drawn over `{a, b, c}` with classes, the wildcard, the
//! empty string and every operator. Texts are random walks over the parser
//! NFA that steer towards a final segment once the wanted length is reached,
//! so every generated text is accepted.

use crate::ast::{Ast, AstKind};
use crate::segments::SegmentId;
use crate::ReParser;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::VecDeque;

const LETTERS: &[u8] = b"abc";

fn leaf<R: Rng>(rng: &mut R) -> Ast {
    let kind = match rng.gen_range(0..20) {
        0..=13 => AstKind::Terminal(*LETTERS.choose(rng).unwrap()),
        14..=16 => {
            let lo = *LETTERS.choose(rng).unwrap();
            let hi = rng.gen_range(lo..=b'c');
            AstKind::Class { negated: rng.gen_bool(0.15), items: vec![(lo, hi)] }
        }
        17 => AstKind::Wildcard,
        _ => AstKind::Epsilon,
    };
    Ast::new(kind)
}

/// A random expression with at most `terminals` leaves (before repetition
/// copies are expanded).
pub fn random_ast<R: Rng>(rng: &mut R, terminals: usize) -> Ast {
    let n = rng.gen_range(1..=terminals.max(1));
    let ast = shape(build(rng, n, 0));
    if matches!(ast.kind, AstKind::Epsilon) {
        group(ast)
    } else {
        ast
    }
}

fn group(a: Ast) -> Ast {
    Ast::new(AstKind::Group(Box::new(a)))
}

/// Adds the parentheses the printed form needs to parse back to the same
/// tree.
fn shape(ast: Ast) -> Ast {
    use AstKind::*;
    let atom = |a: Ast| match a.kind {
        Terminal(_) | Class { .. } | Wildcard | Group(_) => a,
        _ => group(a),
    };
    let kind = match ast.kind {
        Concat(items) => Concat(
            items
                .into_iter()
                .map(shape)
                .map(|a| if matches!(a.kind, Union(_) | Concat(_) | Epsilon) { group(a) } else { a })
                .collect(),
        ),
        Union(items) => Union(
            items.into_iter().map(shape).map(|a| if matches!(a.kind, Union(_)) { group(a) } else { a }).collect(),
        ),
        Star(b) => Star(Box::new(atom(shape(*b)))),
        Cross(b) => Cross(Box::new(atom(shape(*b)))),
        Optional(b) => Optional(Box::new(atom(shape(*b)))),
        Repeat { min, max, body } => Repeat { min, max, body: Box::new(atom(shape(*body))) },
        Group(b) => Group(Box::new(shape(*b))),
        k => k,
    };
    Ast::new(kind)
}

fn build<R: Rng>(rng: &mut R, leaves: usize, depth: usize) -> Ast {
    if leaves == 1 {
        let l = leaf(rng);
        return match rng.gen_range(0..10) {
            0 | 1 if depth < 6 => unary(rng, l, false),
            2 => Ast::new(AstKind::Group(Box::new(l))),
            _ => l,
        };
    }
    let parts = rng.gen_range(2..=leaves.min(3));
    let mut sizes = vec![1; parts];
    for _ in parts..leaves {
        *sizes.choose_mut(rng).unwrap() += 1;
    }
    let items: Vec<Ast> = sizes.iter().map(|&s| build(rng, s, depth + 1)).collect();
    let node = if rng.gen_bool(0.5) {
        Ast::new(AstKind::Concat(items))
    } else {
        Ast::new(AstKind::Union(items))
    };
    if depth < 6 && rng.gen_bool(0.35) {
        unary(rng, node, leaves <= 2)
    } else {
        node
    }
}

fn unary<R: Rng>(rng: &mut R, body: Ast, small: bool) -> Ast {
    let b = Box::new(body);
    let kind = match rng.gen_range(0..if small { 6 } else { 3 }) {
        0 => AstKind::Star(b),
        1 => AstKind::Cross(b),
        2 => AstKind::Optional(b),
        3 => AstKind::Repeat { min: rng.gen_range(1..=2), max: None, body: b },
        4 => {
            let min = rng.gen_range(0..=1);
            AstKind::Repeat { min, max: Some(min + 1), body: b }
        }
        _ => AstKind::Repeat { min: 2, max: Some(2), body: b },
    };
    Ast::new(kind)
}

/// Source text of a random expression whose numbered form has at most
/// `max_terminals` terminal and epsilon leaves.
pub fn random_re<R: Rng>(rng: &mut R, terminals: usize, max_terminals: usize) -> String {
    loop {
        let src = random_ast(rng, terminals).to_string();
        if let Ok(p) = ReParser::new(&src) {
            let leaves = p.numbered().symbols().iter().filter(|s| !s.is_paren()).count() - 1;
            if leaves <= max_terminals {
                return src;
            }
        }
    }
}

/// An expression of roughly `size` numbered symbols under a star, so that it
/// accepts arbitrarily long texts.
pub fn random_re_sized<R: Rng>(rng: &mut R, size: u32) -> String {
    let mut best: Option<(u32, String)> = None;
    for _ in 0..500 {
        let t = (size as usize / 2).max(2);
        let body = random_ast(rng, t);
        let src = format!("({body})*");
        let Ok(p) = ReParser::new(&src) else { continue };
        let got = p.numbered().max_number();
        let d = got.abs_diff(size);
        if d == 0 {
            return src;
        }
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, src));
        }
    }
    best.map(|b| b.1).unwrap_or_else(|| "(a|b)*".into())
}

/// Printable members of a set, falling back to any member.
fn pick_byte<R: Rng>(rng: &mut R, set: &crate::charset::ByteSet) -> u8 {
    let printable: Vec<u8> = set.iter().filter(|b| b.is_ascii_graphic()).collect();
    if let Some(&b) = printable.choose(rng) {
        return b;
    }
    let all: Vec<u8> = set.iter().collect();
    *all.choose(rng).expect("terminal with an empty set")
}

/// Distance in arcs from each segment to a final segment.
fn distance_to_final(parser: &ReParser) -> Vec<usize> {
    let t = parser.table();
    let l = t.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); l];
    for q in 0..l {
        for s in t.folseg(q as SegmentId).iter() {
            preds[s].push(q);
        }
    }
    let mut dist = vec![usize::MAX; l];
    let mut queue = VecDeque::new();
    for f in t.finals().iter() {
        dist[f] = 0;
        queue.push_back(f);
    }
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if dist[p] == usize::MAX {
                dist[p] = dist[q] + 1;
                queue.push_back(p);
            }
        }
    }
    dist
}

/// A random accepted text of length close to `len` (shorter when the
/// language forces it, longer by at most the distance to a final segment).
pub fn random_text<R: Rng>(rng: &mut R, parser: &ReParser, len: usize) -> Vec<u8> {
    let t = parser.table();
    let nre = parser.numbered();
    let dist = distance_to_final(parser);
    let mut out = Vec::with_capacity(len + 16);
    let init: Vec<usize> = t.initial().iter().filter(|&q| dist[q] != usize::MAX).collect();
    let pick = |rng: &mut R, cands: &[usize], dist: &[usize], closing: bool| -> usize {
        if closing {
            *cands.iter().min_by_key(|&&q| dist[q]).unwrap()
        } else {
            // prefer continuing over finishing early
            let open: Vec<usize> = cands.iter().copied().filter(|&q| dist[q] > 0).collect();
            *open.choose(rng).or_else(|| cands.choose(rng)).unwrap()
        }
    };
    let mut q = pick(rng, &init, &dist, len == 0);
    loop {
        let seg = t.segment(q as SegmentId);
        let Some(term) = nre.terminal_of(seg.end) else { break };
        out.push(pick_byte(rng, &term.set));
        let succ: Vec<usize> = t.folseg(q as SegmentId).iter().filter(|&s| dist[s] != usize::MAX).collect();
        q = pick(rng, &succ, &dist, out.len() >= len);
    }
    out
}

/// One byte per alphabet class, printable when the class has one. The
/// class of bytes the expression never mentions is included when non-empty.
pub fn test_alphabet(parser: &ReParser) -> Vec<u8> {
    let mut out: Vec<u8> = parser
        .partition()
        .classes()
        .iter()
        .filter_map(|c| c.iter().find(|b| b.is_ascii_graphic()).or(c.min()))
        .collect();
    out.sort_unstable();
    out
}

/// All strings over `alphabet` of length at most `max_len`, shortest first.
pub fn all_strings(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * alphabet.len());
        for s in &layer {
            for &b in alphabet {
                let mut t: Vec<u8> = s.clone();
                t.push(b);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn texts_are_accepted() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let src = random_re(&mut rng, 6, 12);
            let p = ReParser::new(&src).unwrap();
            for len in [0, 1, 5, 40] {
                let t = random_text(&mut rng, &p, len);
                assert!(crate::recognize_serial(&p, &t), "{src} {:?}", String::from_utf8_lossy(&t));
            }
        }
    }

    #[test]
    fn string_counts() {
        assert_eq!(all_strings(b"ab", 3).len(), 1 + 2 + 4 + 8);
        assert_eq!(all_strings(b"", 3).len(), 1);
    }
}
