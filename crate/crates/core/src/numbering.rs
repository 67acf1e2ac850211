//! Numbered regular expressions.
//!
//! Every terminal and epsilon gets a number, every operator gets a numbered
//! pair of parentheses `i( ... )i`. Numbers follow a left-to-right preorder
//! walk. Parentheses written by the user around an operator are transparent;
//! around a leaf they become a numbered pair of kind `Group`. Bounded
//! repetitions are expanded into copies with fresh numbers.

use crate::ast::{Ast, AstKind, Span};
use crate::charset::ByteSet;
use std::fmt;

/// Index of a numbered symbol in textual order.
pub type Pos = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Open,
    Terminal,
    Epsilon,
    Close,
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub kind: SymbolKind,
    /// Operator or leaf number; `u32::MAX` for the end mark.
    pub number: u32,
    /// Index into the terminal table when `kind == Terminal`.
    pub terminal: Option<u32>,
}

impl Symbol {
    pub fn is_paren(&self) -> bool {
        matches!(self.kind, SymbolKind::Open | SymbolKind::Close)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    /// Implicit pair around a root that is a single leaf.
    Root,
    /// User parentheses around a leaf.
    Group,
    Concat,
    Union,
    Star,
    Cross,
    Optional,
    Repeat { min: u32, max: Option<u32> },
}

#[derive(Clone, Debug)]
pub struct OpInfo {
    pub number: u32,
    pub kind: OpKind,
    /// Enclosing operator, `None` for the root.
    pub parent: Option<u32>,
    /// Direct numbered children, in order.
    pub children: Vec<u32>,
    pub span: Span,
    /// `(repeat number, copy index)` when created inside a bounded repetition.
    pub iteration: Option<(u32, u32)>,
    pub open: Pos,
    pub close: Pos,
}

#[derive(Clone, Debug)]
pub struct TerminalInfo {
    pub number: u32,
    pub set: ByteSet,
    pub label: String,
}

/// The numbered expression as a tree over symbol positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NTree {
    Sym(Pos),
    Seq(Vec<NTree>),
    Alt(Vec<NTree>),
    Star(Box<NTree>),
    Plus(Box<NTree>),
    Opt(Box<NTree>),
}

#[derive(Clone, Debug)]
pub struct NumberedRe {
    symbols: Vec<Symbol>,
    ops: Vec<OpInfo>,
    terminals: Vec<TerminalInfo>,
    /// Position of each numbered leaf, indexed by number (0 unused).
    leaf_pos: Vec<Option<Pos>>,
    tree: NTree,
    max_number: u32,
}

impl NumberedRe {
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, p: Pos) -> &Symbol {
        &self.symbols[p as usize]
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Operators in number order.
    pub fn ops(&self) -> impl Iterator<Item = &OpInfo> {
        self.ops.iter()
    }

    pub fn op(&self, number: u32) -> Option<&OpInfo> {
        self.ops.iter().find(|o| o.number == number)
    }

    pub fn terminals(&self) -> &[TerminalInfo] {
        &self.terminals
    }

    pub fn terminal_of(&self, p: Pos) -> Option<&TerminalInfo> {
        self.symbols[p as usize].terminal.map(|t| &self.terminals[t as usize])
    }

    pub fn leaf_pos(&self, number: u32) -> Option<Pos> {
        self.leaf_pos.get(number as usize).copied().flatten()
    }

    pub fn tree(&self) -> &NTree {
        &self.tree
    }

    pub fn root_open(&self) -> Pos {
        0
    }

    pub fn end_pos(&self) -> Pos {
        (self.symbols.len() - 1) as Pos
    }

    /// Highest number in use; this is the size of the numbered expression.
    pub fn max_number(&self) -> u32 {
        self.max_number
    }

    pub fn render_symbol(&self, p: Pos) -> String {
        let s = &self.symbols[p as usize];
        match s.kind {
            SymbolKind::Open => format!("{}(", s.number),
            SymbolKind::Close => format!("){}", s.number),
            SymbolKind::Epsilon => format!("ε{}", s.number),
            SymbolKind::End => "⊣".into(),
            SymbolKind::Terminal => {
                format!("{}{}", self.terminals[s.terminal.unwrap() as usize].label, s.number)
            }
        }
    }

    pub fn render_symbols(&self, ps: &[Pos]) -> String {
        ps.iter().map(|&p| self.render_symbol(p)).collect::<Vec<_>>().join(" ")
    }

    fn render_tree(&self, t: &NTree, out: &mut String) {
        match t {
            NTree::Sym(p) => out.push_str(&self.render_symbol(*p)),
            NTree::Seq(items) => {
                // an operator pair is a Seq that starts with an open paren
                let pair = match (items.first(), items.last()) {
                    (Some(NTree::Sym(a)), Some(NTree::Sym(b))) if items.len() >= 2 => {
                        self.symbols[*a as usize].kind == SymbolKind::Open
                            && self.symbols[*b as usize].kind == SymbolKind::Close
                    }
                    _ => false,
                };
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    self.render_tree(it, out);
                }
                if pair {
                    let NTree::Sym(open) = items[0] else { unreachable!() };
                    match self.op(self.symbols[open as usize].number).map(|o| o.kind) {
                        Some(OpKind::Star) => out.push('*'),
                        Some(OpKind::Cross) => out.push('+'),
                        Some(OpKind::Optional) => out.push('?'),
                        _ => {}
                    }
                }
            }
            NTree::Alt(items) => {
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" | ");
                    }
                    self.render_tree(it, out);
                }
            }
            NTree::Star(b) | NTree::Plus(b) | NTree::Opt(b) => self.render_tree(b, out),
        }
    }
}

impl fmt::Display for NumberedRe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        // the end mark is not part of the displayed expression
        let NTree::Seq(top) = &self.tree else { unreachable!() };
        self.render_tree(&top[0], &mut s);
        f.write_str(&s)
    }
}

struct Numberer {
    next: u32,
    symbols: Vec<Symbol>,
    ops: Vec<OpInfo>,
    terminals: Vec<TerminalInfo>,
    parents: Vec<u32>,
    iteration: Option<(u32, u32)>,
}

impl Numberer {
    fn take(&mut self) -> u32 {
        let n = self.next;
        self.next += 1;
        n
    }

    fn push(&mut self, kind: SymbolKind, number: u32, terminal: Option<u32>) -> Pos {
        self.symbols.push(Symbol { kind, number, terminal });
        (self.symbols.len() - 1) as Pos
    }

    fn leaf(&mut self, ast: &Ast) -> NTree {
        let n = self.take();
        let p = match ast.leaf_set() {
            Some(set) => {
                self.terminals.push(TerminalInfo { number: n, set, label: ast.leaf_label() });
                let t = (self.terminals.len() - 1) as u32;
                self.push(SymbolKind::Terminal, n, Some(t))
            }
            None => self.push(SymbolKind::Epsilon, n, None),
        };
        NTree::Sym(p)
    }

    /// Opens a numbered pair, runs `inner`, closes the pair.
    fn pair(
        &mut self,
        kind: OpKind,
        span: Span,
        inner: impl FnOnce(&mut Self) -> NTree,
        wrap: impl FnOnce(NTree) -> NTree,
    ) -> NTree {
        let n = self.take();
        let parent = self.parents.last().copied();
        if let Some(p) = parent {
            if let Some(op) = self.ops.iter_mut().find(|o| o.number == p) {
                op.children.push(n);
            }
        }
        let open = self.push(SymbolKind::Open, n, None);
        self.ops.push(OpInfo {
            number: n,
            kind,
            parent,
            children: Vec::new(),
            span,
            iteration: self.iteration,
            open,
            close: open,
        });
        let idx = self.ops.len() - 1;
        self.parents.push(n);
        let body = inner(self);
        self.parents.pop();
        let close = self.push(SymbolKind::Close, n, None);
        self.ops[idx].close = close;
        NTree::Seq(vec![NTree::Sym(open), wrap(body), NTree::Sym(close)])
    }

    fn node(&mut self, ast: &Ast) -> NTree {
        match &ast.kind {
            AstKind::Terminal(_) | AstKind::Class { .. } | AstKind::Wildcard | AstKind::Epsilon => {
                self.leaf(ast)
            }
            AstKind::Group(_) => {
                let core = strip_groups(ast);
                if core.is_leaf() {
                    self.pair(OpKind::Group, ast.span, |s| s.leaf(core), |t| t)
                } else {
                    self.node(core)
                }
            }
            AstKind::Concat(items) => self.pair(
                OpKind::Concat,
                ast.span,
                |s| NTree::Seq(items.iter().map(|i| s.node(i)).collect()),
                |t| t,
            ),
            AstKind::Union(items) => self.pair(
                OpKind::Union,
                ast.span,
                |s| NTree::Alt(items.iter().map(|i| s.node(i)).collect()),
                |t| t,
            ),
            AstKind::Star(b) => self.pair(OpKind::Star, ast.span, |s| s.node(b), |t| NTree::Star(Box::new(t))),
            AstKind::Cross(b) => self.pair(OpKind::Cross, ast.span, |s| s.node(b), |t| NTree::Plus(Box::new(t))),
            AstKind::Optional(b) => {
                self.pair(OpKind::Optional, ast.span, |s| s.node(b), |t| NTree::Opt(Box::new(t)))
            }
            AstKind::Repeat { min, max, body } => {
                let (min, max) = (*min, *max);
                self.pair(
                    OpKind::Repeat { min, max },
                    ast.span,
                    |s| {
                        let rep = s.next - 1;
                        let saved = s.iteration;
                        let mut items = Vec::new();
                        for i in 0..min {
                            s.iteration = Some((rep, i + 1));
                            items.push(s.node(body));
                        }
                        match max {
                            None => {
                                s.iteration = Some((rep, min + 1));
                                items.push(s.pair(
                                    OpKind::Star,
                                    body.span,
                                    |s| s.node(body),
                                    |t| NTree::Star(Box::new(t)),
                                ));
                            }
                            Some(k) if k > min => items.push(s.optional_chain(body, rep, min + 1, k)),
                            Some(_) => {}
                        }
                        s.iteration = saved;
                        NTree::Seq(items)
                    },
                    |t| t,
                )
            }
        }
    }

    /// `o( copy_i o'( copy_{i+1} ... )o' )o` for copies `i..=k`.
    fn optional_chain(&mut self, body: &Ast, rep: u32, i: u32, k: u32) -> NTree {
        self.iteration = Some((rep, i));
        self.pair(
            OpKind::Optional,
            body.span,
            |s| {
                let mut seq = vec![s.node(body)];
                if i < k {
                    seq.push(s.optional_chain(body, rep, i + 1, k));
                }
                NTree::Seq(seq)
            },
            |t| NTree::Opt(Box::new(t)),
        )
    }
}

fn strip_groups(mut ast: &Ast) -> &Ast {
    while let AstKind::Group(inner) = &ast.kind {
        ast = inner;
    }
    ast
}

/// Numbers the expression. The returned tree is `Seq[root, ⊣]`.
pub fn number_re(ast: &Ast) -> NumberedRe {
    let mut nb = Numberer {
        next: 1,
        symbols: Vec::new(),
        ops: Vec::new(),
        terminals: Vec::new(),
        parents: Vec::new(),
        iteration: None,
    };
    let root = if ast.is_leaf() {
        nb.pair(OpKind::Root, ast.span, |s| s.leaf(ast), |t| t)
    } else {
        nb.node(ast)
    };
    let max_number = nb.next - 1;
    let end = nb.push(SymbolKind::End, u32::MAX, None);
    let mut leaf_pos = vec![None; nb.next as usize];
    for (i, s) in nb.symbols.iter().enumerate() {
        if matches!(s.kind, SymbolKind::Terminal | SymbolKind::Epsilon) {
            leaf_pos[s.number as usize] = Some(i as Pos);
        }
    }
    nb.ops.sort_by_key(|o| o.number);
    NumberedRe {
        symbols: nb.symbols,
        ops: nb.ops,
        terminals: nb.terminals,
        leaf_pos,
        tree: NTree::Seq(vec![root, NTree::Sym(end)]),
        max_number,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_re;

    fn show(src: &str) -> String {
        number_re(&parse_re(src).unwrap()).to_string()
    }

    #[test]
    fn worked_examples() {
        assert_eq!(show("(a|ab|aba)+"), "1( 2( a3 | 4( a5 b6 )4 | 7( a8 b9 a10 )7 )2 )1+");
        assert_eq!(show("(ab|a)*"), "1( 2( 3( a4 b5 )3 | a6 )2 )1*");
        assert_eq!(show("(a|b|ab)+"), "1( 2( a3 | b4 | 5( a6 b7 )5 )2 )1+");
        assert_eq!(show("(a*|ab)+"), "1( 2( 3( a4 )3* | 5( a6 b7 )5 )2 )1+");
        assert_eq!(show("(a|)b"), "1( 2( a3 | ε4 )2 b5 )1");
    }

    #[test]
    fn single_leaf_root() {
        let n = number_re(&parse_re("a").unwrap());
        assert_eq!(n.to_string(), "1( a2 )1");
        assert_eq!(n.op(1).unwrap().kind, OpKind::Root);
        assert_eq!(show("((a))"), "1( a2 )1");
    }

    #[test]
    fn nested_concat_keeps_its_pair() {
        assert_eq!(show("a(bc)"), "1( a2 3( b4 c5 )3 )1");
        assert_eq!(show("a|(b)"), "1( a2 | 3( b4 )3 )1");
    }

    #[test]
    fn exact_repeat_copies() {
        let n = number_re(&parse_re("(a|b)*a(a|b){2}").unwrap());
        assert_eq!(
            n.to_string(),
            "1( 2( 3( a4 | b5 )3 )2* a6 7( 8( a9 | b10 )8 11( a12 | b13 )11 )7 )1"
        );
        assert_eq!(n.max_number(), 3 * 2 + 7);
        assert_eq!(n.op(11).unwrap().iteration, Some((7, 2)));
    }

    #[test]
    fn open_and_ranged_repeats() {
        assert_eq!(show("a{3}"), "1( a2 a3 a4 )1");
        assert_eq!(show("a{1,}"), "1( a2 3( a4 )3* )1");
        assert_eq!(show("a{1,3}"), "1( a2 3( a4 5( a6 )5? )3? )1");
    }

    #[test]
    fn op_tree_links() {
        let n = number_re(&parse_re("(ab|a)*").unwrap());
        assert_eq!(n.op(1).unwrap().children, vec![2]);
        assert_eq!(n.op(2).unwrap().children, vec![3]);
        assert_eq!(n.op(3).unwrap().parent, Some(2));
        assert_eq!(n.op(2).unwrap().kind, OpKind::Union);
        assert_eq!(n.render_symbol(n.end_pos()), "⊣");
    }
}
