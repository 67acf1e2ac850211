//! Surface syntax: parser and printer for regular expressions.
//!
//! Operators: `|`, concatenation, `*`, `+`, `?`, `{h}`, `{h,}`, `{h,k}`,
//! parentheses, `[...]` classes (with `^` negation and ranges), `.` (any byte
//! except newline) and `\` escapes. An empty alternative or `()` denotes the
//! empty string.

use crate::charset::{fmt_byte, ByteSet};
use crate::error::ReError;
use std::fmt;

/// Largest count accepted in a bounded repetition.
pub const MAX_REPEAT: u32 = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug)]
pub enum AstKind {
    Terminal(u8),
    Epsilon,
    Class { negated: bool, items: Vec<(u8, u8)> },
    Wildcard,
    Concat(Vec<Ast>),
    Union(Vec<Ast>),
    Star(Box<Ast>),
    Cross(Box<Ast>),
    Optional(Box<Ast>),
    Repeat { min: u32, max: Option<u32>, body: Box<Ast> },
    Group(Box<Ast>),
}

/// A syntax tree node. Equality ignores spans.
#[derive(Clone, Debug)]
pub struct Ast {
    pub kind: AstKind,
    pub span: Span,
}

impl PartialEq for Ast {
    fn eq(&self, o: &Ast) -> bool {
        use AstKind::*;
        match (&self.kind, &o.kind) {
            (Terminal(a), Terminal(b)) => a == b,
            (Epsilon, Epsilon) | (Wildcard, Wildcard) => true,
            (Class { negated: n1, items: i1 }, Class { negated: n2, items: i2 }) => {
                n1 == n2 && i1 == i2
            }
            (Concat(a), Concat(b)) | (Union(a), Union(b)) => a == b,
            (Star(a), Star(b))
            | (Cross(a), Cross(b))
            | (Optional(a), Optional(b))
            | (Group(a), Group(b)) => a == b,
            (
                Repeat { min: m1, max: x1, body: b1 },
                Repeat { min: m2, max: x2, body: b2 },
            ) => m1 == m2 && x1 == x2 && b1 == b2,
            _ => false,
        }
    }
}

impl Ast {
    pub fn new(kind: AstKind) -> Ast {
        Ast { kind, span: Span::default() }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(
            self.kind,
            AstKind::Terminal(_) | AstKind::Epsilon | AstKind::Class { .. } | AstKind::Wildcard
        )
    }

    /// Bytes matched by a leaf; `None` for epsilon and operators.
    pub fn leaf_set(&self) -> Option<ByteSet> {
        match &self.kind {
            AstKind::Terminal(b) => Some(ByteSet::single(*b)),
            AstKind::Wildcard => Some(ByteSet::single(b'\n').complement()),
            AstKind::Class { negated, items } => {
                let mut s = ByteSet::empty();
                for &(lo, hi) in items {
                    s = s.union(&ByteSet::range(lo, hi));
                }
                Some(if *negated { s.complement() } else { s })
            }
            _ => None,
        }
    }

    /// Source-like label of a leaf, used when rendering numbered symbols.
    pub fn leaf_label(&self) -> String {
        match &self.kind {
            AstKind::Terminal(b) => fmt_byte(*b, false),
            AstKind::Wildcard => ".".into(),
            AstKind::Epsilon => "ε".into(),
            AstKind::Class { .. } => self.to_string(),
            _ => String::new(),
        }
    }
}

/// Parses a regular expression.
pub fn parse_re(source: &str) -> Result<Ast, ReError> {
    if source.is_empty() {
        return Err(ReError::Syntax { offset: 0, message: "empty expression".into() });
    }
    if let Some(off) = source.bytes().position(|b| b >= 0x80) {
        return Err(ReError::Unsupported {
            offset: off,
            construct: "non-ASCII character (use \\xHH)".into(),
        });
    }
    let mut p = Parser { src: source.as_bytes(), pos: 0 };
    let ast = p.alt()?;
    if p.pos < p.src.len() {
        // only an unmatched ')' can stop the top-level alternation
        return Err(p.syntax("unmatched ')'"));
    }
    Ok(ast)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn syntax(&self, msg: &str) -> ReError {
        ReError::Syntax { offset: self.pos, message: msg.into() }
    }

    fn unsupported(&self, at: usize, what: &str) -> ReError {
        ReError::Unsupported { offset: at, construct: what.into() }
    }

    fn alt(&mut self) -> Result<Ast, ReError> {
        let start = self.pos;
        let mut alts = vec![self.concat()?];
        while self.peek() == Some(b'|') {
            self.pos += 1;
            alts.push(self.concat()?);
        }
        let span = Span { start, end: self.pos };
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Ast { kind: AstKind::Union(alts), span }
        })
    }

    fn concat(&mut self) -> Result<Ast, ReError> {
        let start = self.pos;
        let mut items = Vec::new();
        while let Some(c) = self.peek() {
            if c == b'|' || c == b')' {
                break;
            }
            items.push(self.repeat()?);
        }
        let span = Span { start, end: self.pos };
        Ok(match items.len() {
            0 => Ast { kind: AstKind::Epsilon, span },
            1 => items.pop().unwrap(),
            _ => Ast { kind: AstKind::Concat(items), span },
        })
    }

    fn repeat(&mut self) -> Result<Ast, ReError> {
        let start = self.pos;
        let mut node = self.atom()?;
        let mut quantified = false;
        loop {
            let qpos = self.pos;
            let kind = match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    AstKind::Star(Box::new(node))
                }
                Some(b'+') => {
                    if quantified {
                        return Err(self.unsupported(qpos, "possessive quantifier"));
                    }
                    self.pos += 1;
                    AstKind::Cross(Box::new(node))
                }
                Some(b'?') => {
                    if quantified {
                        return Err(self.unsupported(qpos, "lazy quantifier"));
                    }
                    self.pos += 1;
                    AstKind::Optional(Box::new(node))
                }
                Some(b'{') => {
                    let (min, max) = self.bounds()?;
                    AstKind::Repeat { min, max, body: Box::new(node) }
                }
                _ => break,
            };
            node = Ast { kind, span: Span { start, end: self.pos } };
            quantified = true;
        }
        Ok(node)
    }

    fn number(&mut self) -> Result<Option<u32>, ReError> {
        let s = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if s == self.pos {
            return Ok(None);
        }
        let text = std::str::from_utf8(&self.src[s..self.pos]).unwrap();
        match text.parse::<u32>() {
            Ok(v) if v <= MAX_REPEAT => Ok(Some(v)),
            _ => Err(self.unsupported(s, "repetition count above 1000")),
        }
    }

    fn bounds(&mut self) -> Result<(u32, Option<u32>), ReError> {
        let open = self.pos;
        self.pos += 1;
        let Some(min) = self.number()? else {
            return Err(self.syntax("expected repetition count"));
        };
        let max = match self.peek() {
            Some(b'}') => Some(min),
            Some(b',') => {
                self.pos += 1;
                self.number()?
            }
            _ => return Err(self.syntax("malformed repetition")),
        };
        if self.peek() != Some(b'}') {
            return Err(self.syntax("expected '}'"));
        }
        self.pos += 1;
        if let Some(k) = max {
            if k < min {
                return Err(ReError::Syntax {
                    offset: open,
                    message: "repetition bounds out of order".into(),
                });
            }
        }
        Ok((min, max))
    }

    fn atom(&mut self) -> Result<Ast, ReError> {
        let start = self.pos;
        let c = self.peek().unwrap();
        let kind = match c {
            b'(' => {
                self.pos += 1;
                if self.peek() == Some(b'?') {
                    return Err(self.unsupported(start, "group modifier or lookaround"));
                }
                let inner = self.alt()?;
                if self.peek() != Some(b')') {
                    return Err(ReError::Syntax { offset: start, message: "unclosed '('".into() });
                }
                self.pos += 1;
                AstKind::Group(Box::new(inner))
            }
            b'[' => self.class()?,
            b'.' => {
                self.pos += 1;
                AstKind::Wildcard
            }
            b'\\' => AstKind::Terminal(self.escape(false)?),
            b'*' | b'+' | b'?' | b'{' => return Err(self.syntax("quantifier without operand")),
            b'^' | b'$' => return Err(self.unsupported(start, "anchor")),
            _ => {
                self.pos += 1;
                AstKind::Terminal(c)
            }
        };
        Ok(Ast { kind, span: Span { start, end: self.pos } })
    }

    /// Parses an escape at `self.pos` (which holds the backslash).
    fn escape(&mut self, in_class: bool) -> Result<u8, ReError> {
        let at = self.pos;
        self.pos += 1;
        let Some(c) = self.peek() else {
            return Err(self.syntax("dangling escape"));
        };
        self.pos += 1;
        Ok(match c {
            b'n' => b'\n',
            b't' => b'\t',
            b'r' => b'\r',
            b'f' => 0x0c,
            b'v' => 0x0b,
            b'0' => 0,
            b'x' => {
                let hex = self.src.get(self.pos..self.pos + 2).ok_or_else(|| self.syntax("expected two hex digits"))?;
                let v = std::str::from_utf8(hex)
                    .ok()
                    .and_then(|h| u8::from_str_radix(h, 16).ok())
                    .ok_or_else(|| self.syntax("expected two hex digits"))?;
                self.pos += 2;
                v
            }
            b'1'..=b'9' => return Err(self.unsupported(at, "backreference")),
            b'b' | b'B' | b'A' | b'z' | b'Z' if !in_class => {
                return Err(self.unsupported(at, "anchor"))
            }
            b'd' | b'D' | b'w' | b'W' | b's' | b'S' | b'p' | b'P' | b'k' | b'b' => {
                return Err(self.unsupported(at, "escape class"))
            }
            _ => c,
        })
    }

    fn class(&mut self) -> Result<AstKind, ReError> {
        let open = self.pos;
        self.pos += 1;
        let negated = self.peek() == Some(b'^');
        if negated {
            self.pos += 1;
        }
        let mut items = Vec::new();
        let mut first = true;
        loop {
            let Some(c) = self.peek() else {
                return Err(ReError::Syntax { offset: open, message: "unclosed '['".into() });
            };
            if c == b']' && !first {
                self.pos += 1;
                break;
            }
            first = false;
            let lo = self.class_byte()?;
            let hi = if self.peek() == Some(b'-') && self.src.get(self.pos + 1) != Some(&b']') {
                self.pos += 1;
                if self.peek().is_none() {
                    return Err(ReError::Syntax { offset: open, message: "unclosed '['".into() });
                }
                self.class_byte()?
            } else {
                lo
            };
            if hi < lo {
                return Err(self.syntax("class range out of order"));
            }
            items.push((lo, hi));
        }
        Ok(AstKind::Class { negated, items })
    }

    fn class_byte(&mut self) -> Result<u8, ReError> {
        let c = self.peek().unwrap();
        if c == b'\\' {
            self.escape(true)
        } else {
            self.pos += 1;
            Ok(c)
        }
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AstKind::Terminal(b) => write!(f, "{}", fmt_byte(*b, false)),
            AstKind::Epsilon => Ok(()),
            AstKind::Wildcard => write!(f, "."),
            AstKind::Class { negated, items } => {
                write!(f, "[{}", if *negated { "^" } else { "" })?;
                for &(lo, hi) in items {
                    if lo == hi {
                        write!(f, "{}", fmt_byte(lo, true))?;
                    } else {
                        write!(f, "{}-{}", fmt_byte(lo, true), fmt_byte(hi, true))?;
                    }
                }
                write!(f, "]")
            }
            AstKind::Concat(items) => items.iter().try_for_each(|i| write!(f, "{i}")),
            AstKind::Union(alts) => {
                for (i, a) in alts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "|")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
            AstKind::Star(b) => write!(f, "{b}*"),
            AstKind::Cross(b) => write!(f, "{b}+"),
            AstKind::Optional(b) => write!(f, "{b}?"),
            AstKind::Repeat { min, max, body } => match max {
                Some(k) if k == min => write!(f, "{body}{{{min}}}"),
                Some(k) => write!(f, "{body}{{{min},{k}}}"),
                None => write!(f, "{body}{{{min},}}"),
            },
            AstKind::Group(b) => write!(f, "({b})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(b: u8) -> Ast {
        Ast::new(AstKind::Terminal(b))
    }

    #[test]
    fn concat_is_flattened() {
        let a = parse_re("abc").unwrap();
        assert_eq!(a, Ast::new(AstKind::Concat(vec![t(b'a'), t(b'b'), t(b'c')])));
    }

    #[test]
    fn union_of_groups() {
        let a = parse_re("(a|ab|aba)+").unwrap();
        let AstKind::Cross(g) = &a.kind else { panic!() };
        let AstKind::Group(u) = &g.kind else { panic!() };
        let AstKind::Union(alts) = &u.kind else { panic!() };
        assert_eq!(alts.len(), 3);
    }

    #[test]
    fn bounded_repeat_forms() {
        for (src, min, max) in [("a{3}", 3, Some(3)), ("a{2,}", 2, None), ("a{1,4}", 1, Some(4))] {
            match parse_re(src).unwrap().kind {
                AstKind::Repeat { min: m, max: x, .. } => assert_eq!((m, x), (min, max)),
                k => panic!("{k:?}"),
            }
        }
    }

    #[test]
    fn empty_alternative_is_epsilon() {
        let a = parse_re("(a|)b").unwrap();
        let AstKind::Concat(items) = &a.kind else { panic!() };
        let AstKind::Group(u) = &items[0].kind else { panic!() };
        let AstKind::Union(alts) = &u.kind else { panic!() };
        assert!(matches!(alts[1].kind, AstKind::Epsilon));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_re("(a|b"), Err(ReError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_re("a)"), Err(ReError::Syntax { offset: 1, .. })));
        assert!(matches!(parse_re("*a"), Err(ReError::Syntax { .. })));
        assert!(matches!(parse_re("a{3,1}"), Err(ReError::Syntax { .. })));
        assert!(matches!(parse_re("(a)\\1"), Err(ReError::Unsupported { offset: 3, .. })));
        assert!(matches!(parse_re("a*?"), Err(ReError::Unsupported { .. })));
        assert!(matches!(parse_re("(?=a)"), Err(ReError::Unsupported { .. })));
        assert!(matches!(parse_re("^a"), Err(ReError::Unsupported { .. })));
        assert!(matches!(parse_re(""), Err(ReError::Syntax { .. })));
    }

    #[test]
    fn classes_and_escapes() {
        let a = parse_re("[^a-c\\]x-]").unwrap();
        let set = a.leaf_set().unwrap();
        assert!(!set.contains(b'b') && !set.contains(b']') && !set.contains(b'-'));
        assert!(set.contains(b'z'));
        assert_eq!(parse_re("\\x41").unwrap(), t(b'A'));
        assert_eq!(parse_re("\\(").unwrap(), t(b'('));
        assert!(!parse_re(".").unwrap().leaf_set().unwrap().contains(b'\n'));
    }

    #[test]
    fn print_roundtrip() {
        for src in ["(a|ab|aba)+", "(ab|a)*", "a{2,5}b{3}c{1,}", "[^a-z\\]]x.", "(a|)b", "\\*\\n", "((a))?*"] {
            let a = parse_re(src).unwrap();
            let printed = a.to_string();
            assert_eq!(parse_re(&printed).unwrap(), a, "{src} -> {printed}");
        }
    }
}
