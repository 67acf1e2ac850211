//! Follower sets of the numbered symbols (with parentheses as letters).

use crate::numbering::{NTree, NumberedRe, Pos};

/// `fol[p]` holds the symbols that may immediately follow `p` in a linearized
/// syntax tree; `pred[p]` is the inverse relation.
#[derive(Clone, Debug)]
pub struct Followers {
    pub fol: Vec<Vec<Pos>>,
    pub pred: Vec<Vec<Pos>>,
}

impl Followers {
    pub fn follows(&self, a: Pos, b: Pos) -> bool {
        self.fol[a as usize].binary_search(&b).is_ok()
    }
}

struct Info {
    nullable: bool,
    first: Vec<Pos>,
    last: Vec<Pos>,
}

fn walk(t: &NTree, fol: &mut [Vec<Pos>]) -> Info {
    match t {
        NTree::Sym(p) => Info { nullable: false, first: vec![*p], last: vec![*p] },
        NTree::Seq(items) => {
            let mut acc = Info { nullable: true, first: vec![], last: vec![] };
            for it in items {
                let i = walk(it, fol);
                for &l in &acc.last {
                    fol[l as usize].extend_from_slice(&i.first);
                }
                if acc.nullable {
                    acc.first.extend_from_slice(&i.first);
                }
                if i.nullable {
                    acc.last.extend_from_slice(&i.last);
                } else {
                    acc.last = i.last;
                }
                acc.nullable &= i.nullable;
            }
            acc
        }
        NTree::Alt(items) => {
            let mut acc = Info { nullable: false, first: vec![], last: vec![] };
            for it in items {
                let i = walk(it, fol);
                acc.nullable |= i.nullable;
                acc.first.extend(i.first);
                acc.last.extend(i.last);
            }
            acc
        }
        NTree::Star(b) | NTree::Plus(b) | NTree::Opt(b) => {
            let mut i = walk(b, fol);
            if !matches!(t, NTree::Opt(_)) {
                for &l in &i.last {
                    fol[l as usize].extend_from_slice(&i.first);
                }
            }
            if !matches!(t, NTree::Plus(_)) {
                i.nullable = true;
            }
            i
        }
    }
}

/// Computes the follower relation of the numbered expression with the end
/// mark appended.
pub fn classic_followers(nre: &NumberedRe) -> Followers {
    let n = nre.len();
    let mut fol = vec![Vec::new(); n];
    walk(nre.tree(), &mut fol);
    let mut pred = vec![Vec::new(); n];
    for (a, f) in fol.iter_mut().enumerate() {
        f.sort_unstable();
        f.dedup();
        for &b in f.iter() {
            pred[b as usize].push(a as Pos);
        }
    }
    Followers { fol, pred }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_re;
    use crate::numbering::number_re;

    fn fol_text(src: &str) -> Vec<String> {
        let nre = number_re(&parse_re(src).unwrap());
        let f = classic_followers(&nre);
        (0..nre.len() as Pos)
            .map(|p| {
                let fs: Vec<String> = f.fol[p as usize].iter().map(|&q| nre.render_symbol(q)).collect();
                format!("{} -> {}", nre.render_symbol(p), fs.join(","))
            })
            .collect()
    }

    #[test]
    fn followers_of_star_of_union() {
        let got = fol_text("(ab|a)*");
        let want = [
            "1( -> 2(,)1",
            "2( -> 3(,a6",
            "3( -> a4",
            "a4 -> b5",
            "b5 -> )3",
            ")3 -> )2",
            "a6 -> )2",
            ")2 -> 2(,)1",
            ")1 -> ⊣",
            "⊣ -> ",
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn epsilon_is_a_letter() {
        let got = fol_text("(a|)b");
        assert!(got.contains(&"2( -> a3,ε4".to_string()));
        assert!(got.contains(&"ε4 -> )2".to_string()));
    }
}
