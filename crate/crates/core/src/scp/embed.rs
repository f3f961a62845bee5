//! Homeomorphic embedding on configurations.
//!
//! Expressions are viewed as right-branching spines `t1 : (t2 : (... : nil))`
//! so a sequence can dive past a prefix of the other.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::lang::{Expr, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Label {
    Nil,
    Cons,
    Sym(Symbol),
    SVar,
    EVar,
    Bracket,
    Call(String),
}

struct Tree {
    labels: Vec<Label>,
    children: Vec<Vec<usize>>,
}

impl Tree {
    fn build(e: &Expr) -> (Tree, usize) {
        let mut t = Tree { labels: Vec::new(), children: Vec::new() };
        let root = t.spine(e.terms());
        (t, root)
    }

    fn node(&mut self, label: Label, children: Vec<usize>) -> usize {
        self.labels.push(label);
        self.children.push(children);
        self.labels.len() - 1
    }

    fn spine(&mut self, terms: &[Term]) -> usize {
        let mut tail = self.node(Label::Nil, Vec::new());
        for t in terms.iter().rev() {
            let head = self.term(t);
            tail = self.node(Label::Cons, alloc::vec![head, tail]);
        }
        tail
    }

    fn term(&mut self, t: &Term) -> usize {
        match t {
            Term::Sym(s) => self.node(Label::Sym(s.clone()), Vec::new()),
            Term::SVar(_) => self.node(Label::SVar, Vec::new()),
            Term::EVar(_) => self.node(Label::EVar, Vec::new()),
            Term::Bracket(b) => {
                let body = self.spine(b.terms());
                self.node(Label::Bracket, alloc::vec![body])
            }
            Term::Call(f, a) => {
                let arg = self.spine(a.terms());
                self.node(Label::Call(f.clone()), alloc::vec![arg])
            }
        }
    }
}

struct Embedder<'a> {
    a: &'a Tree,
    b: &'a Tree,
    memo: BTreeMap<(usize, usize), bool>,
}

impl Embedder<'_> {
    fn embeds(&mut self, x: usize, y: usize) -> bool {
        if let Some(&r) = self.memo.get(&(x, y)) {
            return r;
        }
        let r = self.couple(x, y) || self.b.children[y].clone().into_iter().any(|c| self.embeds(x, c));
        self.memo.insert((x, y), r);
        r
    }

    fn couple(&mut self, x: usize, y: usize) -> bool {
        if self.a.labels[x] != self.b.labels[y] {
            return false;
        }
        let (cx, cy) = (self.a.children[x].clone(), self.b.children[y].clone());
        cx.len() == cy.len() && cx.into_iter().zip(cy).all(|(p, q)| self.embeds(p, q))
    }
}

/// `a ⊴ b`: `a` is homeomorphically embedded in `b`. Symbols embed only in
/// equal symbols, variables in variables of the same kind, calls in calls
/// of the same function.
pub fn embeds(a: &Expr, b: &Expr) -> bool {
    let (ta, ra) = Tree::build(a);
    let (tb, rb) = Tree::build(b);
    Embedder { a: &ta, b: &tb, memo: BTreeMap::new() }.embeds(ra, rb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn emb(a: &str, b: &str) -> bool {
        embeds(&parse_expr(a).unwrap(), &parse_expr(b).unwrap())
    }

    #[test]
    fn diving_and_coupling() {
        assert!(emb("e.x", "'a' e.x"));
        assert!(!emb("'a'", "'b'"));
        assert!(emb("'ab'", "'axb'"));
        assert!(!emb("'ab'", "'ba'"));
        assert!(emb("<F 'a'>", "<F 'ba'>"));
        assert!(!emb("<F 'a'>", "<G 'a'>"));
        assert!(emb("<F 'a'>", "<G <F 'a'>>"));
        assert!(emb("('a')", "(('a'))"));
        assert!(emb("s.x", "s.y"));
        assert!(!emb("s.x", "e.y"));
        assert!(emb("", "'abc'"));
    }

    #[test]
    fn reflexive() {
        for s in ["", "'a'", "<F (e.x 'b') s.y <G>>", "(()()())"] {
            assert!(emb(s, s));
        }
    }

    #[test]
    fn conserved_crowds_only_embed_when_equal() {
        assert!(!emb("<Int CC R (('mm')()())(()()('cc')) e.1>", "<Int CC R (('m')('p')())(()()('c')) e.2>"));
    }
}
