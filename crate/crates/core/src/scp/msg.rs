//! Most specific generalization of two configurations.

use alloc::vec::Vec;

use super::names::NameGen;
use crate::lang::{Expr, Substitution, Term, Var};

/// A common generalization `g` with `θa`, `θb` such that `g·θa = a` and
/// `g·θb = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generalization {
    pub general: Expr,
    pub left: Substitution,
    pub right: Substitution,
}

struct Msg<'g> {
    names: &'g mut NameGen,
    /// Abstractions made so far: equal pairs share one variable.
    seen: Vec<(Expr, Expr, Var)>,
    left: Substitution,
    right: Substitution,
}

fn symbol_like(t: &Term) -> bool {
    matches!(t, Term::Sym(_) | Term::SVar(_))
}

fn aligned(x: &Term, y: &Term) -> bool {
    match (x, y) {
        (Term::Bracket(_), Term::Bracket(_)) => true,
        (Term::Call(f, _), Term::Call(g, _)) => f == g,
        _ => x == y || (symbol_like(x) && symbol_like(y)),
    }
}

impl Msg<'_> {
    fn abstract_pair(&mut self, a: &[Term], b: &[Term], svar: bool) -> Term {
        let (ea, eb) = (Expr(a.to_vec()), Expr(b.to_vec()));
        if let Some((_, _, v)) = self.seen.iter().find(|(x, y, _)| *x == ea && *y == eb) {
            return v.term();
        }
        let v = if svar { self.names.svar() } else { self.names.evar() };
        self.left.insert(v.clone(), ea.clone());
        self.right.insert(v.clone(), eb.clone());
        self.seen.push((ea, eb, v.clone()));
        v.term()
    }

    fn term(&mut self, x: &Term, y: &Term) -> Term {
        match (x, y) {
            _ if x == y => x.clone(),
            (Term::Bracket(p), Term::Bracket(q)) => Term::Bracket(self.seq(p.terms(), q.terms())),
            (Term::Call(f, p), Term::Call(_, q)) => Term::Call(f.clone(), self.seq(p.terms(), q.terms())),
            _ => self.abstract_pair(core::slice::from_ref(x), core::slice::from_ref(y), true),
        }
    }

    fn seq(&mut self, a: &[Term], b: &[Term]) -> Expr {
        if a == b {
            return Expr(a.to_vec());
        }
        let mut i = 0;
        while i < a.len() && i < b.len() && aligned(&a[i], &b[i]) {
            i += 1;
        }
        let mut j = 0;
        while j < a.len() - i && j < b.len() - i && aligned(&a[a.len() - 1 - j], &b[b.len() - 1 - j]) {
            j += 1;
        }
        let mut out = Vec::new();
        for k in 0..i {
            out.push(self.term(&a[k], &b[k]));
        }
        let (ma, mb) = (&a[i..a.len() - j], &b[i..b.len() - j]);
        if !(ma.is_empty() && mb.is_empty()) {
            let single = ma.len() == 1 && mb.len() == 1 && symbol_like(&ma[0]) && symbol_like(&mb[0]);
            out.push(self.abstract_pair(ma, mb, single));
        }
        for k in (0..j).rev() {
            out.push(self.term(&a[a.len() - 1 - k], &b[b.len() - 1 - k]));
        }
        Expr(out)
    }
}

/// Generalizes `a` and `b`: equal heads are merged, mismatches become fresh
/// variables, and repeated mismatching pairs share one variable.
pub fn msg(a: &Expr, b: &Expr, names: &mut NameGen) -> Generalization {
    let mut m = Msg { names, seen: Vec::new(), left: Substitution::new(), right: Substitution::new() };
    let general = m.seq(a.terms(), b.terms());
    debug_assert_eq!(m.left.apply(&general), *a);
    debug_assert_eq!(m.right.apply(&general), *b);
    Generalization { general, left: m.left, right: m.right }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn check(a: &str, b: &str) -> Generalization {
        let (a, b) = (parse_expr(a).unwrap(), parse_expr(b).unwrap());
        let mut names = NameGen::avoiding(a.vars().into_iter().chain(b.vars()));
        let g = msg(&a, &b, &mut names);
        assert_eq!(g.left.apply(&g.general), a);
        assert_eq!(g.right.apply(&g.general), b);
        g
    }

    #[test]
    fn identical_inputs() {
        let g = check("<F 'a' e.x>", "<F 'a' e.x>");
        assert_eq!(g.general, parse_expr("<F 'a' e.x>").unwrap());
        assert!(g.left.is_empty() && g.right.is_empty());
    }

    #[test]
    fn distinct_symbols() {
        let g = check("'a'", "'b'");
        assert_eq!(g.general, parse_expr("s.1").unwrap());
        assert_eq!(g.left.get(&Var::s("1")).unwrap(), &Expr::chars("a"));
    }

    #[test]
    fn sequences_and_brackets() {
        let g = check("'ab' e.x", "'abab' e.x");
        assert_eq!(g.general, parse_expr("'ab' e.1 e.x").unwrap());
        check("<F ('a')('b')>", "<F ('ab')(e.z)>");
        check("<F <G 'a'>>", "<F 'b' <G 'c'>>");
        check("", "'abc'");
    }

    #[test]
    fn repeated_mismatch_shares_variable() {
        let g = check("('a')('a')", "('b')('b')");
        assert_eq!(g.general, parse_expr("(s.1)(s.1)").unwrap());
    }
}
