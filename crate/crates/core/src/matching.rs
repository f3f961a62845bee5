//! Deterministic matching of patterns against ground expressions.
//!
//! Patterns carry at most one e-variable per bracket level, so a match is
//! found by reading the closed prefix from the left, the closed suffix from
//! the right, and handing the middle to the open variable. No backtracking
//! is needed and the result is unique.

use crate::lang::{Expr, Substitution, Term, Var};

/// Matches `pattern` against the ground `subject`.
///
/// Repeated s-variables must bind equal symbols. Returns `None` on
/// mismatch.
pub fn match_pattern(pattern: &Expr, subject: &Expr) -> Option<Substitution> {
    let mut subst = Substitution::new();
    if match_level(pattern.terms(), subject.terms(), &mut subst) {
        Some(subst)
    } else {
        None
    }
}

fn match_level(pat: &[Term], subj: &[Term], subst: &mut Substitution) -> bool {
    let open = pat.iter().position(Term::is_evar);
    let Some(k) = open else {
        return pat.len() == subj.len() && pat.iter().zip(subj).all(|(p, s)| match_term(p, s, subst));
    };
    let suffix = pat.len() - k - 1;
    if subj.len() < k + suffix {
        return false;
    }
    for i in 0..k {
        if !match_term(&pat[i], &subj[i], subst) {
            return false;
        }
    }
    for j in 0..suffix {
        if !match_term(&pat[pat.len() - 1 - j], &subj[subj.len() - 1 - j], subst) {
            return false;
        }
    }
    let Term::EVar(name) = &pat[k] else { unreachable!() };
    subst.insert(Var::e(name), Expr(subj[k..subj.len() - suffix].to_vec()));
    true
}

fn match_term(p: &Term, s: &Term, subst: &mut Substitution) -> bool {
    match (p, s) {
        (Term::Sym(a), Term::Sym(b)) => a == b,
        (Term::SVar(n), Term::Sym(_)) => {
            let v = Var::s(n);
            match subst.get(&v) {
                Some(bound) => bound.terms() == core::slice::from_ref(s),
                None => {
                    subst.insert(v, Expr(alloc::vec![s.clone()]));
                    true
                }
            }
        }
        (Term::Bracket(a), Term::Bracket(b)) => match_level(a.terms(), b.terms(), subst),
        _ => false,
    }
}
