//! Instance test between configurations: is `b` equal to `a·θ` for some θ?
//! Configurations may repeat e-variables and hold several per level, so
//! this search backtracks.

use alloc::collections::BTreeMap;

use crate::lang::{Expr, Substitution, Term, Var};

fn seq(a: &[Term], b: &[Term], theta: &mut Substitution) -> bool {
    let Some((first, rest)) = a.split_first() else {
        return b.is_empty();
    };
    match first {
        Term::EVar(n) => {
            let v = Var::e(n);
            if let Some(bound) = theta.get(&v) {
                let k = bound.len();
                return b.len() >= k && b[..k] == *bound.terms() && seq(rest, &b[k..], theta);
            }
            // Terms that must still be matched by `rest` bound the split point.
            let min_rest = rest.iter().filter(|t| !t.is_evar()).count();
            for k in 0..=b.len().saturating_sub(min_rest) {
                let mut trial = theta.clone();
                trial.insert(v.clone(), Expr(b[..k].to_vec()));
                if seq(rest, &b[k..], &mut trial) {
                    *theta = trial;
                    return true;
                }
            }
            false
        }
        _ => {
            let Some((head, tail)) = b.split_first() else { return false };
            let saved = theta.clone();
            if term(first, head, theta) && seq(rest, tail, theta) {
                return true;
            }
            *theta = saved;
            false
        }
    }
}

fn term(a: &Term, b: &Term, theta: &mut Substitution) -> bool {
    match (a, b) {
        (Term::SVar(n), Term::Sym(_) | Term::SVar(_)) => {
            let v = Var::s(n);
            match theta.get(&v) {
                Some(bound) => bound.terms() == core::slice::from_ref(b),
                None => {
                    theta.insert(v, Expr(alloc::vec![b.clone()]));
                    true
                }
            }
        }
        (Term::Bracket(x), Term::Bracket(y)) => seq(x.terms(), y.terms(), theta),
        (Term::Call(f, x), Term::Call(g, y)) => f == g && seq(x.terms(), y.terms(), theta),
        (Term::Sym(x), Term::Sym(y)) => x == y,
        _ => false,
    }
}

/// θ with `general·θ == specific`, binding every variable of `general`.
pub fn instance_of(general: &Expr, specific: &Expr) -> Option<Substitution> {
    let mut theta = Substitution::new();
    if !seq(general.terms(), specific.terms(), &mut theta) {
        return None;
    }
    debug_assert_eq!(theta.apply(general), *specific);
    Some(theta)
}

fn rename_seq(a: &[Term], b: &[Term], fwd: &mut BTreeMap<Var, Var>, back: &mut BTreeMap<Var, Var>) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| match (x, y) {
            (Term::Bracket(p), Term::Bracket(q)) => rename_seq(p.terms(), q.terms(), fwd, back),
            (Term::Call(f, p), Term::Call(g, q)) => f == g && rename_seq(p.terms(), q.terms(), fwd, back),
            (Term::Sym(p), Term::Sym(q)) => p == q,
            _ => match (x.as_var(), y.as_var()) {
                (Some(v), Some(w)) if v.kind == w.kind => {
                    *fwd.entry(v.clone()).or_insert_with(|| w.clone()) == w
                        && *back.entry(w).or_insert_with(|| v.clone()) == v
                }
                _ => false,
            },
        })
}

/// The bijective variable renaming taking `a` to `b`, if there is one.
pub fn renaming(a: &Expr, b: &Expr) -> Option<Substitution> {
    let mut fwd = BTreeMap::new();
    rename_seq(a.terms(), b.terms(), &mut fwd, &mut BTreeMap::new())
        .then(|| fwd.into_iter().map(|(v, w)| (v, Expr(alloc::vec![w.term()]))).collect())
}

pub fn is_renaming(a: &Expr, b: &Expr) -> bool {
    renaming(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_expr;

    fn inst(a: &str, b: &str) -> Option<Substitution> {
        instance_of(&parse_expr(a).unwrap(), &parse_expr(b).unwrap())
    }

    #[test]
    fn instances() {
        assert!(inst("<F e.x>", "<F 'ab' e.y>").is_some());
        assert!(inst("<F e.x e.x>", "<F 'abab'>").is_some());
        assert!(inst("<F e.x e.x>", "<F 'aba'>").is_none());
        assert!(inst("<F e.x 'b' e.y>", "<F 'aab' e.z>").is_some());
        assert!(inst("<F s.x s.x>", "<F s.a s.b>").is_none());
        assert!(inst("<F 'a'>", "<F e.x>").is_none());
        assert!(inst("<F (e.x) e.y>", "<F ('a') 'b'>").is_some());
    }

    #[test]
    fn renamings() {
        let (a, b) = (parse_expr("<F (e.x) s.y e.z>").unwrap(), parse_expr("<F (e.1) s.2 e.3>").unwrap());
        assert!(is_renaming(&a, &b));
        assert!(!is_renaming(&parse_expr("<F e.x e.y>").unwrap(), &parse_expr("<F e.z e.z>").unwrap()));
        assert!(is_renaming(&parse_expr("<F e.x e.y>").unwrap(), &parse_expr("<F e.a e.b>").unwrap()));
    }
}
