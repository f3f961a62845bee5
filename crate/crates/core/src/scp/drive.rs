//! One driving step: unfold the innermost-leftmost call of a configuration
//! by matching the callee's sentences against a parameterized argument.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::names::NameGen;
use super::ScpError;
use crate::lang::{Expr, Program, Substitution, Symbol, Term, Var};

/// An elementary refinement of one configuration variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contraction {
    /// `e ↦ ε`
    Empty(Var),
    /// `e ↦ s' e'`
    SymHead { var: Var, head: Var, tail: Var },
    /// `e ↦ (e'') e'`
    BracketHead { var: Var, inner: Var, tail: Var },
    /// `e ↦ e' s'`
    SymLast { var: Var, init: Var, last: Var },
    /// `e ↦ e' (e'')`
    BracketLast { var: Var, init: Var, inner: Var },
    /// `s ↦ X`
    Symbol(Var, Symbol),
    /// `s ↦ s'`
    Equal(Var, Var),
    /// `s ≠ X`
    NotSymbol(Var, Symbol),
    /// `s ≠ s'`
    NotEqual(Var, Var),
}

impl Contraction {
    /// The positive part as a substitution; `None` for restrictions.
    pub fn substitution(&self) -> Option<Substitution> {
        let bind = |v: &Var, e: Expr| Some(core::iter::once((v.clone(), e)).collect());
        match self {
            Contraction::Empty(v) => bind(v, Expr::empty()),
            Contraction::SymHead { var, head, tail } => bind(var, Expr(alloc::vec![head.term(), tail.term()])),
            Contraction::BracketHead { var, inner, tail } => {
                bind(var, Expr(alloc::vec![Term::Bracket(Expr(alloc::vec![inner.term()])), tail.term()]))
            }
            Contraction::SymLast { var, init, last } => bind(var, Expr(alloc::vec![init.term(), last.term()])),
            Contraction::BracketLast { var, init, inner } => {
                bind(var, Expr(alloc::vec![init.term(), Term::Bracket(Expr(alloc::vec![inner.term()]))]))
            }
            Contraction::Symbol(v, x) => bind(v, Expr(alloc::vec![Term::Sym(x.clone())])),
            Contraction::Equal(v, w) => bind(v, Expr(alloc::vec![w.term()])),
            Contraction::NotSymbol(..) | Contraction::NotEqual(..) => None,
        }
    }
}

impl fmt::Display for Contraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.substitution() {
            Some(s) => {
                let (v, e) = s.iter().next().unwrap();
                write!(f, "{v} -> {e}")
            }
            None => match self {
                Contraction::NotSymbol(v, x) => write!(f, "{v} != {}", Expr(alloc::vec![Term::Sym(x.clone())])),
                Contraction::NotEqual(v, w) => write!(f, "{v} != {w}"),
                _ => unreachable!(),
            },
        }
    }
}

/// One outgoing edge of a driven node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// Elementary steps, in the order they were made.
    pub contractions: Vec<Contraction>,
    /// Composition of the positive contractions.
    pub subst: Substitution,
    /// `None` when every sentence certainly fails on this branch.
    pub child: Option<Expr>,
    /// Inequalities the child's variables satisfy.
    pub restrictions: Restrictions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// No calls left.
    Value,
    /// Branches in residual order; together they cover every instance of
    /// the configuration, and positive contractions make them disjoint
    /// except where an earlier sibling shadows a later one.
    Branches(Vec<Branch>),
}

const HOLE: &str = "#redex";

/// Replaces the innermost-leftmost call (whose argument is call-free) by
/// the hole variable; returns the function and argument.
fn take_redex(terms: &[Term]) -> Option<(Vec<Term>, String, Expr)> {
    for (i, t) in terms.iter().enumerate() {
        let inner = match t {
            Term::Call(f, a) => match take_redex(a.terms()) {
                Some((rest, g, b)) => Some((Term::Call(f.clone(), Expr(rest)), g, b)),
                None => {
                    let mut out = terms.to_vec();
                    out[i] = Term::EVar(HOLE.into());
                    return Some((out, f.clone(), a.clone()));
                }
            },
            Term::Bracket(b) => take_redex(b.terms()).map(|(rest, g, a)| (Term::Bracket(Expr(rest)), g, a)),
            _ => None,
        };
        if let Some((t, g, a)) = inner {
            let mut out = terms.to_vec();
            out[i] = t;
            return Some((out, g, a));
        }
    }
    None
}

/// The function of the call that the next driving step unfolds.
pub fn selected_function(c: &Expr) -> Option<String> {
    take_redex(c.terms()).map(|(_, f, _)| f)
}

/// Inequalities known to hold between s-variables and symbols or other
/// s-variables of a configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Restrictions {
    syms: BTreeSet<(Var, Symbol)>,
    vars: BTreeSet<(Var, Var)>,
}

enum Image {
    Var(Var),
    Sym(Symbol),
}

fn image(v: &Var, subst: &Substitution) -> Image {
    match subst.get(v).map(|e| e.terms()) {
        Some([Term::Sym(x)]) => Image::Sym(x.clone()),
        Some([t]) => Image::Var(t.as_var().expect("s-variables map to symbols or s-variables")),
        Some(_) => unreachable!("s-variables map to single terms"),
        None => Image::Var(v.clone()),
    }
}

impl Restrictions {
    pub fn is_empty(&self) -> bool {
        self.syms.is_empty() && self.vars.is_empty()
    }

    fn differ(&self, a: &Var, b: &Var) -> bool {
        self.vars.contains(&(a.clone(), b.clone())) || self.vars.contains(&(b.clone(), a.clone()))
    }

    fn add_vars(&mut self, a: Var, b: Var) {
        let pair = if a <= b { (a, b) } else { (b, a) };
        self.vars.insert(pair);
    }

    /// The restrictions after `subst`; `None` if `subst` violates one.
    /// Those decided by it are dropped.
    pub fn instantiate(&self, subst: &Substitution) -> Option<Restrictions> {
        let mut out = Restrictions::default();
        for (v, x) in &self.syms {
            match image(v, subst) {
                Image::Var(w) => {
                    out.syms.insert((w, x.clone()));
                }
                Image::Sym(y) if y == *x => return None,
                Image::Sym(_) => {}
            }
        }
        for (a, b) in &self.vars {
            match (image(a, subst), image(b, subst)) {
                (Image::Var(p), Image::Var(q)) if p == q => return None,
                (Image::Var(p), Image::Var(q)) => out.add_vars(p, q),
                (Image::Var(p), Image::Sym(x)) | (Image::Sym(x), Image::Var(p)) => {
                    out.syms.insert((p, x));
                }
                (Image::Sym(x), Image::Sym(y)) if x == y => return None,
                (Image::Sym(_), Image::Sym(_)) => {}
            }
        }
        Some(out)
    }

    /// Only the restrictions mentioning variables of `e`.
    pub fn restrict_to(&self, e: &Expr) -> Restrictions {
        let vars: BTreeSet<Var> = e.vars().into_iter().collect();
        Restrictions {
            syms: self.syms.iter().filter(|(v, _)| vars.contains(v)).cloned().collect(),
            vars: self.vars.iter().filter(|(a, b)| vars.contains(a) && vars.contains(b)).cloned().collect(),
        }
    }

    /// Whether these restrictions, instantiated by `theta`, follow from
    /// `known`.
    pub fn implied_by(&self, theta: &Substitution, known: &Restrictions) -> bool {
        self.instantiate(theta)
            .is_some_and(|r| r.syms.is_subset(&known.syms) && r.vars.iter().all(|(a, b)| known.differ(a, b)))
    }

    /// The restrictions as contractions, for display.
    pub fn contractions(&self) -> impl Iterator<Item = Contraction> + '_ {
        let syms = self.syms.iter().map(|(v, x)| Contraction::NotSymbol(v.clone(), x.clone()));
        syms.chain(self.vars.iter().map(|(a, b)| Contraction::NotEqual(a.clone(), b.clone())))
    }
}

/// What a partial match needs to know before it can proceed.
enum Need {
    SplitLeft(Var),
    SplitRight(Var),
    Sym(Var, Symbol),
    Same(Var, Var),
}

type Verdict = Result<bool, Need>;

struct Matcher<'n> {
    neg: &'n Restrictions,
    theta: Substitution,
}

fn evar(t: &Term) -> Option<Var> {
    match t {
        Term::EVar(n) => Some(Var::e(n)),
        _ => None,
    }
}

impl Matcher<'_> {
    fn level(&mut self, pat: &[Term], arg: &[Term]) -> Verdict {
        let fixed = arg.iter().filter(|t| !t.is_evar()).count();
        let open_arg = fixed != arg.len();
        let open = pat.iter().position(Term::is_evar);
        let closed = pat.len() - open.map_or(0, |_| 1);
        if fixed > closed && open.is_none() || !open_arg && arg.len() < closed {
            return Ok(false);
        }
        let k = open.unwrap_or(pat.len());
        let (mut lo, mut hi) = (0, arg.len());
        for p in &pat[..k] {
            if lo == hi {
                return Ok(false);
            }
            if let Some(v) = evar(&arg[lo]) {
                return Err(Need::SplitLeft(v));
            }
            if !self.term(p, &arg[lo])? {
                return Ok(false);
            }
            lo += 1;
        }
        let Some(k) = open else {
            let rest = &arg[lo..hi];
            if rest.is_empty() {
                return Ok(true);
            }
            if rest.iter().any(|t| !t.is_evar()) {
                return Ok(false);
            }
            return Err(Need::SplitLeft(evar(&rest[0]).unwrap()));
        };
        for p in pat[k + 1..].iter().rev() {
            if lo == hi {
                return Ok(false);
            }
            if let Some(v) = evar(&arg[hi - 1]) {
                return Err(Need::SplitRight(v));
            }
            if !self.term(p, &arg[hi - 1])? {
                return Ok(false);
            }
            hi -= 1;
        }
        self.theta.insert(evar(&pat[k]).unwrap(), Expr(arg[lo..hi].to_vec()));
        Ok(true)
    }

    fn sym_vs(&self, x: &Symbol, t: &Term) -> Verdict {
        match t {
            Term::Sym(y) => Ok(x == y),
            Term::SVar(n) => {
                let v = Var::s(n);
                if self.neg.syms.contains(&(v.clone(), x.clone())) {
                    Ok(false)
                } else {
                    Err(Need::Sym(v, x.clone()))
                }
            }
            _ => Ok(false),
        }
    }

    fn term(&mut self, p: &Term, t: &Term) -> Verdict {
        match p {
            Term::Sym(x) => self.sym_vs(x, t),
            Term::SVar(n) => {
                if !matches!(t, Term::Sym(_) | Term::SVar(_)) {
                    return Ok(false);
                }
                let v = Var::s(n);
                let Some(bound) = self.theta.get(&v).map(|b| b.terms()[0].clone()) else {
                    self.theta.insert(v, Expr(alloc::vec![t.clone()]));
                    return Ok(true);
                };
                match (&bound, t) {
                    _ if bound == *t => Ok(true),
                    (Term::Sym(x), _) => self.sym_vs(x, t),
                    (Term::SVar(_), Term::Sym(y)) => self.sym_vs(y, &bound),
                    (Term::SVar(a), Term::SVar(b)) => {
                        let (a, b) = (Var::s(a), Var::s(b));
                        if self.neg.differ(&a, &b) {
                            Ok(false)
                        } else {
                            Err(Need::Same(b, a))
                        }
                    }
                    _ => unreachable!(),
                }
            }
            Term::Bracket(q) => match t {
                Term::Bracket(r) => self.level(q.terms(), r.terms()),
                _ => Ok(false),
            },
            Term::EVar(_) | Term::Call(..) => Ok(false),
        }
    }
}

/// A region of the argument space still under consideration.
#[derive(Clone)]
struct Space {
    contractions: Vec<Contraction>,
    subst: Substitution,
    arg: Expr,
    neg: Restrictions,
}

impl Space {
    fn refine(&self, c: Contraction) -> Space {
        let mut out = self.clone();
        match &c {
            Contraction::NotSymbol(v, x) => {
                out.neg.syms.insert((v.clone(), x.clone()));
            }
            Contraction::NotEqual(v, w) => out.neg.add_vars(v.clone(), w.clone()),
            _ => {
                let s = c.substitution().unwrap();
                out.arg = s.apply(&out.arg);
                out.subst = out.subst.then(&s);
            }
        }
        out.contractions.push(c);
        out
    }
}

enum Found {
    Match(Space, Substitution),
    Fail(Space),
}

fn splits(need: Need, names: &mut NameGen) -> Vec<Contraction> {
    match need {
        Need::SplitLeft(var) => alloc::vec![
            Contraction::Empty(var.clone()),
            Contraction::SymHead { var: var.clone(), head: names.svar(), tail: names.evar() },
            Contraction::BracketHead { var, inner: names.evar(), tail: names.evar() },
        ],
        Need::SplitRight(var) => alloc::vec![
            Contraction::Empty(var.clone()),
            Contraction::SymLast { init: names.evar(), last: names.svar(), var: var.clone() },
            Contraction::BracketLast { init: names.evar(), inner: names.evar(), var },
        ],
        Need::Sym(v, x) => alloc::vec![Contraction::Symbol(v.clone(), x.clone()), Contraction::NotSymbol(v, x)],
        Need::Same(v, w) => alloc::vec![Contraction::Equal(v.clone(), w.clone()), Contraction::NotEqual(v, w)],
    }
}

fn try_sentence(pat: &Expr, space: Space, names: &mut NameGen, out: &mut Vec<Found>) {
    let mut m = Matcher { neg: &space.neg, theta: Substitution::new() };
    match m.level(pat.terms(), space.arg.terms()) {
        Ok(true) => {
            let theta = m.theta;
            out.push(Found::Match(space, theta));
        }
        Ok(false) => out.push(Found::Fail(space)),
        Err(need) => {
            for c in splits(need, names) {
                try_sentence(pat, space.refine(c), names, out);
            }
        }
    }
}

/// Emits the cases where sentence `index` matches and continues each
/// failing case with the next sentence.
fn drive_space(
    program: &Program,
    f: &str,
    index: usize,
    space: Space,
    names: &mut NameGen,
    out: &mut Vec<(Space, Option<Expr>)>,
) {
    let sentences = program.sentences(f).unwrap_or(&[]);
    let Some(s) = sentences.get(index) else {
        out.push((space, None));
        return;
    };
    let mut found = Vec::new();
    try_sentence(&s.pattern, space, names, &mut found);
    for r in found {
        match r {
            Found::Match(space, theta) => {
                let body = theta.apply(&s.body);
                out.push((space, Some(body)));
            }
            Found::Fail(space) => drive_space(program, f, index + 1, space, names, out),
        }
    }
}

/// Drives `c` one step. Fresh variables come from `names`.
pub fn drive_step(c: &Expr, program: &Program, names: &mut NameGen) -> Result<Step, ScpError> {
    drive_restricted(c, &Restrictions::default(), program, names)
}

/// Drives `c`, whose variables satisfy `known`, one step.
pub fn drive_restricted(
    c: &Expr,
    known: &Restrictions,
    program: &Program,
    names: &mut NameGen,
) -> Result<Step, ScpError> {
    let Some((ctx, f, arg)) = take_redex(c.terms()) else {
        return Ok(Step::Value);
    };
    if program.function(&f).is_none() {
        return Err(ScpError::UndefinedFunction(f));
    }
    let ctx = Expr(ctx);
    let root = Space { contractions: Vec::new(), subst: Substitution::new(), arg, neg: known.clone() };
    let mut leaves = Vec::new();
    drive_space(program, &f, 0, root, names, &mut leaves);
    let hole = Var::e(HOLE);
    let branches = leaves
        .into_iter()
        .map(|(space, body)| {
            let child = body.map(|b| {
                let plug: Substitution = core::iter::once((hole.clone(), b)).collect();
                plug.apply(&space.subst.apply(&ctx))
            });
            let restrictions = match &child {
                Some(child) => {
                    space.neg.instantiate(&space.subst).expect("driving respects known restrictions").restrict_to(child)
                }
                None => Restrictions::default(),
            };
            Branch { contractions: space.contractions, subst: space.subst, child, restrictions }
        })
        .collect();
    Ok(Step::Branches(branches))
}
