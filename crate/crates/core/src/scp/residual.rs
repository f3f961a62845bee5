//! Residual program emission from a completed process tree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{parameter_pattern, NodeKind, ProcessTree};
use crate::lang::{Expr, Function, Program, Sentence, Substitution, Term, Var, VarKind};

/// Zero-sentence function standing for a stuck call that an ordering
/// constraint forbids dropping.
pub const ABORT: &str = "abort";

/// Body `None` marks an abnormal stop.
type Case = (Substitution, Option<Expr>);

struct Emitter<'t> {
    tree: &'t ProcessTree,
    functions: BTreeSet<usize>,
    queue: Vec<usize>,
}

fn placeholder(n: usize) -> String {
    format!("#{n}")
}

impl Emitter<'_> {
    fn params(&self, n: usize) -> Vec<Var> {
        self.tree.nodes[n].config.vars()
    }

    fn call(&self, n: usize, theta: &Substitution) -> Expr {
        let arg = theta.apply(&parameter_pattern(&self.params(n)));
        Expr(alloc::vec![Term::Call(placeholder(n), arg)])
    }

    fn promote(&mut self, n: usize) {
        if self.functions.insert(n) {
            self.queue.push(n);
        }
    }

    fn reference(&mut self, n: usize) -> Vec<Case> {
        if self.functions.contains(&n) {
            alloc::vec![(Substitution::new(), Some(self.call(n, &Substitution::new())))]
        } else {
            self.cases(n)
        }
    }

    /// The value of `n` as one expression over its own variables.
    fn single(&mut self, n: usize) -> Option<Expr> {
        let vars = self.params(n);
        let r = self.reference(n);
        let plain = |s: &Substitution| vars.iter().all(|v| s.get(v).is_none_or(|e| *e == Expr(alloc::vec![v.term()])));
        if r.len() == 1 && plain(&r[0].0) {
            return r.into_iter().next().unwrap().1;
        }
        self.promote(n);
        Some(self.call(n, &Substitution::new()))
    }

    fn cases(&mut self, n: usize) -> Vec<Case> {
        let node = &self.tree.nodes[n];
        match &node.kind {
            NodeKind::Value => alloc::vec![(Substitution::new(), Some(node.config.clone()))],
            NodeKind::Abnormal => alloc::vec![(Substitution::new(), None)],
            NodeKind::Folded { target, subst } => alloc::vec![(Substitution::new(), Some(self.call(*target, subst)))],
            NodeKind::Driven => {
                let mut out = Vec::new();
                for &k in &node.children {
                    let edge = &self.tree.nodes[k].edge;
                    for (tau, body) in self.reference(k) {
                        out.push((edge.then(&tau), body));
                    }
                }
                out
            }
            NodeKind::Let { vars } => {
                let body = self.single(node.children[0]);
                let mut plug = Substitution::new();
                let mut ok = body.is_some();
                for (v, &k) in vars.iter().zip(&node.children[1..]) {
                    match self.single(k) {
                        Some(e) => {
                            plug.insert(v.clone(), e);
                        }
                        None => ok = false,
                    }
                }
                let body = body.filter(|_| ok).map(|b| plug.apply(&b));
                alloc::vec![(Substitution::new(), body)]
            }
            NodeKind::Open => unreachable!("open node in a completed tree"),
        }
    }
}

type Draft = Vec<(Expr, Option<Expr>)>;

/// Least fixpoint: a function is live if some sentence returns without
/// aborting and calls only live functions.
fn live_functions(drafts: &BTreeMap<String, Draft>) -> BTreeSet<String> {
    let mut live = BTreeSet::new();
    loop {
        let before = live.len();
        for (name, sentences) in drafts {
            let ok = sentences.iter().any(|(_, b)| {
                b.as_ref().is_some_and(|b| {
                    let mut called = BTreeSet::new();
                    b.called_functions(&mut called);
                    called.iter().all(|f| live.contains(f))
                })
            });
            if ok {
                live.insert(name.clone());
            }
        }
        if live.len() == before {
            return live;
        }
    }
}

fn closed_count(terms: &[Term]) -> usize {
    terms.iter().filter(|t| !t.is_evar()).count()
}

fn terms_disjoint(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Sym(x), Term::Sym(y)) => x != y,
        (Term::Bracket(x), Term::Bracket(y)) => disjoint(x.terms(), y.terms()),
        (Term::Bracket(_), Term::Sym(_) | Term::SVar(_)) | (Term::Sym(_) | Term::SVar(_), Term::Bracket(_)) => true,
        _ => false,
    }
}

/// Conservative: true only if no ground expression matches both patterns.
fn disjoint(a: &[Term], b: &[Term]) -> bool {
    let (oa, ob) = (a.iter().any(Term::is_evar), b.iter().any(Term::is_evar));
    match (oa, ob) {
        (false, false) if a.len() != b.len() => return true,
        (false, true) if a.len() < closed_count(b) => return true,
        (true, false) if b.len() < closed_count(a) => return true,
        _ => {}
    }
    let front = a.iter().zip(b).take_while(|(x, y)| !x.is_evar() && !y.is_evar());
    let back = a.iter().rev().zip(b.iter().rev()).take_while(|(x, y)| !x.is_evar() && !y.is_evar());
    front.chain(back).any(|(x, y)| terms_disjoint(x, y))
}

/// Drops abnormal sentences that no later sentence could capture, and
/// turns the rest into calls of [`ABORT`].
fn settle_aborts(sentences: Draft) -> (Vec<Sentence>, bool) {
    let mut kept: Vec<(Expr, Option<Expr>)> = Vec::new();
    let mut dropped = false;
    for (i, (p, b)) in sentences.iter().enumerate() {
        if b.is_none() && sentences[i + 1..].iter().all(|(q, c)| c.is_none() || disjoint(p.terms(), q.terms())) {
            dropped = true;
            continue;
        }
        kept.push((p.clone(), b.clone()));
    }
    let abort = || Expr(alloc::vec![Term::Call(ABORT.into(), Expr::empty())]);
    let out = kept.into_iter().map(|(p, b)| Sentence::new(p, b.unwrap_or_else(abort))).collect();
    (out, dropped)
}

/// Renames each sentence's variables to `1`, `2`, ... in order of
/// appearance.
fn canonical(s: &Sentence) -> Sentence {
    let mut vars = s.pattern.vars();
    for v in s.body.vars() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let ren: Substitution = vars
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let name = format!("{}", i + 1);
            let w = if v.kind == VarKind::S { Var::s(&name) } else { Var::e(&name) };
            (v, Expr(alloc::vec![w.term()]))
        })
        .collect();
    Sentence::new(ren.apply(&s.pattern), ren.apply(&s.body))
}

fn rename_calls(e: &Expr, names: &BTreeMap<String, String>) -> Expr {
    e.terms()
        .iter()
        .map(|t| match t {
            Term::Call(f, a) => Term::Call(names.get(f).cloned().unwrap_or_else(|| f.clone()), rename_calls(a, names)),
            Term::Bracket(b) => Term::Bracket(rename_calls(b, names)),
            _ => t.clone(),
        })
        .collect()
}

/// `f { P = <g P>; }` where `P` is `f`'s parameter pattern just forwards
/// to `g`: callers of `f` call `g` instead, and if `f` is the entry, `g`
/// takes over its name.
fn eliminate_aliases(drafts: &mut BTreeMap<String, Draft>, params: &BTreeMap<String, Expr>, root: &str) {
    loop {
        let alias = drafts.iter().find_map(|(f, ss)| match ss.as_slice() {
            [(p, Some(b))] if *p == params[f] => match b.terms() {
                [Term::Call(g, a)] if a == p && g != f => Some((f.clone(), g.clone())),
                _ => None,
            },
            _ => None,
        });
        let Some((f, g)) = alias else { return };
        let (from, to) = if f == root {
            let body = drafts.remove(&g).unwrap();
            drafts.insert(f.clone(), body);
            (g, f)
        } else {
            drafts.remove(&f);
            (f, g)
        };
        let ren: BTreeMap<String, String> = core::iter::once((from, to)).collect();
        for ss in drafts.values_mut() {
            for (_, b) in ss.iter_mut() {
                if let Some(e) = b {
                    *e = rename_calls(e, &ren);
                }
            }
        }
    }
}

/// Presentation-only rewriting of a total function's sentences: constant
/// sentences sharing the final body merge into one catch-all when nothing
/// after them overlaps, and runs of pairwise disjoint sentences list the
/// most specific pattern first.
fn normalize(sentences: &mut Vec<Sentence>, params: &Expr) {
    if let Some(last) = sentences.last().map(|s| s.body.clone()) {
        let constant = |s: &Sentence| s.body == last;
        let movable = (0..sentences.len()).filter(|&i| constant(&sentences[i])).all(|i| {
            sentences[i + 1..].iter().all(|t| constant(t) || disjoint(sentences[i].pattern.terms(), t.pattern.terms()))
        });
        if last.is_ground() && movable && sentences.iter().filter(|s| constant(s)).count() > 1 {
            sentences.retain(|s| !constant(s));
            sentences.push(Sentence::new(params.clone(), last));
        }
    }
    let mut start = 0;
    while start < sentences.len() {
        let mut end = start + 1;
        while end < sentences.len()
            && sentences[start..end].iter().all(|s| disjoint(s.pattern.terms(), sentences[end].pattern.terms()))
        {
            end += 1;
        }
        sentences[start..end].sort_by_key(|s| core::cmp::Reverse(s.pattern.size()));
        start = end;
    }
}

pub(super) fn residualize(tree: &ProcessTree, entry: &str) -> Program {
    let root = ProcessTree::ROOT;
    let mut em = Emitter { tree, functions: BTreeSet::new(), queue: Vec::new() };
    for (_, n) in tree.live() {
        if let NodeKind::Folded { target, .. } = n.kind {
            em.promote(target);
        }
    }
    em.promote(root);
    let mut drafts: BTreeMap<String, Draft> = BTreeMap::new();
    while let Some(n) = em.queue.pop() {
        let pattern = parameter_pattern(&em.params(n));
        let sentences = em.cases(n).into_iter().map(|(s, b)| (s.apply(&pattern), b)).collect();
        drafts.insert(placeholder(n), sentences);
    }

    let params: BTreeMap<String, Expr> =
        drafts.keys().map(|f| (f.clone(), parameter_pattern(&em.params(f[1..].parse().unwrap())))).collect();
    eliminate_aliases(&mut drafts, &params, &placeholder(root));

    let live = live_functions(&drafts);
    for sentences in drafts.values_mut() {
        for (_, b) in sentences.iter_mut() {
            let mut called = BTreeSet::new();
            if let Some(e) = b {
                e.called_functions(&mut called);
            }
            if !called.iter().all(|f| live.contains(f)) {
                *b = None;
            }
        }
    }

    // Only functions still reachable from the entry are emitted.
    let mut reachable = alloc::vec![placeholder(root)];
    let mut seen: BTreeSet<String> = reachable.iter().cloned().collect();
    let mut i = 0;
    while i < reachable.len() {
        let mut called = BTreeSet::new();
        for (_, b) in &drafts[&reachable[i]] {
            if let Some(b) = b {
                b.called_functions(&mut called);
            }
        }
        for f in called {
            if seen.insert(f.clone()) {
                reachable.push(f);
            }
        }
        i += 1;
    }
    let mut order: Vec<usize> = reachable.iter().map(|f| f[1..].parse().unwrap()).collect();
    order.sort_unstable();
    let mut names = BTreeMap::new();
    let mut k = 0;
    for &n in &order {
        let name = if n == root {
            entry.into()
        } else {
            k += 1;
            format!("f{k}")
        };
        names.insert(placeholder(n), name);
    }

    let mut functions = Vec::new();
    let mut uses_abort = false;
    for &n in &order {
        let (sentences, dropped) = settle_aborts(drafts.remove(&placeholder(n)).unwrap());
        let mut sentences: Vec<Sentence> =
            sentences.into_iter().map(|s| Sentence::new(s.pattern, rename_calls(&s.body, &names))).collect();
        if !dropped {
            normalize(&mut sentences, &params[&placeholder(n)]);
        }
        let sentences: Vec<Sentence> = sentences.iter().map(canonical).collect();
        uses_abort |= sentences.iter().any(|s| {
            let mut c = BTreeSet::new();
            s.body.called_functions(&mut c);
            c.contains(ABORT)
        });
        functions.push(Function { name: names[&placeholder(n)].clone(), sentences });
    }
    if uses_abort {
        functions.push(Function { name: ABORT.into(), sentences: Vec::new() });
    }
    Program::from_functions(functions, entry)
}
