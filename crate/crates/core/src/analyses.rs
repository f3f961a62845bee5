//! Analyses of residual programs: whether `True` can be returned, whether
//! the domain is empty, which input sequences are accepted, structural
//! comparison and export as a graph.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use crate::eval::{eval, EvalError, DEFAULT_STEP_BUDGET};
use crate::lang::{Expr, Program, Symbol, Term, Var};
use crate::scp::{drive_step, NameGen, ScpError, Step};
use crate::syntax::print_expr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    /// More live prefixes of one length than the search allows.
    FrontierExceeded {
        len: usize,
        size: usize,
    },
    Eval(EvalError),
    Drive(ScpError),
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::FrontierExceeded { len, size } => {
                write!(f, "search frontier exceeded: {size} live prefixes of length {len}")
            }
            AnalysisError::Eval(e) => write!(f, "evaluation failed: {e}"),
            AnalysisError::Drive(e) => write!(f, "driving failed: {e}"),
        }
    }
}

impl core::error::Error for AnalysisError {}

impl From<EvalError> for AnalysisError {
    fn from(e: EvalError) -> Self {
        AnalysisError::Eval(e)
    }
}

impl From<ScpError> for AnalysisError {
    fn from(e: ScpError) -> Self {
        AnalysisError::Drive(e)
    }
}

fn true_symbol() -> Symbol {
    Symbol::ident("True")
}

/// Whether `True` occurs in a sentence body of a function reachable from
/// the entry.
pub fn returns_true(p: &Program) -> bool {
    let t = true_symbol();
    p.reachable().iter().any(|f| f.sentences.iter().any(|s| s.body.contains_symbol(&t)))
}

/// Whether the entry function has no sentences.
pub fn is_empty(p: &Program) -> bool {
    p.sentences(p.entry()).is_none_or(|s| s.is_empty())
}

/// Bounds for the accepted-sequence search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Live prefixes allowed per length.
    pub frontier: usize,
    /// Steps for one evaluation.
    pub eval_steps: u64,
    /// Driving steps spent deciding whether a prefix can still be extended.
    pub drive_steps: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { frontier: 100_000, eval_steps: DEFAULT_STEP_BUDGET, drive_steps: 10_000 }
    }
}

fn entry_call(p: &Program, arg: Expr) -> Expr {
    Expr(alloc::vec![Term::Call(p.entry().into(), arg)])
}

fn word(w: &[Symbol]) -> Expr {
    w.iter().cloned().map(Term::Sym).collect()
}

fn accepts(p: &Program, w: &[Symbol], limits: &SearchLimits) -> Result<bool, AnalysisError> {
    let out = eval(p, &entry_call(p, word(w)), limits.eval_steps)?;
    Ok(out.value().is_some_and(|v| v.contains_symbol(&true_symbol())))
}

/// Whether some extension of `w` may be accepted. Drives `<entry w e.rest>`
/// until a step would have to inspect the unknown rest; that, a value
/// holding `True`, or running out of steps counts as live.
fn live(p: &Program, w: &[Symbol], limits: &SearchLimits) -> Result<bool, AnalysisError> {
    let rest = Var::e("rest");
    let mut arg = word(w);
    arg.push(rest.term());
    let mut names = NameGen::avoiding([rest]);
    let mut todo = alloc::vec![entry_call(p, arg)];
    let mut steps = 0;
    while let Some(c) = todo.pop() {
        steps += 1;
        if steps > limits.drive_steps {
            return Ok(true);
        }
        match drive_step(&c, p, &mut names)? {
            Step::Value => {
                if c.contains_symbol(&true_symbol()) {
                    return Ok(true);
                }
            }
            Step::Branches(bs) => {
                for b in bs {
                    if !b.contractions.is_empty() {
                        return Ok(true);
                    }
                    todo.extend(b.child);
                }
            }
        }
    }
    Ok(false)
}

/// Breadth-first over prefixes, shortest first; `visit` sees each length's
/// accepted words and returns `false` to stop.
fn search(
    p: &Program,
    alphabet: &[Symbol],
    max_len: usize,
    limits: &SearchLimits,
    mut visit: impl FnMut(usize, BTreeSet<Vec<Symbol>>) -> bool,
) -> Result<(), AnalysisError> {
    let mut frontier: Vec<Vec<Symbol>> = alloc::vec![Vec::new()];
    for len in 0..=max_len {
        let mut accepted = BTreeSet::new();
        for w in &frontier {
            if accepts(p, w, limits)? {
                accepted.insert(w.clone());
            }
        }
        if !visit(len, accepted) || len == max_len {
            return Ok(());
        }
        let mut next = Vec::new();
        for w in &frontier {
            if !live(p, w, limits)? {
                continue;
            }
            for x in alphabet {
                let mut v = w.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        if next.len() > limits.frontier {
            return Err(AnalysisError::FrontierExceeded { len: len + 1, size: next.len() });
        }
        if next.is_empty() {
            return Ok(());
        }
        frontier = next;
    }
    Ok(())
}

/// Every word over `alphabet` of length at most `max_len` on which the
/// entry returns a value containing `True`.
pub fn enumerate_accepted(
    p: &Program,
    alphabet: &[Symbol],
    max_len: usize,
    limits: &SearchLimits,
) -> Result<BTreeSet<Vec<Symbol>>, AnalysisError> {
    let mut out = BTreeSet::new();
    search(p, alphabet, max_len, limits, |_, acc| {
        out.extend(acc);
        true
    })?;
    Ok(out)
}

/// A length together with the accepted words of that length.
pub type Shortest = (usize, BTreeSet<Vec<Symbol>>);

/// The least length up to `cap` with accepted words, and those words.
pub fn shortest_accepted(
    p: &Program,
    alphabet: &[Symbol],
    cap: usize,
    limits: &SearchLimits,
) -> Result<Option<Shortest>, AnalysisError> {
    let mut found = None;
    search(p, alphabet, cap, limits, |len, acc| {
        if acc.is_empty() {
            return true;
        }
        found = Some((len, acc));
        false
    })?;
    Ok(found)
}

// ---------------------------------------------------------------------------
// Graph

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Vertex {
    Function(String),
    /// A distinct returned expression, numbered in order of appearance.
    Return {
        index: usize,
        expr: Expr,
    },
}

impl Vertex {
    pub fn id(&self) -> String {
        match self {
            Vertex::Function(name) => name.clone(),
            Vertex::Return { index, .. } => alloc::format!("ret{index}"),
        }
    }

    pub fn accepting(&self) -> bool {
        matches!(self, Vertex::Return { expr, .. } if expr.contains_symbol(&true_symbol()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

/// A residual program read as a graph: one vertex per function and per
/// distinct non-call body; a sentence is an edge labelled by its pattern,
/// to the function it tail-calls or to its return vertex. Return vertices
/// link to the functions they call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

pub fn to_graph(p: &Program) -> ResidualGraph {
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut function = |name: &str, vertices: &mut Vec<Vertex>| -> usize {
        *index.entry(name.into()).or_insert_with(|| {
            vertices.push(Vertex::Function(name.into()));
            vertices.len() - 1
        })
    };
    function(p.entry(), &mut vertices);
    for f in p.functions() {
        function(&f.name, &mut vertices);
    }
    let mut returns: BTreeMap<String, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for f in p.functions() {
        let from = function(&f.name, &mut vertices);
        for s in &f.sentences {
            let label = print_expr(&s.pattern);
            let to = match s.body.terms() {
                [Term::Call(g, _)] => function(g, &mut vertices),
                _ => {
                    let key = print_expr(&s.body);
                    match returns.get(&key) {
                        Some(&v) => v,
                        None => {
                            let k = returns.len();
                            vertices.push(Vertex::Return { index: k, expr: s.body.clone() });
                            let v = vertices.len() - 1;
                            returns.insert(key, v);
                            let mut callees = BTreeSet::new();
                            s.body.called_functions(&mut callees);
                            for g in callees {
                                let to = function(&g, &mut vertices);
                                edges.push(Edge { from: v, to, label: String::new() });
                            }
                            v
                        }
                    }
                }
            };
            edges.push(Edge { from, to, label });
        }
    }
    edges.sort_by(|a, b| (a.from, a.to, &a.label).cmp(&(b.from, b.to, &b.label)));
    edges.dedup();
    ResidualGraph { vertices, edges }
}

fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

impl ResidualGraph {
    /// DOT text with vertices and edges in a fixed order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph residual {\n");
        for v in &self.vertices {
            let label = match v {
                Vertex::Function(name) => name.clone(),
                Vertex::Return { expr, .. } => print_expr(expr),
            };
            let _ = write!(out, "  {} [label={}", quote(&v.id()), quote(&label));
            if v.accepting() {
                out.push_str(", shape=doublecircle");
            }
            out.push_str("];\n");
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(&self.vertices[e.from].id()),
                quote(&self.vertices[e.to].id()),
                quote(&e.label)
            );
        }
        out.push_str("}\n");
        out
    }
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

struct Renaming<'a> {
    functions: &'a mut BTreeMap<String, String>,
    back: &'a mut BTreeMap<String, String>,
    vars: BTreeMap<Var, Var>,
    vars_back: BTreeMap<Var, Var>,
}

impl Renaming<'_> {
    fn function(&mut self, f: &str, g: &str) -> bool {
        let fwd = self.functions.entry(f.into()).or_insert_with(|| g.into()) == g;
        fwd && self.back.entry(g.into()).or_insert_with(|| f.into()) == f
    }

    fn var(&mut self, v: Var, w: Var) -> bool {
        v.kind == w.kind
            && *self.vars.entry(v.clone()).or_insert_with(|| w.clone()) == w
            && *self.vars_back.entry(w).or_insert(v.clone()) == v
    }

    fn exprs(&mut self, a: &Expr, b: &Expr) -> bool {
        a.len() == b.len()
            && a.terms().iter().zip(b.terms()).all(|(x, y)| match (x, y) {
                (Term::Sym(p), Term::Sym(q)) => p == q,
                (Term::Bracket(p), Term::Bracket(q)) => self.exprs(p, q),
                (Term::Call(f, p), Term::Call(g, q)) => self.function(f, g) && self.exprs(p, q),
                _ => match (x.as_var(), y.as_var()) {
                    (Some(v), Some(w)) => self.var(v, w),
                    _ => false,
                },
            })
    }
}

/// Equal up to a bijective renaming of functions (entry to entry) and of
/// variables within each sentence. Sentence order matters.
pub fn alpha_equivalent(p: &Program, q: &Program) -> bool {
    if p.functions().len() != q.functions().len() {
        return false;
    }
    let mut functions = BTreeMap::new();
    let mut back = BTreeMap::new();
    functions.insert(p.entry().to_string(), q.entry().to_string());
    back.insert(q.entry().to_string(), p.entry().to_string());
    // Pair functions as calls reveal them, then the rest in definition order.
    let mut done = BTreeSet::new();
    let mut todo = alloc::vec![p.entry().to_string()];
    loop {
        let Some(f) = todo.pop().or_else(|| {
            let f = p.functions().iter().find(|f| !done.contains(&f.name))?;
            let g = q.functions().iter().find(|g| !back.contains_key(&g.name))?;
            functions.insert(f.name.clone(), g.name.clone());
            back.insert(g.name.clone(), f.name.clone());
            Some(f.name.clone())
        }) else {
            return done.len() == p.functions().len();
        };
        if !done.insert(f.clone()) {
            continue;
        }
        let (Some(a), Some(b)) = (p.function(&f), q.function(&functions[&f])) else {
            return false;
        };
        if a.sentences.len() != b.sentences.len() {
            return false;
        }
        for (s, t) in a.sentences.iter().zip(&b.sentences) {
            let mut r = Renaming {
                functions: &mut functions,
                back: &mut back,
                vars: BTreeMap::new(),
                vars_back: BTreeMap::new(),
            };
            if !(r.exprs(&s.pattern, &t.pattern) && r.exprs(&s.body, &t.body)) {
                return false;
            }
        }
        let mut callees = BTreeSet::new();
        for s in &a.sentences {
            s.body.called_functions(&mut callees);
        }
        todo.extend(callees.into_iter().filter(|c| !done.contains(c)));
    }
}
