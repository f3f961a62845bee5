//! Object language: symbols, terms, flat expressions with structure
//! brackets, sentences and programs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// An atom of the object language.
///
/// Character symbols and identifier symbols never compare equal, so
/// `'M'` and `M` are different symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Char(char),
    Ident(String),
}

impl Symbol {
    pub fn ident(name: &str) -> Self {
        Symbol::Ident(name.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Ranges over single symbols.
    S,
    /// Ranges over arbitrary (possibly empty) sequences of terms.
    E,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub name: String,
}

impl Var {
    pub fn s(name: &str) -> Self {
        Var { kind: VarKind::S, name: name.into() }
    }

    pub fn e(name: &str) -> Self {
        Var { kind: VarKind::E, name: name.into() }
    }

    pub fn term(&self) -> Term {
        match self.kind {
            VarKind::S => Term::SVar(self.name.clone()),
            VarKind::E => Term::EVar(self.name.clone()),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            VarKind::S => write!(f, "s.{}", self.name),
            VarKind::E => write!(f, "e.{}", self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Sym(Symbol),
    SVar(String),
    EVar(String),
    Bracket(Expr),
    /// Function call; only legal in right-hand sides and configurations.
    Call(String, Expr),
}

impl Term {
    pub fn chr(c: char) -> Self {
        Term::Sym(Symbol::Char(c))
    }

    pub fn ident(name: &str) -> Self {
        Term::Sym(Symbol::ident(name))
    }

    pub fn call(function: &str, arg: Expr) -> Self {
        Term::Call(function.into(), arg)
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::SVar(n) => Some(Var::s(n)),
            Term::EVar(n) => Some(Var::e(n)),
            _ => None,
        }
    }

    pub fn is_evar(&self) -> bool {
        matches!(self, Term::EVar(_))
    }
}

/// A flat sequence of terms. Concatenation is associative with the empty
/// expression as identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(pub Vec<Term>);

impl Expr {
    pub fn empty() -> Self {
        Expr(Vec::new())
    }

    pub fn new(terms: Vec<Term>) -> Self {
        Expr(terms)
    }

    /// One character symbol per character of `s`.
    pub fn chars(s: &str) -> Self {
        Expr(s.chars().map(Term::chr).collect())
    }

    pub fn bracket(body: Expr) -> Term {
        Term::Bracket(body)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.0
    }

    pub fn concat(mut self, other: Expr) -> Expr {
        self.0.extend(other.0);
        self
    }

    pub fn push(&mut self, t: Term) {
        self.0.push(t);
    }

    pub fn extend(&mut self, other: Expr) {
        self.0.extend(other.0);
    }

    /// No variables and no calls anywhere.
    pub fn is_ground(&self) -> bool {
        self.0.iter().all(|t| match t {
            Term::Sym(_) => true,
            Term::Bracket(b) => b.is_ground(),
            _ => false,
        })
    }

    pub fn has_calls(&self) -> bool {
        self.0.iter().any(|t| match t {
            Term::Call(..) => true,
            Term::Bracket(b) => b.has_calls(),
            _ => false,
        })
    }

    pub fn has_vars(&self) -> bool {
        self.0.iter().any(|t| match t {
            Term::SVar(_) | Term::EVar(_) => true,
            Term::Bracket(b) | Term::Call(_, b) => b.has_vars(),
            Term::Sym(_) => false,
        })
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    fn collect_vars(&self, seen: &mut BTreeSet<Var>, out: &mut Vec<Var>) {
        for t in &self.0 {
            match t {
                Term::SVar(_) | Term::EVar(_) => {
                    let v = t.as_var().unwrap();
                    if seen.insert(v.clone()) {
                        out.push(v);
                    }
                }
                Term::Bracket(b) | Term::Call(_, b) => b.collect_vars(seen, out),
                Term::Sym(_) => {}
            }
        }
    }

    /// Names of all functions called anywhere in the expression.
    pub fn called_functions(&self, out: &mut BTreeSet<String>) {
        for t in &self.0 {
            match t {
                Term::Call(f, arg) => {
                    out.insert(f.clone());
                    arg.called_functions(out);
                }
                Term::Bracket(b) => b.called_functions(out),
                _ => {}
            }
        }
    }

    pub fn contains_symbol(&self, sym: &Symbol) -> bool {
        self.0.iter().any(|t| match t {
            Term::Sym(s) => s == sym,
            Term::Bracket(b) | Term::Call(_, b) => b.contains_symbol(sym),
            _ => false,
        })
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        self.0.iter().any(|t| match t {
            Term::SVar(n) => v.kind == VarKind::S && *n == v.name,
            Term::EVar(n) => v.kind == VarKind::E && *n == v.name,
            Term::Bracket(b) | Term::Call(_, b) => b.contains_var(v),
            Term::Sym(_) => false,
        })
    }

    pub fn size(&self) -> usize {
        self.0
            .iter()
            .map(|t| match t {
                Term::Bracket(b) | Term::Call(_, b) => 1 + b.size(),
                _ => 1,
            })
            .sum()
    }
}

impl From<Vec<Term>> for Expr {
    fn from(v: Vec<Term>) -> Self {
        Expr(v)
    }
}

impl FromIterator<Term> for Expr {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Expr(iter.into_iter().collect())
    }
}

/// Variable bindings. S-variables bind single-term expressions, e-variables
/// bind arbitrary expressions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Expr>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, v: &Var) -> Option<&Expr> {
        self.map.get(v)
    }

    pub fn insert(&mut self, v: Var, value: Expr) -> Option<Expr> {
        self.map.insert(v, value)
    }

    pub fn remove(&mut self, v: &Var) -> Option<Expr> {
        self.map.remove(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Expr)> {
        self.map.iter()
    }

    /// True if every binding maps a variable to itself.
    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(v, e)| e.0.len() == 1 && e.0[0].as_var().as_ref() == Some(v))
    }

    /// True if the substitution is a bijective variable renaming.
    pub fn is_renaming(&self) -> bool {
        let mut targets = BTreeSet::new();
        self.map.iter().all(|(v, e)| {
            e.0.len() == 1
                && match e.0[0].as_var() {
                    Some(w) => w.kind == v.kind && targets.insert(w),
                    None => false,
                }
        })
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        let mut out = Vec::with_capacity(e.0.len());
        for t in &e.0 {
            match t {
                Term::SVar(_) | Term::EVar(_) => {
                    let v = t.as_var().unwrap();
                    match self.map.get(&v) {
                        Some(val) => out.extend(val.0.iter().cloned()),
                        None => out.push(t.clone()),
                    }
                }
                Term::Bracket(b) => out.push(Term::Bracket(self.apply(b))),
                Term::Call(f, b) => out.push(Term::Call(f.clone(), self.apply(b))),
                Term::Sym(_) => out.push(t.clone()),
            }
        }
        Expr(out)
    }

    /// `self` followed by `other`: applying the result equals applying
    /// `self` and then `other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut map = BTreeMap::new();
        for (v, e) in &self.map {
            map.insert(v.clone(), other.apply(e));
        }
        for (v, e) in &other.map {
            map.entry(v.clone()).or_insert_with(|| e.clone());
        }
        Substitution { map }
    }
}

impl FromIterator<(Var, Expr)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Expr)>>(iter: I) -> Self {
        Substitution { map: iter.into_iter().collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub pattern: Expr,
    pub body: Expr,
}

impl Sentence {
    pub fn new(pattern: Expr, body: Expr) -> Self {
        Sentence { pattern, body }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub sentences: Vec<Sentence>,
}

/// An ordered set of function definitions with a designated entry point.
///
/// Source programs always define at least one sentence per function;
/// residual programs may contain empty definitions (functions with an
/// empty domain).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    functions: Vec<Function>,
    entry: String,
}

impl Program {
    /// Builds a program without validation; see [`crate::syntax::validate`].
    /// The entry function is moved to the front.
    pub fn from_functions(mut functions: Vec<Function>, entry: &str) -> Self {
        if let Some(i) = functions.iter().position(|f| f.name == entry) {
            let f = functions.remove(i);
            functions.insert(0, f);
        }
        Program { functions, entry: entry.into() }
    }

    pub fn entry(&self) -> &str {
        &self.entry
    }

    pub fn functions(&self) -> &[Function] {
        &self.functions
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn sentences(&self, name: &str) -> Option<&[Sentence]> {
        self.function(name).map(|f| f.sentences.as_slice())
    }

    /// Functions reachable from the entry through the call graph, entry first.
    pub fn reachable(&self) -> Vec<&Function> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut stack = alloc::vec![self.entry.clone()];
        while let Some(name) = stack.pop() {
            if !seen.insert(name.clone()) {
                continue;
            }
            if let Some(f) = self.function(&name) {
                order.push(f);
                let mut callees = BTreeSet::new();
                for s in &f.sentences {
                    s.body.called_functions(&mut callees);
                }
                for c in callees.into_iter().rev() {
                    if !seen.contains(&c) {
                        stack.push(c);
                    }
                }
            }
        }
        order
    }
}
