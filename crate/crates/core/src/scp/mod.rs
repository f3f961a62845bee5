//! Positive supercompilation: driving, folding, an embedding whistle and
//! generalization by most specific generalization.

pub mod drive;
pub mod embed;
pub mod instance;
pub mod msg;
pub mod names;
mod residual;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write as _;

use alloc::collections::BTreeMap;

pub use drive::{drive_restricted, drive_step, selected_function, Branch, Contraction, Restrictions, Step};
pub use embed::embeds;
pub use msg::{msg, Generalization};
pub use names::NameGen;

use crate::lang::{Expr, Program, Substitution, Term, Var};

pub const DEFAULT_NODE_BUDGET: usize = 20_000;

/// Embedding ancestors that force a generalization between configurations
/// the call-stack rule would otherwise keep apart.
pub const WHISTLE_CHAIN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScpError {
    /// The process tree grew past the node budget.
    BudgetExceeded {
        nodes: usize,
    },
    UndefinedFunction(String),
    /// The goal contains no call.
    NoCall,
}

impl fmt::Display for ScpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScpError::BudgetExceeded { nodes } => write!(f, "node budget exceeded ({nodes} nodes)"),
            ScpError::UndefinedFunction(n) => write!(f, "call to undefined function `{n}`"),
            ScpError::NoCall => f.write_str("goal contains no call"),
        }
    }
}

impl core::error::Error for ScpError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScpOptions {
    pub node_budget: usize,
    /// Off: no generalization, only the budget bounds the tree.
    pub whistle: bool,
}

impl Default for ScpOptions {
    fn default() -> Self {
        ScpOptions { node_budget: DEFAULT_NODE_BUDGET, whistle: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Open,
    Value,
    Abnormal,
    /// Children follow the branches of one driving step.
    Driven,
    /// `config == target.config · subst`.
    Folded {
        target: usize,
        subst: Substitution,
    },
    /// `config == body · {v := binding}`; children are the body followed by
    /// one node per binding, in the order of `vars`.
    Let {
        vars: Vec<Var>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub config: Expr,
    pub parent: Option<usize>,
    pub kind: NodeKind,
    pub children: Vec<usize>,
    /// Contractions on the edge from a driven parent.
    pub contractions: Vec<Contraction>,
    pub edge: Substitution,
    /// Dropped by a generalization above it.
    pub discarded: bool,
    /// Inequalities known to hold for the variables of `config`.
    pub restrictions: Restrictions,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub nodes: usize,
    pub folds: usize,
    pub generalizations: usize,
    pub splits: usize,
}

#[derive(Debug, Clone)]
pub struct ProcessTree {
    pub nodes: Vec<Node>,
    pub stats: Stats,
}

impl ProcessTree {
    pub const ROOT: usize = 0;

    pub fn live(&self) -> impl Iterator<Item = (usize, &Node)> {
        self.nodes.iter().enumerate().filter(|(_, n)| !n.discarded)
    }

    fn ancestors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        core::iter::successors(self.nodes[n].parent, |&a| self.nodes[a].parent)
    }
}

/// A residual program together with how to call it.
#[derive(Debug, Clone)]
pub struct Residual {
    pub program: Program,
    /// Parameters of the entry function, i.e. the goal's variables.
    pub params: Vec<Var>,
    pub tree: ProcessTree,
}

impl Residual {
    /// The residual call corresponding to the goal instantiated by `theta`.
    pub fn call(&self, theta: &Substitution) -> Expr {
        Expr(alloc::vec![Term::Call(self.program.entry().into(), theta.apply(&parameter_pattern(&self.params)))])
    }
}

/// Lays out parameters as an argument: s-variables bare, e-variables
/// bracketed except a final one.
pub fn parameter_pattern(params: &[Var]) -> Expr {
    params
        .iter()
        .enumerate()
        .map(|(i, v)| match v.kind {
            crate::lang::VarKind::E if i + 1 < params.len() => Term::Bracket(Expr(alloc::vec![v.term()])),
            _ => v.term(),
        })
        .collect()
}

struct Builder<'p> {
    program: &'p Program,
    opts: &'p ScpOptions,
    names: NameGen,
    tree: ProcessTree,
    stack: Vec<usize>,
    /// Driven nodes keyed by [`shape`].
    by_shape: BTreeMap<String, Vec<usize>>,
    /// Bodies of generalizations, in creation order.
    generalized: Vec<usize>,
}

impl Builder<'_> {
    fn add(&mut self, config: Expr, parent: Option<usize>) -> Result<usize, ScpError> {
        if self.tree.nodes.len() >= self.opts.node_budget {
            return Err(ScpError::BudgetExceeded { nodes: self.tree.nodes.len() });
        }
        self.tree.nodes.push(Node {
            config,
            parent,
            kind: NodeKind::Open,
            children: Vec::new(),
            contractions: Vec::new(),
            edge: Substitution::new(),
            discarded: false,
            restrictions: Restrictions::default(),
        });
        let id = self.tree.nodes.len() - 1;
        if let Some(p) = parent {
            self.tree.nodes[p].children.push(id);
        }
        self.tree.stats.nodes += 1;
        Ok(id)
    }

    fn add_restricted(&mut self, config: Expr, parent: usize, known: &Restrictions) -> Result<usize, ScpError> {
        let restrictions = known.restrict_to(&config);
        let k = self.add(config, Some(parent))?;
        self.tree.nodes[k].restrictions = restrictions;
        Ok(k)
    }

    /// Renamings of any driven node, found through the shape index, win
    /// over instances of an ancestor or of a generalized configuration.
    fn fold_target(&self, n: usize) -> Option<(usize, Substitution)> {
        let c = &self.tree.nodes[n].config;
        let same_shape = self.by_shape.get(&shape(c)).into_iter().flatten().copied();
        if let Some(hit) = same_shape
            .filter(|&t| self.usable(t))
            .filter_map(|t| instance::renaming(&self.tree.nodes[t].config, c).map(|s| (t, s)))
            .find(|(t, s)| self.sound(n, *t, s))
        {
            return Some(hit);
        }
        // Binding a call would move it out of evaluation order.
        self.instances(n).find(|(_, s)| s.iter().all(|(_, e)| !e.has_calls()))
    }

    fn usable(&self, t: usize) -> bool {
        let node = &self.tree.nodes[t];
        !node.discarded && node.kind == NodeKind::Driven
    }

    /// The target's restrictions must hold for the folded configuration.
    fn sound(&self, n: usize, t: usize, s: &Substitution) -> bool {
        self.tree.nodes[t].restrictions.implied_by(s, &self.tree.nodes[n].restrictions)
    }

    /// Ancestors and generalized configurations that `n` is an instance of.
    fn instances(&self, n: usize) -> impl Iterator<Item = (usize, Substitution)> + '_ {
        let c = &self.tree.nodes[n].config;
        let f = selected_function(c);
        self.tree
            .ancestors(n)
            .chain(self.generalized.iter().copied())
            .filter(move |&t| self.usable(t) && selected_function(&self.tree.nodes[t].config) == f)
            .filter_map(move |t| instance::instance_of(&self.tree.nodes[t].config, c).map(|s| (t, s)))
            .filter(move |(t, s)| self.sound(n, *t, s))
    }

    /// Splits `n` into an instance of an earlier configuration and the
    /// calls its substitution would have to carry.
    fn split_instance(&mut self, n: usize) -> Result<bool, ScpError> {
        let Some((t, s)) = self.instances(n).next() else {
            return Ok(false);
        };
        let mut bindings = Vec::new();
        let plain: Substitution =
            s.iter().map(|(v, e)| (v.clone(), abstract_calls(e, &mut self.names, &mut bindings))).collect();
        let body = plain.apply(&self.tree.nodes[t].config);
        self.make_let(n, body, bindings)?;
        self.tree.stats.splits += 1;
        Ok(true)
    }

    /// The nearest comparable ancestor that embeds into `n`. Configurations
    /// with pending inner calls are only checked when the call stack grows,
    /// so generalization happens between whole states of the computation.
    /// Failing that, once [`WHISTLE_CHAIN`] ancestors calling the same
    /// function embed, the farthest of those is taken, which keeps every
    /// branch finite.
    fn whistle(&self, n: usize) -> Option<usize> {
        let c = &self.tree.nodes[n].config;
        let (f, p, calls, size) = (selected_function(c), profile(c), call_count(c), c.size());
        let mut others = Vec::new();
        for a in self.tree.ancestors(n) {
            let node = &self.tree.nodes[a];
            if node.kind != NodeKind::Driven
                || !node.config.has_vars()
                || node.config.size() > size
                || selected_function(&node.config) != f
            {
                continue;
            }
            if (calls == 1 || calls > call_count(&node.config)) && profile(&node.config) == p {
                if embeds(&node.config, c) {
                    return Some(a);
                }
            } else {
                others.push(a);
            }
        }
        if others.len() < WHISTLE_CHAIN {
            return None;
        }
        others.into_iter().filter(|&a| embeds(&self.tree.nodes[a].config, c)).nth(WHISTLE_CHAIN - 1)
    }

    fn discard_below(&mut self, n: usize) {
        let mut todo = core::mem::take(&mut self.tree.nodes[n].children);
        while let Some(m) = todo.pop() {
            self.tree.nodes[m].discarded = true;
            todo.extend(self.tree.nodes[m].children.iter().copied());
        }
    }

    /// Turns `n` into `let vars = bindings in body`.
    fn make_let(&mut self, n: usize, body: Expr, bindings: Vec<(Var, Expr)>) -> Result<(), ScpError> {
        self.discard_below(n);
        let vars = bindings.iter().map(|(v, _)| v.clone()).collect();
        self.tree.nodes[n].kind = NodeKind::Let { vars };
        let known = self.tree.nodes[n].restrictions.clone();
        let body = self.add_restricted(body, n, &known)?;
        self.generalized.push(body);
        let mut kids = alloc::vec![body];
        for (_, e) in bindings {
            kids.push(self.add_restricted(e, n, &known)?);
        }
        self.stack.extend(kids.into_iter().rev());
        Ok(())
    }

    fn generalize(&mut self, a: usize, n: usize) -> Result<bool, ScpError> {
        let g = msg(&self.tree.nodes[a].config, &self.tree.nodes[n].config, &mut self.names);
        let trivial = g.general.len() == 1 && g.general.terms()[0].as_var().is_some();
        // An ancestor that is already as general as the pair cannot be
        // generalized further.
        if !trivial && !instance::is_renaming(&g.general, &self.tree.nodes[a].config) {
            let bindings =
                g.general.vars().into_iter().filter_map(|v| g.left.get(&v).map(|e| (v, e.clone()))).collect();
            self.make_let(a, g.general, bindings)?;
            self.tree.stats.generalizations += 1;
            return Ok(true);
        }
        // Nothing to gain above: split the lower configuration at its calls.
        let c = self.tree.nodes[n].config.clone();
        let mut bindings = Vec::new();
        let body = match c.terms() {
            [Term::Call(f, arg)] => {
                alloc::vec![Term::Call(f.clone(), abstract_calls(arg, &mut self.names, &mut bindings))].into()
            }
            _ => abstract_calls(&c, &mut self.names, &mut bindings),
        };
        if bindings.is_empty() {
            return Ok(false);
        }
        self.make_let(n, body, bindings)?;
        self.tree.stats.splits += 1;
        Ok(true)
    }

    fn step(&mut self, n: usize) -> Result<(), ScpError> {
        let c = self.tree.nodes[n].config.clone();
        if !c.has_calls() {
            self.tree.nodes[n].kind = NodeKind::Value;
            return Ok(());
        }
        if let Some((target, subst)) = self.fold_target(n) {
            debug_assert_eq!(subst.apply(&self.tree.nodes[target].config), c);
            self.tree.nodes[n].kind = NodeKind::Folded { target, subst };
            self.tree.stats.folds += 1;
            return Ok(());
        }
        if self.split_instance(n)? {
            return Ok(());
        }
        if self.opts.whistle && c.has_vars() {
            if let Some(a) = self.whistle(n) {
                if self.generalize(a, n)? {
                    return Ok(());
                }
            }
        }
        let known = self.tree.nodes[n].restrictions.clone();
        match drive_restricted(&c, &known, self.program, &mut self.names)? {
            Step::Value => self.tree.nodes[n].kind = NodeKind::Value,
            Step::Branches(branches) => {
                self.tree.nodes[n].kind = NodeKind::Driven;
                self.by_shape.entry(shape(&c)).or_default().push(n);
                let mut kids = Vec::new();
                for b in branches {
                    let abnormal = b.child.is_none();
                    let k = self.add(b.child.unwrap_or_default(), Some(n))?;
                    let node = &mut self.tree.nodes[k];
                    node.contractions = b.contractions;
                    node.edge = b.subst;
                    node.restrictions = b.restrictions;
                    if abnormal {
                        node.kind = NodeKind::Abnormal;
                    } else {
                        kids.push(k);
                    }
                }
                self.stack.extend(kids.into_iter().rev());
            }
        }
        Ok(())
    }
}

/// Number of calls in `e`, nested ones included.
fn call_count(e: &Expr) -> usize {
    e.terms()
        .iter()
        .map(|t| match t {
            Term::Call(_, a) => 1 + call_count(a),
            Term::Bracket(b) => call_count(b),
            _ => 0,
        })
        .sum()
}

/// Coarse class of a configuration: for the first [`PROFILE_LEN`]
/// brackets in preorder, whether each is empty, holds a closed term, or
/// holds only e-variables. Finitely many classes, so restricting the
/// whistle to equal classes keeps it a well-quasi-order.
fn profile(e: &Expr) -> Vec<u8> {
    fn go(e: &Expr, out: &mut Vec<u8>) {
        for t in e.terms() {
            if out.len() == PROFILE_LEN {
                return;
            }
            match t {
                Term::Bracket(b) => {
                    out.push(if b.is_empty() {
                        0
                    } else if b.terms().iter().all(Term::is_evar) {
                        2
                    } else {
                        1
                    });
                    go(b, out);
                }
                Term::Call(_, a) => go(a, out),
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    go(e, &mut out);
    out
}

const PROFILE_LEN: usize = 32;

/// The configuration with variable names erased; renamings share it.
fn shape(e: &Expr) -> String {
    fn go(e: &Expr, out: &mut String) {
        for t in e.terms() {
            match t {
                Term::Sym(s) => {
                    let _ = write!(out, "{} ", Expr(alloc::vec![Term::Sym(s.clone())]));
                }
                Term::SVar(_) => out.push_str("s "),
                Term::EVar(_) => out.push_str("e "),
                Term::Bracket(b) => {
                    out.push('(');
                    go(b, out);
                    out.push(')');
                }
                Term::Call(f, a) => {
                    let _ = write!(out, "<{f} ");
                    go(a, out);
                    out.push('>');
                }
            }
        }
    }
    let mut out = String::new();
    go(e, &mut out);
    out
}

/// Replaces each outermost call in `e` by a fresh e-variable.
fn abstract_calls(e: &Expr, names: &mut NameGen, out: &mut Vec<(Var, Expr)>) -> Expr {
    e.terms()
        .iter()
        .map(|t| match t {
            Term::Call(..) => {
                let v = names.evar();
                out.push((v.clone(), Expr(alloc::vec![t.clone()])));
                v.term()
            }
            Term::Bracket(b) => Term::Bracket(abstract_calls(b, names, out)),
            _ => t.clone(),
        })
        .collect()
}

/// Builds the completed process tree for `goal`.
pub fn build_tree(program: &Program, goal: &Expr, opts: &ScpOptions) -> Result<ProcessTree, ScpError> {
    match explore(program, goal, opts) {
        (tree, None) => Ok(tree),
        (_, Some(e)) => Err(e),
    }
}

/// Like [`build_tree`], but also returns the partial tree on failure.
pub fn explore(program: &Program, goal: &Expr, opts: &ScpOptions) -> (ProcessTree, Option<ScpError>) {
    let mut b = Builder {
        program,
        opts,
        names: NameGen::avoiding(goal.vars()),
        tree: ProcessTree { nodes: Vec::new(), stats: Stats::default() },
        stack: Vec::new(),
        by_shape: BTreeMap::new(),
        generalized: Vec::new(),
    };
    let mut run = || {
        let root = b.add(goal.clone(), None)?;
        b.stack.push(root);
        while let Some(n) = b.stack.pop() {
            if !b.tree.nodes[n].discarded && b.tree.nodes[n].kind == NodeKind::Open {
                b.step(n)?;
            }
        }
        Ok(())
    };
    let err = run().err();
    (b.tree, err)
}

/// Supercompiles `goal` (typically `<main e.xs>`) against `program`. The
/// residual entry is named after the goal's first function with a prime.
pub fn supercompile(program: &Program, goal: &Expr, opts: &ScpOptions) -> Result<Residual, ScpError> {
    let mut called = alloc::collections::BTreeSet::new();
    goal.called_functions(&mut called);
    let first = first_call(goal).ok_or(ScpError::NoCall)?;
    if let Some(f) = called.into_iter().find(|f| program.function(f).is_none()) {
        return Err(ScpError::UndefinedFunction(f));
    }
    let tree = build_tree(program, goal, opts)?;
    let mut entry = first;
    entry.push('\'');
    let params = goal.vars();
    let program = residual::residualize(&tree, &entry);
    Ok(Residual { program, params, tree })
}

fn first_call(e: &Expr) -> Option<String> {
    e.terms().iter().find_map(|t| match t {
        Term::Call(f, _) => Some(f.clone()),
        Term::Bracket(b) => first_call(b),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval, DEFAULT_STEP_BUDGET};
    use crate::syntax::{parse_expr, parse_program, print_program};

    const EQUAL: &str = "
main { e.X = <equal ('ab' e.X)(e.X 'ba')>; }
equal {
  (s.x e.xs)(s.x e.ys) = <equal (e.xs)(e.ys)>;
  ()() = True;
  (e.xs)(e.ys) = False;
}";

    #[test]
    fn word_equation_residual() {
        let p = parse_program(EQUAL).unwrap();
        let r = supercompile(&p, &parse_expr("<main e.X>").unwrap(), &ScpOptions::default()).unwrap();
        let expected = "main' {\n  'ab' e.1 = <main' e.1>;\n  'a' = True;\n  e.1 = False;\n}\n";
        assert_eq!(print_program(&r.program), expected);
    }

    #[test]
    fn ground_goal_folds_to_a_constant() {
        let p = parse_program(EQUAL).unwrap();
        let r = supercompile(&p, &parse_expr("<main 'a'>").unwrap(), &ScpOptions::default()).unwrap();
        assert!(r.params.is_empty());
        assert_eq!(print_program(&r.program), "main' { = True; }\n");
    }

    #[test]
    fn calls_in_fold_substitutions_are_split_off() {
        let p = parse_program("Rev { s.x e.r = <Rev e.r> s.x; (e.i) e.r = <Rev e.r> (<Rev e.i>); = ; }").unwrap();
        let goal = parse_expr("<Rev e.1>").unwrap();
        let r = supercompile(&p, &goal, &ScpOptions::default()).unwrap();
        assert!(r.tree.live().all(|(_, n)| match &n.kind {
            NodeKind::Folded { subst, .. } => subst.iter().all(|(_, e)| !e.has_calls()),
            _ => true,
        }));
        for arg in ["", "()", "'a' ('b' ('c') 'd') 'e'", "(('x')) 'y'"] {
            let theta: Substitution = [(Var::e("1"), parse_expr(arg).unwrap())].into_iter().collect();
            let src = eval(&p, &theta.apply(&goal), DEFAULT_STEP_BUDGET).unwrap();
            let res = eval(&r.program, &r.call(&theta), DEFAULT_STEP_BUDGET).unwrap();
            assert!(src.agrees_with(&res), "{arg}: {src} vs {res}");
        }
    }

    #[test]
    fn whistle_chain_bounds_constant_call_depth() {
        let p = parse_program(
            "Rev { s.x e.r = <Rev e.r> s.x; = ; }
             Dup { s.x e.r = s.x s.x <Dup e.r>; = ; }",
        )
        .unwrap();
        let r = supercompile(&p, &parse_expr("<Dup <Rev e.1>>").unwrap(), &ScpOptions::default()).unwrap();
        assert!(r.tree.stats.nodes < 500, "{} nodes", r.tree.stats.nodes);
    }
}
