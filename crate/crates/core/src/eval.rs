//! Strict (applicative-order) evaluator for ground expressions.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::lang::{Expr, Program, Term};
use crate::matching::match_pattern;

/// Default number of rewrites allowed for one evaluation.
pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

/// Result of evaluating a ground expression.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Value(Expr),
    /// No sentence of `function` matched `argument` ("recognition impossible").
    AbnormalStop {
        function: String,
        argument: Expr,
    },
    BudgetExceeded,
}

impl Outcome {
    pub fn value(&self) -> Option<&Expr> {
        match self {
            Outcome::Value(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_abnormal(&self) -> bool {
        matches!(self, Outcome::AbnormalStop { .. })
    }

    /// Same value, or both abnormal stops (the stuck call may differ in
    /// form between a source program and its residual).
    pub fn agrees_with(&self, other: &Outcome) -> bool {
        match (self, other) {
            (Outcome::Value(a), Outcome::Value(b)) => a == b,
            (Outcome::AbnormalStop { .. }, Outcome::AbnormalStop { .. }) => true,
            (Outcome::BudgetExceeded, Outcome::BudgetExceeded) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(e) => write!(f, "{e}"),
            Outcome::AbnormalStop { function, argument } => {
                write!(f, "abnormal stop: <{function} {argument}>")
            }
            Outcome::BudgetExceeded => f.write_str("step budget exceeded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    UndefinedFunction(String),
    /// The expression still contains variables.
    NotGround,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UndefinedFunction(n) => write!(f, "call to undefined function `{n}`"),
            EvalError::NotGround => f.write_str("expression contains variables"),
        }
    }
}

impl core::error::Error for EvalError {}

enum Stop {
    Abnormal(String, Expr),
    Budget,
    Error(EvalError),
}

enum FrameKind {
    Root,
    Bracket,
    /// Evaluating the argument of a call to this function.
    Arg(String),
    /// Evaluating an instantiated right-hand side.
    Body,
}

struct Frame {
    /// Remaining terms, reversed.
    todo: Vec<Term>,
    out: Vec<Term>,
    kind: FrameKind,
}

impl Frame {
    fn new(e: &Expr, kind: FrameKind) -> Self {
        Frame { todo: e.terms().iter().rev().cloned().collect(), out: Vec::new(), kind }
    }
}

/// Explicit-stack machine; pending calls live on the heap, so deep
/// recursion in the object program is bounded only by the step budget.
fn run(program: &Program, expr: &Expr, budget: u64) -> Result<Expr, Stop> {
    let mut steps = 0u64;
    let mut stack = alloc::vec![Frame::new(expr, FrameKind::Root)];
    loop {
        let top = stack.last_mut().unwrap();
        if let Some(t) = top.todo.pop() {
            match t {
                Term::Sym(_) => top.out.push(t),
                Term::Bracket(b) => stack.push(Frame::new(&b, FrameKind::Bracket)),
                Term::Call(f, a) => stack.push(Frame::new(&a, FrameKind::Arg(f))),
                Term::SVar(_) | Term::EVar(_) => return Err(Stop::Error(EvalError::NotGround)),
            }
            continue;
        }
        let done = stack.pop().unwrap();
        match done.kind {
            FrameKind::Root => return Ok(Expr(done.out)),
            FrameKind::Bracket => {
                stack.last_mut().unwrap().out.push(Term::Bracket(Expr(done.out)));
            }
            FrameKind::Body => stack.last_mut().unwrap().out.extend(done.out),
            FrameKind::Arg(function) => {
                steps += 1;
                if steps > budget {
                    return Err(Stop::Budget);
                }
                let arg = Expr(done.out);
                let sentences = program
                    .sentences(&function)
                    .ok_or_else(|| Stop::Error(EvalError::UndefinedFunction(function.clone())))?;
                let Some((s, subst)) = sentences.iter().find_map(|s| match_pattern(&s.pattern, &arg).map(|m| (s, m)))
                else {
                    return Err(Stop::Abnormal(function, arg));
                };
                stack.push(Frame::new(&subst.apply(&s.body), FrameKind::Body));
            }
        }
    }
}

/// Evaluates `expr` innermost-leftmost; each rewrite costs one step.
pub fn eval(program: &Program, expr: &Expr, step_budget: u64) -> Result<Outcome, EvalError> {
    if expr.has_vars() {
        return Err(EvalError::NotGround);
    }
    match run(program, expr, step_budget) {
        Ok(v) => Ok(Outcome::Value(v)),
        Err(Stop::Abnormal(function, argument)) => Ok(Outcome::AbnormalStop { function, argument }),
        Err(Stop::Budget) => Ok(Outcome::BudgetExceeded),
        Err(Stop::Error(e)) => Err(e),
    }
}

/// Evaluates `<function arg>`.
pub fn eval_call(program: &Program, function: &str, arg: Expr, step_budget: u64) -> Result<Outcome, EvalError> {
    eval(program, &Expr(alloc::vec![Term::Call(function.into(), arg)]), step_budget)
}
