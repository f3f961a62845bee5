//! Problem generators and brute-force oracles: word equations and the
//! missionaries-cannibals crossing puzzle.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::lang::{Expr, Program, Symbol, Term};
use crate::syntax::parse_program;

// ---------------------------------------------------------------------------
// Word equations

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WordItem {
    Letter(char),
    Var(char),
}

/// An equation `lhs = rhs` between words over letters and variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordEquation {
    pub lhs: Vec<WordItem>,
    pub rhs: Vec<WordItem>,
    pub alphabet: BTreeSet<char>,
    /// Variables in order of first occurrence.
    pub variables: Vec<char>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordEquationError {
    MissingEquals,
    InvalidChar(char),
    EmptyAlphabet,
}

impl fmt::Display for WordEquationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordEquationError::MissingEquals => f.write_str("word equation needs exactly one `=`"),
            WordEquationError::InvalidChar(c) => {
                write!(f, "invalid character {c:?} (lowercase letters are letters, uppercase are variables)")
            }
            WordEquationError::EmptyAlphabet => f.write_str("alphabet is empty"),
        }
    }
}

impl core::error::Error for WordEquationError {}

impl WordEquation {
    /// Parses `abX=Xba`: lowercase letters are alphabet symbols, uppercase
    /// letters are variables. The alphabet is the set of letters used.
    pub fn parse(text: &str) -> Result<Self, WordEquationError> {
        let mut sides = text.split('=');
        let (Some(l), Some(r), None) = (sides.next(), sides.next(), sides.next()) else {
            return Err(WordEquationError::MissingEquals);
        };
        let side = |s: &str| -> Result<Vec<WordItem>, WordEquationError> {
            s.chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    if c.is_ascii_lowercase() {
                        Ok(WordItem::Letter(c))
                    } else if c.is_ascii_uppercase() {
                        Ok(WordItem::Var(c))
                    } else {
                        Err(WordEquationError::InvalidChar(c))
                    }
                })
                .collect()
        };
        let (lhs, rhs) = (side(l)?, side(r)?);
        let mut alphabet = BTreeSet::new();
        let mut variables = Vec::new();
        for item in lhs.iter().chain(&rhs) {
            match *item {
                WordItem::Letter(c) => {
                    alphabet.insert(c);
                }
                WordItem::Var(v) if !variables.contains(&v) => variables.push(v),
                WordItem::Var(_) => {}
            }
        }
        Ok(WordEquation { lhs, rhs, alphabet, variables })
    }

    pub fn with_alphabet(mut self, alphabet: impl IntoIterator<Item = char>) -> Self {
        self.alphabet.extend(alphabet);
        self
    }

    fn instantiate(&self, side: &[WordItem], words: &[String]) -> String {
        let mut out = String::new();
        for item in side {
            match *item {
                WordItem::Letter(c) => out.push(c),
                WordItem::Var(v) => {
                    let i = self.variables.iter().position(|&w| w == v).unwrap();
                    out.push_str(&words[i]);
                }
            }
        }
        out
    }

    /// Checks whether the assignment (one word per variable, in variable
    /// order) is a solution.
    pub fn is_solution(&self, words: &[String]) -> bool {
        self.instantiate(&self.lhs, words) == self.instantiate(&self.rhs, words)
    }
}

impl fmt::Display for WordEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &[WordItem]| -> String {
            s.iter()
                .map(|i| match *i {
                    WordItem::Letter(c) | WordItem::Var(c) => c,
                })
                .collect()
        };
        write!(f, "{}={}", side(&self.lhs), side(&self.rhs))
    }
}

/// The word-equality predicate shared by all encoded equations.
pub const EQUAL_SOURCE: &str = "equal {
  (s.x e.xs)(s.x e.ys) = <equal (e.xs)(e.ys)>;
  ()() = True;
  (e.xs)(e.ys) = False;
}
";

/// Residual-call argument layout shared with the supercompiler: every
/// e-variable but the last is wrapped in a bracket.
fn parameter_pattern(vars: &[String]) -> String {
    let n = vars.len();
    vars.iter()
        .enumerate()
        .map(|(i, v)| if i + 1 == n { format!("e.{v}") } else { format!("(e.{v})") })
        .collect::<Vec<_>>()
        .join(" ")
}

fn side_text(side: &[WordItem]) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut letters = String::new();
    for item in side {
        match *item {
            WordItem::Letter(c) => letters.push(c),
            WordItem::Var(v) => {
                if !letters.is_empty() {
                    parts.push(format!("'{letters}'"));
                    letters.clear();
                }
                parts.push(format!("e.{v}"));
            }
        }
    }
    if !letters.is_empty() {
        parts.push(format!("'{letters}'"));
    }
    parts.join(" ")
}

/// Source text of the program deciding whether an assignment solves `eq`.
pub fn word_equation_source(eq: &WordEquation) -> String {
    let vars: Vec<String> = eq.variables.iter().map(|c| c.to_string()).collect();
    format!(
        "main {{ {} = <equal ({})({})>; }}\n{}",
        parameter_pattern(&vars),
        side_text(&eq.lhs),
        side_text(&eq.rhs),
        EQUAL_SOURCE
    )
}

/// Encodes `eq` as a program and the parameterized goal `<main e.X ...>`.
pub fn encode_word_equation(eq: &WordEquation) -> (Program, Expr) {
    let program = parse_program(&word_equation_source(eq)).expect("generated program is well formed");
    let vars: Vec<String> = eq.variables.iter().map(|c| c.to_string()).collect();
    let goal = crate::syntax::parse_expr(&format!("<main {}>", parameter_pattern(&vars)))
        .expect("generated goal is well formed");
    (program, goal)
}

/// The argument of `main` for a concrete assignment.
pub fn word_equation_argument(words: &[String]) -> Expr {
    let n = words.len();
    let mut out = Expr::empty();
    for (i, w) in words.iter().enumerate() {
        if i + 1 == n {
            out.extend(Expr::chars(w));
        } else {
            out.push(Term::Bracket(Expr::chars(w)));
        }
    }
    out
}

/// All words over `alphabet` of length at most `max_len`, shortest first,
/// then lexicographic.
pub fn words_up_to(alphabet: &BTreeSet<char>, max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &c in alphabet {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Exhaustively enumerates assignments with every variable bound to a word
/// of length at most `max_len` and returns those solving `eq`.
pub fn word_oracle(eq: &WordEquation, max_len: usize) -> BTreeSet<Vec<String>> {
    let words = words_up_to(&eq.alphabet, max_len);
    let mut out = BTreeSet::new();
    let mut current: Vec<String> = Vec::new();
    fn go(eq: &WordEquation, words: &[String], current: &mut Vec<String>, out: &mut BTreeSet<Vec<String>>) {
        if current.len() == eq.variables.len() {
            if eq.is_solution(current) {
                out.insert(current.clone());
            }
            return;
        }
        for w in words {
            current.push(w.clone());
            go(eq, words, current, out);
            current.pop();
        }
    }
    go(eq, &words, &mut current, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Missionaries and cannibals

/// A boat load, named by the initials of its passengers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Boat {
    MM,
    CC,
    MC,
    M,
    C,
}

impl Boat {
    pub const ALL: [Boat; 5] = [Boat::MM, Boat::CC, Boat::MC, Boat::M, Boat::C];

    /// (missionaries, cannibals) carried.
    pub fn load(self) -> (u32, u32) {
        match self {
            Boat::MM => (2, 0),
            Boat::CC => (0, 2),
            Boat::MC => (1, 1),
            Boat::M => (1, 0),
            Boat::C => (0, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Boat::MM => "MM",
            Boat::CC => "CC",
            Boat::MC => "MC",
            Boat::M => "M",
            Boat::C => "C",
        }
    }

    pub fn from_name(s: &str) -> Option<Boat> {
        Boat::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn symbol(self) -> Symbol {
        Symbol::ident(self.name())
    }

    /// The identifier symbols of all boat states.
    pub fn alphabet() -> Vec<Symbol> {
        Boat::ALL.iter().map(|b| b.symbol()).collect()
    }
}

impl fmt::Display for Boat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn path_expr(path: &[Boat]) -> Expr {
    path.iter().map(|b| Term::Sym(b.symbol())).collect()
}

/// Crowd on one bank as (excess missionaries, pairs, excess cannibals).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CrowdState {
    pub m: u32,
    pub p: u32,
    pub c: u32,
}

impl CrowdState {
    pub fn new(missionaries: u32, cannibals: u32) -> Self {
        let p = missionaries.min(cannibals);
        CrowdState { m: missionaries - p, p, c: cannibals - p }
    }

    pub fn missionaries(&self) -> u32 {
        self.m + self.p
    }

    pub fn cannibals(&self) -> u32 {
        self.c + self.p
    }

    /// The three unary brackets `('m'..)('p'..)('c'..)` without the
    /// enclosing bracket.
    pub fn contents(&self) -> Expr {
        let unary = |c: char, n: u32| Term::Bracket((0..n).map(|_| Term::chr(c)).collect());
        Expr(vec![unary('m', self.m), unary('p', self.p), unary('c', self.c)])
    }

    pub fn decode(e: &Expr) -> Option<CrowdState> {
        let [Term::Bracket(inner)] = e.terms() else { return None };
        let [Term::Bracket(m), Term::Bracket(p), Term::Bracket(c)] = inner.terms() else {
            return None;
        };
        let count = |e: &Expr, ch: char| -> Option<u32> {
            e.terms().iter().all(|t| *t == Term::chr(ch)).then_some(e.len() as u32)
        };
        let s = CrowdState { m: count(m, 'm')?, p: count(p, 'p')?, c: count(c, 'c')? };
        (s.m == 0 || s.c == 0).then_some(s)
    }
}

/// `n` missionaries and `k` cannibals as `(('m'..)('p'..)('c'..))`.
pub fn encode_crowd(n: u32, k: u32) -> Expr {
    Expr(vec![Term::Bracket(CrowdState::new(n, k).contents())])
}

/// Which parts of the start crowd are open-ended. Each open part gets a
/// trailing e-variable (`e.m`, `e.p`, `e.c`), so `pairs` with 4 pairs reads
/// "at least four pairs".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Parametric {
    pub missionaries: bool,
    pub pairs: bool,
    pub cannibals: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PuzzleSpec {
    pub missionaries: u32,
    pub cannibals: u32,
    /// Use the cutting sentence instead of the `False` answer on an
    /// exhausted path.
    pub cut_false: bool,
    /// Abort on two identical consecutive boat states.
    pub block_repetition: bool,
    /// Boat states limited to MM, MC, CC going right and M, C going left.
    pub restricted_move: bool,
    pub parametric: Parametric,
}

impl PuzzleSpec {
    pub fn new(missionaries: u32, cannibals: u32) -> Self {
        PuzzleSpec {
            missionaries,
            cannibals,
            cut_false: false,
            block_repetition: false,
            restricted_move: false,
            parametric: Parametric::default(),
        }
    }

    pub fn cut_false(mut self, on: bool) -> Self {
        self.cut_false = on;
        self
    }

    pub fn block_repetition(mut self, on: bool) -> Self {
        self.block_repetition = on;
        self
    }

    pub fn restricted_move(mut self, on: bool) -> Self {
        self.restricted_move = on;
        self
    }

    pub fn parametric(mut self, p: Parametric) -> Self {
        self.parametric = p;
        self
    }

    /// Start crowd with the open parts as e-variables.
    pub fn crowd(&self) -> Expr {
        let s = CrowdState::new(self.missionaries, self.cannibals);
        let part = |c: char, n: u32, open: bool, var: &str| {
            let mut e: Expr = (0..n).map(|_| Term::chr(c)).collect();
            if open {
                e.push(Term::EVar(var.into()));
            }
            Term::Bracket(e)
        };
        let inner = Expr(vec![
            part('m', s.m, self.parametric.missionaries, "m"),
            part('p', s.p, self.parametric.pairs, "p"),
            part('c', s.c, self.parametric.cannibals, "c"),
        ]);
        Expr(vec![Term::Bracket(inner)])
    }
}

const MOVE_FULL: &str = "Move {
  s.a L (e.l)(e.r) = R <Minus s.a (e.l)> <Plus s.a (e.r)>;
  s.a R (e.l)(e.r) = L <Plus s.a (e.l)> <Minus s.a (e.r)>;
}
";

const MOVE_RESTRICTED: &str = "Move {
  MM L (e.l)(e.r) = R <Minus MM (e.l)> <Plus MM (e.r)>;
  MC L (e.l)(e.r) = R <Minus MC (e.l)> <Plus MC (e.r)>;
  CC L (e.l)(e.r) = R <Minus CC (e.l)> <Plus CC (e.r)>;
  M R (e.l)(e.r) = L <Plus M (e.l)> <Minus M (e.r)>;
  C R (e.l)(e.r) = L <Plus C (e.l)> <Minus C (e.r)>;
}
";

const ARITHMETIC: &str = "Minus {
  MM (('mm' e.m)(e.p)()) = ((e.m)(e.p)());
  MM (()('pp')()) = (()()('cc'));
  MM (('m')('p')()) = (()()('c'));
  CC (()()('cc' e.c)) = (()()(e.c));
  CC ((e.m)('pp' e.p)()) = (('mm' e.m)(e.p)());
  MC ((e.m)('p' e.p)()) = ((e.m)(e.p)());
  M (()('p')()) = (()()('c'));
  M (('m' e.m)(e.p)()) = ((e.m)(e.p)());
  C (()()('c' e.c)) = (()()(e.c));
  C ((e.m)('p' e.p)()) = (('m' e.m)(e.p)());
}
Plus {
  MM (()()('cc')) = (()('pp')());
  MM (()()('c')) = (('m')('p')());
  MM ((e.m)(e.p)()) = (('mm' e.m)(e.p)());
  CC (('mm' e.m)(e.p)()) = ((e.m)('pp' e.p)());
  CC (()()(e.c)) = (()()('cc' e.c));
  MC ((e.m)(e.p)()) = ((e.m)('p' e.p)());
  M (()()('c')) = (()('p')());
  M ((e.m)(e.p)()) = (('m' e.m)(e.p)());
  C (('m' e.m)(e.p)()) = ((e.m)('p' e.p)());
  C (()()(e.c)) = (()()('c' e.c));
}
";

/// Source text of the crossing interpreter for `spec`.
pub fn puzzle_source(spec: &PuzzleSpec) -> String {
    let mut s = String::from("mainInt { (e.l) s.a e.path = <Int s.a <Move s.a L (e.l)(()()())> e.path>; }\n");
    s.push_str("Int {\n  s.pa R (()()())(e.r) e.path = True e.path;\n");
    if spec.cut_false {
        s.push_str("  s.pa s.d (e.l)(e.r) = <CutFalse>;\n");
    } else {
        s.push_str("  s.pa s.d (e.l)(e.r) = False (e.r);\n");
    }
    if spec.block_repetition {
        s.push_str("  s.pa s.d (e.l)(e.r) s.pa e.path = <BlockRepetition>;\n");
    }
    s.push_str("  s.pa s.d (e.l)(e.r) s.x e.path = <Int s.x <Move s.x s.d (e.l)(e.r)> e.path>;\n}\n");
    if spec.cut_false {
        s.push_str("CutFalse { Deadlock = ; }\n");
    }
    if spec.block_repetition {
        s.push_str("BlockRepetition { Deadlock = ; }\n");
    }
    s.push_str(if spec.restricted_move { MOVE_RESTRICTED } else { MOVE_FULL });
    s.push_str(ARITHMETIC);
    s
}

/// The interpreter program and the goal `<mainInt (crowd) e.path>`.
pub fn build_puzzle_program(spec: &PuzzleSpec) -> (Program, Expr) {
    let program = parse_program(&puzzle_source(spec)).expect("generated program is well formed");
    let mut arg = spec.crowd();
    arg.push(Term::EVar("path".into()));
    (program, Expr(vec![Term::Call("mainInt".into(), arg)]))
}

/// Bank safety: cannibals never outnumber present missionaries.
fn safe(m: u32, c: u32) -> bool {
    m == 0 || c <= m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PuzzleState {
    /// Missionaries and cannibals on the left bank.
    ml: u32,
    cl: u32,
    boat_left: bool,
    last: Option<Boat>,
}

/// Shortest crossing sequences found by breadth-first search over
/// (left bank, boat side) states, or `None` if no sequence of length at
/// most `cap` moves everybody to the right bank.
///
/// With `forbid_immediate_repeat`, a boat state may not follow itself.
pub fn puzzle_oracle(
    n: u32,
    k: u32,
    forbid_immediate_repeat: bool,
    cap: usize,
) -> Option<(usize, BTreeSet<Vec<Boat>>)> {
    if !safe(n, k) {
        return None;
    }
    let start = PuzzleState { ml: n, cl: k, boat_left: true, last: None };
    let is_goal = |s: &PuzzleState| s.ml == 0 && s.cl == 0;
    if is_goal(&start) {
        return Some((0, BTreeSet::from([Vec::new()])));
    }
    let mut depth: BTreeMap<PuzzleState, usize> = BTreeMap::from([(start, 0)]);
    let mut parents: BTreeMap<PuzzleState, Vec<(PuzzleState, Boat)>> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    let mut found: Option<usize> = None;
    let mut goals = BTreeSet::new();
    while let Some(s) = queue.pop_front() {
        let d = depth[&s];
        if found.is_some_and(|f| d >= f) || d >= cap {
            continue;
        }
        for b in Boat::ALL {
            if forbid_immediate_repeat && s.last == Some(b) {
                continue;
            }
            let (bm, bc) = b.load();
            let (ml, cl) = if s.boat_left {
                if s.ml < bm || s.cl < bc {
                    continue;
                }
                (s.ml - bm, s.cl - bc)
            } else {
                if n - s.ml < bm || k - s.cl < bc {
                    continue;
                }
                (s.ml + bm, s.cl + bc)
            };
            if !safe(ml, cl) || !safe(n - ml, k - cl) {
                continue;
            }
            let next = PuzzleState { ml, cl, boat_left: !s.boat_left, last: forbid_immediate_repeat.then_some(b) };
            match depth.get(&next) {
                Some(&dn) if dn == d + 1 => parents.entry(next).or_default().push((s, b)),
                Some(_) => {}
                None => {
                    depth.insert(next, d + 1);
                    parents.entry(next).or_default().push((s, b));
                    if is_goal(&next) {
                        found = Some(d + 1);
                        goals.insert(next);
                    } else {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    let len = found?;
    let mut paths = BTreeSet::new();
    fn unwind(
        s: &PuzzleState,
        parents: &BTreeMap<PuzzleState, Vec<(PuzzleState, Boat)>>,
        suffix: &mut Vec<Boat>,
        out: &mut BTreeSet<Vec<Boat>>,
    ) {
        match parents.get(s) {
            None => {
                let mut p = suffix.clone();
                p.reverse();
                out.insert(p);
            }
            Some(ps) => {
                for (prev, b) in ps {
                    suffix.push(*b);
                    unwind(prev, parents, suffix, out);
                    suffix.pop();
                }
            }
        }
    }
    for g in &goals {
        unwind(g, &parents, &mut Vec::new(), &mut paths);
    }
    Some((len, paths))
}

/// Solvability table indexed `[cannibals][missionaries]`.
pub fn answer_matrix(max_m: u32, max_c: u32) -> Vec<Vec<bool>> {
    (0..=max_c)
        .map(|c| (0..=max_m).map(|m| puzzle_oracle(m, c, false, 4 * (m + c) as usize + 4).is_some()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{eval_call, Outcome, DEFAULT_STEP_BUDGET};
    use crate::syntax::parse_expr;

    #[test]
    fn crowd_encoding() {
        assert_eq!(encode_crowd(5, 3), parse_expr("(('mm')('ppp')())").unwrap());
        assert_eq!(encode_crowd(2, 3), parse_expr("(()('pp')('c'))").unwrap());
        assert_eq!(encode_crowd(0, 0), parse_expr("(()()())").unwrap());
        for n in 0..6 {
            for k in 0..6 {
                let s = CrowdState::decode(&encode_crowd(n, k)).unwrap();
                assert!(s.m == 0 || s.c == 0);
                assert_eq!((s.missionaries(), s.cannibals()), (n, k));
            }
        }
    }

    #[test]
    fn word_equation_parse_and_source() {
        let eq = WordEquation::parse("abX=Xba").unwrap();
        assert_eq!(eq.variables, vec!['X']);
        assert_eq!(eq.alphabet, BTreeSet::from(['a', 'b']));
        assert_eq!(eq.to_string(), "abX=Xba");
        assert!(word_equation_source(&eq).starts_with("main { e.X = <equal ('ab' e.X)(e.X 'ba')>; }"));
        assert_eq!(WordEquation::parse("ab"), Err(WordEquationError::MissingEquals));
        assert_eq!(WordEquation::parse("a1=b"), Err(WordEquationError::InvalidChar('1')));
    }

    #[test]
    fn oracle_small_cases() {
        let eq = WordEquation::parse("abX=Xba").unwrap();
        let sols: Vec<String> = word_oracle(&eq, 5).into_iter().map(|mut v| v.remove(0)).collect();
        assert_eq!(sols, vec!["a".to_string(), "aba".into(), "ababa".into()]);
        let eq = WordEquation::parse("abXa=Xba").unwrap();
        assert!(word_oracle(&eq, 8).is_empty());
        let eq = WordEquation::parse("X=X").unwrap().with_alphabet(['a']);
        assert_eq!(word_oracle(&eq, 1).len(), 2);
    }

    #[test]
    fn encoded_program_agrees_with_string_check() {
        let eq = WordEquation::parse("abX=Xba").unwrap();
        let (p, _) = encode_word_equation(&eq);
        for w in words_up_to(&eq.alphabet, 7) {
            let want = if eq.is_solution(core::slice::from_ref(&w)) { "True" } else { "False" };
            let got = eval_call(&p, "main", word_equation_argument(&[w]), DEFAULT_STEP_BUDGET).unwrap();
            assert_eq!(got, Outcome::Value(parse_expr(want).unwrap()));
        }
    }

    #[test]
    fn interpreter_runs_the_sample_path() {
        let spec = PuzzleSpec::new(3, 3).block_repetition(true);
        let (p, _) = build_puzzle_program(&spec);
        let arg = parse_expr("(()('ppp')()) CC C CC C MM MC MM C CC M MC MC").unwrap();
        let out = eval_call(&p, "mainInt", arg, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(out, Outcome::Value(parse_expr("True MC").unwrap()));
    }

    #[test]
    fn goal_shapes() {
        let spec = PuzzleSpec::new(2, 2).cut_false(true).block_repetition(true);
        let (_, goal) = build_puzzle_program(&spec);
        assert_eq!(goal, parse_expr("<mainInt (()('pp')()) e.path>").unwrap());
        let spec = PuzzleSpec::new(4, 4).parametric(Parametric { pairs: true, ..Default::default() });
        assert_eq!(build_puzzle_program(&spec).1, parse_expr("<mainInt (()('pppp' e.p)()) e.path>").unwrap());
    }

    #[test]
    fn restricted_move_domain() {
        let spec = PuzzleSpec::new(3, 2).restricted_move(true);
        let (p, _) = build_puzzle_program(&spec);
        let moves = p.sentences("Move").unwrap();
        let heads: Vec<String> =
            moves.iter().map(|s| crate::syntax::print_expr(&Expr(s.pattern.terms()[..2].to_vec()))).collect();
        assert_eq!(heads, vec!["MM L", "MC L", "CC L", "M R", "C R"]);
    }

    #[test]
    fn oracle_examples() {
        let (len, paths) = puzzle_oracle(2, 2, false, 20).unwrap();
        assert_eq!(len, 5);
        assert!(paths.contains(&vec![Boat::CC, Boat::C, Boat::MM, Boat::M, Boat::MC]));
        assert!(puzzle_oracle(4, 4, false, 40).is_none());
        assert_eq!(puzzle_oracle(1, 0, false, 8), Some((1, BTreeSet::from([vec![Boat::M]]))));
        assert_eq!(puzzle_oracle(0, 0, false, 0), Some((0, BTreeSet::from([vec![]]))));
        assert!(puzzle_oracle(1, 2, false, 20).is_none());
    }

    #[test]
    fn repeat_free_search_keeps_shortest_length() {
        for n in 0..5 {
            for k in 0..5 {
                let a = puzzle_oracle(n, k, false, 30).map(|r| r.0);
                let b = puzzle_oracle(n, k, true, 30).map(|r| r.0);
                assert_eq!(a, b, "({n},{k})");
            }
        }
    }

    #[test]
    fn oracle_paths_run_to_true_on_interpreter() {
        for n in 0..=3 {
            for k in 0..=3 {
                let Some((len, paths)) = puzzle_oracle(n, k, false, 30) else { continue };
                if len == 0 {
                    continue;
                }
                let (p, _) = build_puzzle_program(&PuzzleSpec::new(n, k));
                for path in paths {
                    let arg = encode_crowd(n, k).concat(path_expr(&path));
                    let out = eval_call(&p, "mainInt", arg, DEFAULT_STEP_BUDGET).unwrap();
                    let v = out.value().expect("value");
                    assert!(v.contains_symbol(&Symbol::ident("True")), "({n},{k}) {path:?}");
                }
            }
        }
    }
}
