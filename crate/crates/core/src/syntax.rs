//! Concrete syntax: parser, validator and canonical printer.
//!
//! ```text
//! program  := { fundef }
//! fundef   := NAME "{" { sentence } "}"
//! sentence := expr? "=" expr? ";"
//! term     := "'" chars "'" | NAME | "s." IDENT | "e." IDENT
//!           | "(" expr ")" | "<" NAME expr ">"
//! ```
//!
//! The first function of a file is the entry point.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write};

use crate::lang::{Expr, Function, Program, Sentence, Symbol, Term, Var, VarKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken {
        expected: &'static str,
        found: String,
    },
    UnterminatedString,
    UnterminatedComment,
    /// An identifier symbol must start with an uppercase letter.
    LowercaseSymbol(String),
    CallInPattern(String),
    RepeatedEVar(String),
    /// More than one e-variable on the same bracket level of a pattern.
    OpenVariables(String, String),
    FreeVariable(String),
    UndefinedFunction(String),
    DuplicateFunction(String),
    EmptyProgram,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnexpectedToken { expected, found } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnterminatedString => write!(f, "unterminated quoted string"),
            ParseErrorKind::UnterminatedComment => write!(f, "unterminated comment"),
            ParseErrorKind::LowercaseSymbol(n) => {
                write!(f, "identifier symbol `{n}` must start with an uppercase letter")
            }
            ParseErrorKind::CallInPattern(n) => write!(f, "call to `{n}` in a pattern"),
            ParseErrorKind::RepeatedEVar(n) => write!(f, "e-variable `{n}` repeated in pattern"),
            ParseErrorKind::OpenVariables(a, b) => {
                write!(f, "e-variables `{a}` and `{b}` share one bracket level")
            }
            ParseErrorKind::FreeVariable(n) => write!(f, "variable `{n}` is not bound by the pattern"),
            ParseErrorKind::UndefinedFunction(n) => write!(f, "undefined function `{n}`"),
            ParseErrorKind::DuplicateFunction(n) => write!(f, "function `{n}` defined twice"),
            ParseErrorKind::EmptyProgram => write!(f, "program defines no functions"),
        }
    }
}

impl core::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Str(String),
    Name(String),
    Var(Var),
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Eq,
    Semi,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Str(s) => write!(f, "'{s}'"),
            Tok::Name(n) => write!(f, "`{n}`"),
            Tok::Var(v) => write!(f, "`{v}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LAngle => f.write_str("`<`"),
            Tok::RAngle => f.write_str("`>`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, kind| ParseError { line, col, kind };
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let (sl, sc) = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(err(sl, sc, ParseErrorKind::UnterminatedComment));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let tok = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '<' => Some(Tok::LAngle),
            '>' => Some(Tok::RAngle),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '=' => Some(Tok::Eq),
            ';' => Some(Tok::Semi),
            _ => None,
        };
        if let Some(tok) = tok {
            bump!();
            out.push(Spanned { tok, line: sl, col: sc });
            continue;
        }
        if c == '\'' {
            bump!();
            let mut s = String::new();
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(err(sl, sc, ParseErrorKind::UnterminatedString));
                };
                bump!();
                match d {
                    '\'' => break,
                    '\\' => {
                        let Some(&e) = chars.get(i) else {
                            return Err(err(sl, sc, ParseErrorKind::UnterminatedString));
                        };
                        bump!();
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            'r' => '\r',
                            other => other,
                        });
                    }
                    d => s.push(d),
                }
            }
            out.push(Spanned { tok: Tok::Str(s), line: sl, col: sc });
            continue;
        }
        if c.is_ascii_alphabetic() {
            if (c == 's' || c == 'e')
                && chars.get(i + 1) == Some(&'.')
                && chars.get(i + 2).is_some_and(|d| d.is_ascii_alphanumeric() || *d == '_')
            {
                let kind = if c == 's' { VarKind::S } else { VarKind::E };
                bump!();
                bump!();
                let mut name = String::new();
                while chars.get(i).is_some_and(|d| d.is_ascii_alphanumeric() || *d == '_') {
                    name.push(chars[i]);
                    bump!();
                }
                out.push(Spanned { tok: Tok::Var(Var { kind, name }), line: sl, col: sc });
                continue;
            }
            let mut name = String::new();
            while chars.get(i).is_some_and(|d| is_name_char(*d)) {
                name.push(chars[i]);
                bump!();
            }
            // Trailing primes belong to the name unless they open a string.
            let mut j = i;
            while chars.get(j) == Some(&'\'') {
                j += 1;
            }
            if j > i && !chars.get(j).is_some_and(|d| is_name_char(*d) || *d == '\'') {
                while i < j {
                    name.push('\'');
                    bump!();
                }
            }
            out.push(Spanned { tok: Tok::Name(name), line: sl, col: sc });
            continue;
        }
        return Err(err(sl, sc, ParseErrorKind::UnexpectedChar(c)));
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(t: &Spanned, expected: &'static str) -> ParseError {
        ParseError {
            line: t.line,
            col: t.col,
            kind: ParseErrorKind::UnexpectedToken { expected, found: t.tok.to_string() },
        }
    }

    fn expect(&mut self, tok: Tok, expected: &'static str) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(())
        } else {
            Err(Self::unexpected(&t, expected))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Str(s) => {
                    self.next();
                    terms.extend(s.chars().map(Term::chr));
                }
                Tok::Name(n) => {
                    self.next();
                    if !n.starts_with(|c: char| c.is_ascii_uppercase()) {
                        return Err(ParseError { line: t.line, col: t.col, kind: ParseErrorKind::LowercaseSymbol(n) });
                    }
                    terms.push(Term::Sym(Symbol::Ident(n)));
                }
                Tok::Var(v) => {
                    self.next();
                    terms.push(v.term());
                }
                Tok::LParen => {
                    self.next();
                    let body = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    terms.push(Term::Bracket(body));
                }
                Tok::LAngle => {
                    self.next();
                    let n = self.next();
                    let Tok::Name(name) = n.tok else {
                        return Err(Self::unexpected(&n, "function name"));
                    };
                    let arg = self.expr()?;
                    self.expect(Tok::RAngle, "`>`")?;
                    terms.push(Term::Call(name, arg));
                }
                _ => return Ok(Expr(terms)),
            }
        }
    }
}

/// Parses a single expression (calls and variables allowed), e.g. a goal
/// such as `<main e.xs>`.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    let t = p.next();
    if t.tok != Tok::Eof {
        return Err(Parser::unexpected(&t, "end of expression"));
    }
    Ok(e)
}

/// Parses and validates a program. The entry point is the first function.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut functions: Vec<Function> = Vec::new();
    let mut locations = Vec::new();
    loop {
        let t = p.next();
        let name = match t.tok {
            Tok::Eof => break,
            Tok::Name(n) => n,
            _ => return Err(Parser::unexpected(&t, "function name")),
        };
        if functions.iter().any(|f| f.name == name) {
            return Err(ParseError { line: t.line, col: t.col, kind: ParseErrorKind::DuplicateFunction(name) });
        }
        p.expect(Tok::LBrace, "`{`")?;
        let mut sentences = Vec::new();
        let mut locs = Vec::new();
        while p.peek().tok != Tok::RBrace {
            let start = p.peek().clone();
            let pattern = p.expr()?;
            p.expect(Tok::Eq, "`=`")?;
            let body = p.expr()?;
            p.expect(Tok::Semi, "`;`")?;
            sentences.push(Sentence::new(pattern, body));
            locs.push((start.line, start.col));
        }
        p.next();
        functions.push(Function { name, sentences });
        locations.push(locs);
    }
    let Some(first) = functions.first() else {
        return Err(ParseError { line: 1, col: 1, kind: ParseErrorKind::EmptyProgram });
    };
    let program = Program::from_functions(functions.clone(), &first.name.clone());
    if let Err((fi, si, kind)) = check(&program) {
        let (line, col) = locations[fi][si];
        return Err(ParseError { line, col, kind });
    }
    Ok(program)
}

/// Checks the static rules of a program. Returns the function index,
/// sentence index and error of the first violation.
fn check(p: &Program) -> Result<(), (usize, usize, ParseErrorKind)> {
    let defined: BTreeSet<&str> = p.functions().iter().map(|f| f.name.as_str()).collect();
    for (fi, f) in p.functions().iter().enumerate() {
        for (si, s) in f.sentences.iter().enumerate() {
            check_sentence(s, &defined).map_err(|k| (fi, si, k))?;
        }
    }
    Ok(())
}

pub fn check_pattern(pattern: &Expr) -> Result<(), ParseErrorKind> {
    fn level(e: &Expr, evars: &mut BTreeSet<String>) -> Result<(), ParseErrorKind> {
        let mut open: Option<&str> = None;
        for t in e.terms() {
            match t {
                Term::Call(f, _) => return Err(ParseErrorKind::CallInPattern(f.clone())),
                Term::EVar(n) => {
                    if !evars.insert(n.clone()) {
                        return Err(ParseErrorKind::RepeatedEVar(n.clone()));
                    }
                    if let Some(prev) = open {
                        return Err(ParseErrorKind::OpenVariables(format!("e.{prev}"), format!("e.{n}")));
                    }
                    open = Some(n);
                }
                Term::Bracket(b) => level(b, evars)?,
                _ => {}
            }
        }
        Ok(())
    }
    level(pattern, &mut BTreeSet::new())
}

fn check_sentence(s: &Sentence, defined: &BTreeSet<&str>) -> Result<(), ParseErrorKind> {
    check_pattern(&s.pattern)?;
    let bound: BTreeSet<Var> = s.pattern.vars().into_iter().collect();
    for v in s.body.vars() {
        if !bound.contains(&v) {
            return Err(ParseErrorKind::FreeVariable(v.to_string()));
        }
    }
    let mut called = BTreeSet::new();
    s.body.called_functions(&mut called);
    for c in called {
        if !defined.contains(c.as_str()) {
            return Err(ParseErrorKind::UndefinedFunction(c));
        }
    }
    Ok(())
}

/// Validates a program built in code with the same rules the parser applies.
pub fn validate(p: &Program) -> Result<(), ParseErrorKind> {
    if p.function(p.entry()).is_none() {
        return Err(ParseErrorKind::UndefinedFunction(p.entry().into()));
    }
    check(p).map_err(|(_, _, k)| k)
}

fn escape_char(c: char, out: &mut String) {
    match c {
        '\'' => out.push_str("\\'"),
        '\\' => out.push_str("\\\\"),
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        c => out.push(c),
    }
}

/// Canonical text of an expression.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_expr(e: &Expr, out: &mut String) {
    let terms = e.terms();
    let mut i = 0;
    let mut prev_bracket = false;
    while i < terms.len() {
        let is_bracket = matches!(terms[i], Term::Bracket(_));
        if i > 0 && !(prev_bracket && is_bracket) {
            out.push(' ');
        }
        match &terms[i] {
            Term::Sym(Symbol::Char(_)) => {
                out.push('\'');
                while let Some(Term::Sym(Symbol::Char(c))) = terms.get(i) {
                    escape_char(*c, out);
                    i += 1;
                }
                out.push('\'');
                prev_bracket = false;
                continue;
            }
            Term::Sym(Symbol::Ident(n)) => out.push_str(n),
            Term::SVar(n) => {
                let _ = write!(out, "s.{n}");
            }
            Term::EVar(n) => {
                let _ = write!(out, "e.{n}");
            }
            Term::Bracket(b) => {
                out.push('(');
                write_expr(b, out);
                out.push(')');
            }
            Term::Call(f, arg) => {
                out.push('<');
                out.push_str(f);
                if !arg.is_empty() {
                    out.push(' ');
                    write_expr(arg, out);
                }
                out.push('>');
            }
        }
        prev_bracket = is_bracket;
        i += 1;
    }
}

fn print_sentence(s: &Sentence) -> String {
    let mut out = String::new();
    if !s.pattern.is_empty() {
        write_expr(&s.pattern, &mut out);
        out.push(' ');
    }
    out.push('=');
    if !s.body.is_empty() {
        out.push(' ');
        write_expr(&s.body, &mut out);
    }
    out.push(';');
    out
}

/// Canonical program text. Functions with at most one sentence are written
/// on a single line; the entry function comes first.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    let mut order: Vec<&Function> = p.functions().iter().filter(|f| f.name == p.entry()).collect();
    order.extend(p.functions().iter().filter(|f| f.name != p.entry()));
    for (i, f) in order.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match f.sentences.as_slice() {
            [] => {
                let _ = writeln!(out, "{} {{ }}", f.name);
            }
            [s] => {
                let _ = writeln!(out, "{} {{ {} }}", f.name, print_sentence(s));
            }
            ss => {
                let _ = writeln!(out, "{} {{", f.name);
                for s in ss {
                    let _ = writeln!(out, "  {}", print_sentence(s));
                }
                out.push_str("}\n");
            }
        }
    }
    out
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_program(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EQUAL: &str = "
        main { e.xs = <equal ('ab' e.xs)(e.xs 'ba')>; }
        equal {
          (s.x e.xs)(s.x e.ys) = <equal (e.xs)(e.ys)>;
          ()() = True;
          (e.xs)(e.ys) = False;
        }";

    #[test]
    fn parses_word_equation_program() {
        let p = parse_program(EQUAL).unwrap();
        assert_eq!(p.functions().len(), 2);
        assert_eq!(p.entry(), "main");
        assert_eq!(p.sentences("equal").unwrap().len(), 3);
    }

    #[test]
    fn smallest_program() {
        let p = parse_program("F { = True; }").unwrap();
        let s = &p.sentences("F").unwrap()[0];
        assert!(s.pattern.is_empty());
        assert_eq!(s.body, Expr(alloc::vec![Term::ident("True")]));
        assert_eq!(print_program(&p), "F { = True; }\n");
    }

    #[test]
    fn undefined_function_is_reported() {
        let err = parse_program("F { e.x = <G e.x>; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndefinedFunction("G".into()));
        assert_eq!((err.line, err.col), (1, 5));
    }

    #[test]
    fn static_rules() {
        let kind = |src| parse_program(src).unwrap_err().kind;
        assert_eq!(kind("F { e.x e.x = ; }"), ParseErrorKind::RepeatedEVar("x".into()));
        assert!(matches!(kind("F { e.x 'a' e.y = ; }"), ParseErrorKind::OpenVariables(..)));
        assert_eq!(kind("F { <F> = ; }"), ParseErrorKind::CallInPattern("F".into()));
        assert_eq!(kind("F { s.x = e.y; }"), ParseErrorKind::FreeVariable("e.y".into()));
        assert_eq!(kind("F { = x; }"), ParseErrorKind::LowercaseSymbol("x".into()));
        assert_eq!(kind("F { = ; } F { = ; }"), ParseErrorKind::DuplicateFunction("F".into()));
        assert_eq!(kind(""), ParseErrorKind::EmptyProgram);
        // repeated s-variables and one e-variable per level are fine
        parse_program("F { (e.x) s.a s.a (e.y) e.z = ; }").unwrap();
    }

    #[test]
    fn syntax_error_position() {
        let err = parse_program("F {\n  = True\n}").unwrap_err();
        assert_eq!((err.line, err.col), (3, 1));
        let err = parse_program("F { = 'abc; }").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnterminatedString);
        assert!(parse_program("F { /* open").is_err());
    }

    #[test]
    fn nested_brackets_print_without_spaces() {
        let e = parse_expr("(()()())").unwrap();
        assert_eq!(print_expr(&e), "(()()())");
        let e = parse_expr("'ab' X e.x (s.y) <F 'a'> <G>").unwrap();
        assert_eq!(print_expr(&e), "'ab' X e.x (s.y) <F 'a'> <G>");
    }

    #[test]
    fn primed_names_and_escapes() {
        let p = parse_program("main' { 'a' e.x = <main' e.x>; = '\\''; }").unwrap();
        assert_eq!(p.entry(), "main'");
        let text = print_program(&p);
        assert_eq!(parse_program(&text).unwrap(), p);
        // a name directly followed by a string is not primed
        let e = parse_expr("A'b'").unwrap();
        assert_eq!(e, Expr(alloc::vec![Term::ident("A"), Term::chr('b')]));
    }

    #[test]
    fn roundtrip_equal() {
        let p = parse_program(EQUAL).unwrap();
        assert_eq!(parse_program(&print_program(&p)).unwrap(), p);
    }

    #[test]
    fn empty_definitions_roundtrip() {
        let p = parse_program("main' { }\n").unwrap();
        assert!(p.sentences("main'").unwrap().is_empty());
        assert_eq!(print_program(&p), "main' { }\n");
    }
}
