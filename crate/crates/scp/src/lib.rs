//! Command-line front end: evaluation, specialization, residual analyses
//! and the word-equation and river-crossing experiments.
//!
//! Every subcommand writes a plain-text report whose bytes depend only on
//! the arguments and input files; timings appear only with `--timing`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use scp_core::analyses::{self, AnalysisError, SearchLimits};
use scp_core::corpus::{self, Boat, Parametric, PuzzleSpec, WordEquation, WordEquationError};
use scp_core::eval::{eval, EvalError, DEFAULT_STEP_BUDGET};
use scp_core::scp::{supercompile, Residual, ScpError, ScpOptions, DEFAULT_NODE_BUDGET};
use scp_core::syntax::ParseError;
use scp_core::{parse_expr, parse_program, print_program, Expr, Program, Symbol, Term};

/// Overrides the supercompilation node budget.
pub const NODE_BUDGET_VAR: &str = "SCP_NODE_BUDGET";

pub mod exit {
    pub const OK: i32 = 0;
    /// A flagged analysis came out negative.
    pub const NEGATIVE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const BUDGET: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{source}", .path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{what}: {source}")]
    Expr { what: &'static str, source: ParseError },
    #[error(transparent)]
    WordEquation(#[from] WordEquationError),
    #[error(transparent)]
    Scp(#[from] ScpError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("writing output: {0}")]
    Output(#[source] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scp(ScpError::BudgetExceeded { .. })
            | CliError::Analysis(AnalysisError::FrontierExceeded { .. }) => exit::BUDGET,
            _ => exit::USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "scp", version, about = "Supercompile programs and analyse the residuals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Append wall-clock timings (makes the output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    /// Exit with status 1 when the reported answer is negative.
    #[arg(long, global = true)]
    fail_if_false: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a ground call.
    Run {
        file: PathBuf,
        #[arg(long)]
        call: String,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        steps: u64,
    },
    /// Supercompile a program with respect to a goal.
    Specialize {
        file: PathBuf,
        /// Goal expression; its free variables are the parameters.
        #[arg(long)]
        goal: String,
    },
    /// Analyse a (residual) program.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        returns_true: bool,
        #[arg(long)]
        empty: bool,
        /// List accepted sequences; needs --alphabet and --max-len.
        #[arg(long)]
        paths: bool,
        /// Comma-separated symbols, e.g. `MM,CC,MC,M,C` or `a,b`.
        #[arg(long, value_delimiter = ',')]
        alphabet: Vec<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long)]
        dot: bool,
    },
    /// Solve a word equation such as `abX=Xba` by specialization.
    Wordeq {
        equation: String,
        #[arg(long)]
        emit_dot: bool,
        /// Length bound for listing solutions read off the residual.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Specialize the river-crossing interpreter for one crowd.
    Puzzle {
        #[arg(short = 'm', long, default_value_t = 3)]
        missionaries: u32,
        #[arg(short = 'c', long, default_value_t = 3)]
        cannibals: u32,
        #[arg(long)]
        cut_false: bool,
        #[arg(long)]
        block_repetition: bool,
        #[arg(long)]
        restrict_move: bool,
        /// Read the pair count as a lower bound.
        #[arg(long)]
        parametric_pairs: bool,
        /// Report the shortest accepted paths.
        #[arg(long)]
        paths: bool,
        #[arg(long, default_value_t = 30)]
        cap: usize,
        /// Print the interpreter source as well.
        #[arg(long)]
        emit_source: bool,
    },
    /// Print the solvability table of the river-crossing puzzle.
    Matrix {
        #[arg(long, default_value_t = 7)]
        max: u32,
    },
}

/// A report being assembled, plus whether its answer was negative.
struct Report {
    text: String,
    negative: bool,
    started: Instant,
}

impl Report {
    fn new(argv: &[String]) -> Self {
        let mut text = String::new();
        let _ = writeln!(text, "# {}", argv.join(" "));
        Report { text, negative: false, started: Instant::now() }
    }

    fn line(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.text, "{key}: {value}");
    }

    fn block(&mut self, title: &str, body: &str) {
        let _ = writeln!(self.text, "--- {title}");
        self.text.push_str(body);
        if !body.ends_with('\n') {
            self.text.push('\n');
        }
    }

    fn answer(&mut self, key: &str, value: bool, positive_when: bool) {
        self.line(key, value);
        if value != positive_when {
            self.negative = true;
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn load(path: &Path, report: &mut Report) -> Result<Program, CliError> {
    let text = read(path)?;
    report.line("input", format_args!("{} sha256:{}", path.display(), hex::encode(Sha256::digest(text.as_bytes()))));
    parse_program(&text).map_err(|source| CliError::Parse { path: path.into(), source })
}

fn node_budget() -> Result<usize, CliError> {
    match std::env::var(NODE_BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{NODE_BUDGET_VAR} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_NODE_BUDGET),
    }
}

fn specialize(program: &Program, goal: &Expr, report: &mut Report) -> Result<Residual, CliError> {
    report.line("goal", goal);
    let opts = ScpOptions { node_budget: node_budget()?, ..ScpOptions::default() };
    let residual = supercompile(program, goal, &opts)?;
    let s = &residual.tree.stats;
    report.line(
        "tree",
        format_args!(
            "{} nodes, {} folds, {} generalizations, {} splits",
            s.nodes, s.folds, s.generalizations, s.splits
        ),
    );
    Ok(residual)
}

fn parse_symbol(item: &str) -> Result<Symbol, CliError> {
    let item = item.trim();
    let mut chars = item.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if !c.is_uppercase() {
            return Ok(Symbol::Char(c));
        }
    }
    match parse_expr(item).map(|e| e.terms().to_vec()).as_deref() {
        Ok([Term::Sym(s)]) => Ok(s.clone()),
        _ => Err(CliError::Usage(format!("alphabet item {item:?} is not a single symbol"))),
    }
}

fn word(w: &[Symbol]) -> String {
    let e: Expr = w.iter().cloned().map(Term::Sym).collect();
    if w.is_empty() {
        "(empty)".into()
    } else {
        e.to_string()
    }
}

fn run(cli: Cli, argv: &[String]) -> Result<Report, CliError> {
    let mut report = Report::new(argv);
    match cli.command {
        Command::Run { file, call, steps } => {
            let program = load(&file, &mut report)?;
            let call = parse_expr(&call).map_err(|source| CliError::Expr { what: "--call", source })?;
            let out = eval(&program, &call, steps)?;
            report.line("call", &call);
            report.answer("abnormal", out.is_abnormal(), false);
            report.line("result", &out);
        }
        Command::Specialize { file, goal } => {
            let program = load(&file, &mut report)?;
            let goal = parse_expr(&goal).map_err(|source| CliError::Expr { what: "--goal", source })?;
            let residual = specialize(&program, &goal, &mut report)?;
            report.answer("empty", analyses::is_empty(&residual.program), false);
            report.block("residual", &print_program(&residual.program));
        }
        Command::Analyze { file, returns_true, empty, paths, alphabet, max_len, dot } => {
            let program = load(&file, &mut report)?;
            if !(returns_true || empty || paths || dot) {
                return Err(CliError::Usage("analyze needs --returns-true, --empty, --paths or --dot".into()));
            }
            if returns_true {
                report.answer("returns_true", analyses::returns_true(&program), true);
            }
            if empty {
                report.answer("empty", analyses::is_empty(&program), true);
            }
            if paths {
                if alphabet.is_empty() {
                    return Err(CliError::Usage("--paths needs --alphabet".into()));
                }
                let alphabet = alphabet.iter().map(|a| parse_symbol(a)).collect::<Result<Vec<_>, _>>()?;
                let found = analyses::enumerate_accepted(&program, &alphabet, max_len, &SearchLimits::default())?;
                report.line("accepted", found.len());
                report.negative |= found.is_empty();
                let body: String = found.iter().map(|w| word(w) + "\n").collect();
                report.block("accepted sequences", &body);
            }
            if dot {
                report.block("dot", &analyses::to_graph(&program).to_dot());
            }
        }
        Command::Wordeq { equation, emit_dot, max_len } => {
            let eq = WordEquation::parse(&equation)?;
            let (program, goal) = corpus::encode_word_equation(&eq);
            report.block("source", &print_program(&program));
            let residual = specialize(&program, &goal, &mut report)?;
            report.answer("returns_true", analyses::returns_true(&residual.program), true);
            report.block("residual", &print_program(&residual.program));
            if eq.variables.len() == 1 {
                let alphabet: Vec<Symbol> = eq.alphabet.iter().map(|&c| Symbol::Char(c)).collect();
                let found =
                    analyses::enumerate_accepted(&residual.program, &alphabet, max_len, &SearchLimits::default())?;
                let body: String = found
                    .iter()
                    .map(|w| {
                        w.iter()
                            .filter_map(|s| match s {
                                Symbol::Char(c) => Some(*c),
                                Symbol::Ident(_) => None,
                            })
                            .collect::<String>()
                    })
                    .map(|w| if w.is_empty() { "(empty)\n".to_string() } else { w + "\n" })
                    .collect();
                report.block(&format!("solutions up to length {max_len}"), &body);
            }
            if emit_dot {
                report.block("dot", &analyses::to_graph(&residual.program).to_dot());
            }
        }
        Command::Puzzle {
            missionaries,
            cannibals,
            cut_false,
            block_repetition,
            restrict_move,
            parametric_pairs,
            paths,
            cap,
            emit_source,
        } => {
            let spec = PuzzleSpec::new(missionaries, cannibals)
                .cut_false(cut_false)
                .block_repetition(block_repetition)
                .restricted_move(restrict_move)
                .parametric(Parametric { pairs: parametric_pairs, ..Parametric::default() });
            let (program, goal) = corpus::build_puzzle_program(&spec);
            if emit_source {
                report.block("source", &print_program(&program));
            }
            let residual = specialize(&program, &goal, &mut report)?;
            report.line("empty", analyses::is_empty(&residual.program));
            report.answer("returns_true", analyses::returns_true(&residual.program), true);
            report.block("residual", &print_program(&residual.program));
            if paths {
                if residual.params.len() != 1 {
                    return Err(CliError::Usage("--paths needs a goal whose only parameter is the path".into()));
                }
                match analyses::shortest_accepted(&residual.program, &Boat::alphabet(), cap, &SearchLimits::default())?
                {
                    Some((len, found)) => {
                        report.line("shortest", len);
                        let body: String = found.iter().map(|w| word(w) + "\n").collect();
                        report.block("shortest paths", &body);
                    }
                    None => {
                        report.line("shortest", format_args!("none up to {cap}"));
                        report.negative = true;
                    }
                }
            }
        }
        Command::Matrix { max } => {
            let m = corpus::answer_matrix(max, max);
            let mut body = String::from("c\\m");
            for j in 0..=max {
                let _ = write!(body, " {j}");
            }
            body.push('\n');
            for (c, row) in m.iter().enumerate() {
                let _ = write!(body, "{c:>3}");
                for (j, &ok) in row.iter().enumerate() {
                    let width = j.to_string().len();
                    let _ = write!(body, " {:>width$}", if ok { "T" } else { "." });
                }
                body.push('\n');
            }
            report.block("solvable (T) by cannibals (rows) and missionaries (columns)", &body);
        }
    }
    if cli.common.timing {
        report.line("elapsed_ms", report.started.elapsed().as_millis());
    }
    Ok(report)
}

/// Runs the command line `argv` (program name first), writing the report
/// to `out` (or `--out`) and diagnostics to `err`. Returns the exit status.
pub fn dispatch(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let target = cli.common.out.clone();
    let fail_if_false = cli.common.fail_if_false;
    let shown: Vec<String> = argv.iter().skip(1).cloned().collect();
    let result = run(cli, &[vec!["scp".to_string()], shown].concat()).and_then(|report| {
        match &target {
            Some(path) => {
                std::fs::write(path, &report.text).map_err(|source| CliError::Io { path: path.clone(), source })
            }
            None => out.write_all(report.text.as_bytes()).map_err(CliError::Output),
        }?;
        Ok(report.negative)
    });
    match result {
        Ok(true) if fail_if_false => exit::NEGATIVE,
        Ok(_) => exit::OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
