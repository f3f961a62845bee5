//! The reference programs under `fixtures/` parse, round-trip and have the
//! properties the residuals are checked against.

use std::collections::BTreeSet;

use scp_core::analyses::{is_empty, returns_true, shortest_accepted, SearchLimits};
use scp_core::corpus::{words_up_to, Boat};
use scp_core::eval::DEFAULT_STEP_BUDGET;
use scp_core::{eval, parse_expr, parse_program, print_program, Expr, Program, Symbol, Term};

fn load(name: &str) -> Program {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_program(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn paths(list: &[&str]) -> BTreeSet<Vec<Symbol>> {
    list.iter().map(|p| p.split(' ').map(|b| Boat::from_name(b).unwrap().symbol()).collect()).collect()
}

fn shortest(p: &Program) -> (usize, BTreeSet<Vec<Symbol>>) {
    shortest_accepted(p, &Boat::alphabet(), 20, &SearchLimits::default()).unwrap().unwrap()
}

#[test]
fn every_fixture_round_trips() {
    let dir = format!("{}/../../fixtures", env!("CARGO_MANIFEST_DIR"));
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        let p = load(&name);
        assert_eq!(parse_program(&print_program(&p)).unwrap(), p, "{name}");
        seen += 1;
    }
    assert_eq!(seen, 10);
}

#[test]
fn word_equation_residuals_match_their_sources() {
    let alphabet = ['a', 'b'].into_iter().collect();
    for (src, res) in [("wordeq1.scpl", "wordeq1_residual.scpl"), ("wordeq2.scpl", "wordeq2_residual.scpl")] {
        let (src, res) = (load(src), load(res));
        for w in words_up_to(&alphabet, 8) {
            let call = |p: &Program| {
                let arg = Expr::chars(&w);
                eval(p, &Expr(vec![Term::call(p.entry(), arg)]), DEFAULT_STEP_BUDGET).unwrap()
            };
            assert_eq!(call(&src), call(&res), "{w}");
        }
    }
    assert!(returns_true(&load("wordeq1_residual.scpl")));
    assert!(!returns_true(&load("wordeq2_residual.scpl")));
}

#[test]
fn crossing_residuals_accept_the_listed_paths() {
    assert_eq!(shortest(&load("crossing_1_1.scpl")), (1, paths(&["MC"])));
    let two = paths(&["CC C MM C CC", "CC C MM M MC", "MC M MM C CC", "MC M MM M MC"]);
    assert_eq!(shortest(&load("crossing_2_2.scpl")), (5, two));
    let three = paths(&[
        "CC C CC C MM MC MM C CC M MC",
        "CC C CC C MM MC MM C CC C CC",
        "MC M CC C MM MC MM C CC M MC",
        "MC M CC C MM MC MM C CC C CC",
    ]);
    assert_eq!(shortest(&load("crossing_3_3.scpl")), (11, three));
    let (len, found) = shortest(&load("restricted_3_2.scpl"));
    assert_eq!((len, found.len()), (7, 9));
}

#[test]
fn diagonal_residuals_never_return_true() {
    let cut = load("diagonal_cut.scpl");
    assert!(is_empty(&cut));
    let f = load("diagonal_false.scpl");
    assert!(!is_empty(&f));
    assert!(!returns_true(&f));
    let out = eval(&f, &parse_expr("<mainInt' ('pp') CC C CC C MM MC>").unwrap(), DEFAULT_STEP_BUDGET).unwrap();
    let value = out.value().expect("a value");
    assert!(!value.contains_symbol(&Symbol::ident("True")), "{value}");
}
