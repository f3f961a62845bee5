use std::collections::BTreeSet;

use proptest::prelude::*;

use scp_core::analyses::{enumerate_accepted, SearchLimits};
use scp_core::corpus::{encode_word_equation, word_oracle, WordEquation};
use scp_core::eval::DEFAULT_STEP_BUDGET;
use scp_core::scp::instance::instance_of;
use scp_core::scp::{drive_step, embeds, msg, supercompile, Contraction, NameGen, ScpOptions, Step};
use scp_core::{eval, parse_expr, parse_program, Expr, Program, Substitution, Symbol, Term, Var, VarKind};

const STEPS: u64 = 100_000;

fn ground_expr(depth: u32) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        prop::sample::select(vec!['a', 'b', 'x']).prop_map(Term::chr),
        prop::sample::select(vec!["T", "F"]).prop_map(Term::ident),
    ];
    let term = leaf.prop_recursive(depth, 12, 3, |inner| {
        prop::collection::vec(inner, 0..3).prop_map(|ts| Term::Bracket(Expr(ts)))
    });
    prop::collection::vec(term, 0..5).prop_map(Expr)
}

fn symbol_expr() -> impl Strategy<Value = Expr> {
    prop::sample::select(vec!['a', 'b', 'x']).prop_map(|c| Expr(vec![Term::chr(c)]))
}

/// A ground instance of every variable of `c`.
fn instance_for(c: &Expr) -> impl Strategy<Value = Substitution> {
    let vars = c.vars();
    let values: Vec<BoxedStrategy<Expr>> = vars
        .iter()
        .map(|v| match v.kind {
            VarKind::S => symbol_expr().boxed(),
            VarKind::E => ground_expr(2).boxed(),
        })
        .collect();
    values.prop_map(move |es| vars.iter().cloned().zip(es).collect())
}

const DRIVEN: &str = "
Eq { s.x s.x e.r = T e.r; s.x s.y e.r = F e.r; }
Last { e.a 'x' = A e.a; (e.b) e.c = B <Last e.c>; = C; }
equal {
  (s.x e.xs)(s.x e.ys) = <equal (e.xs)(e.ys)>;
  ()() = True;
  (e.xs)(e.ys) = False;
}
Rev { s.x e.r = <Rev e.r> s.x; (e.i) e.r = <Rev e.r> (<Rev e.i>); = ; }
Pal { e.x = <equal (e.x)(<Rev e.x>)>; }
Dup { s.x e.r = s.x s.x <Dup e.r>; (e.i) e.r = (<Dup e.i>) <Dup e.r>; = ; }
";

fn driven() -> Program {
    parse_program(DRIVEN).unwrap()
}

const CONFIGS: [&str; 6] = [
    "<Eq s.1 s.2 e.3>",
    "<Last e.1>",
    "<equal ('ab' e.1)(e.1 'ba')>",
    "<equal (e.1)(s.2 e.3)>",
    "A <Rev e.1> (<Last s.2 e.3>)",
    "<Eq s.1 'a' e.2>",
];

/// Value of `v` under the branch substitution followed by `sigma`.
fn value(v: &Var, subst: &Substitution, sigma: &Substitution) -> Expr {
    sigma.apply(&subst.apply(&Expr(vec![v.term()])))
}

fn satisfies(b: &scp_core::scp::Branch, sigma: &Substitution) -> bool {
    b.contractions.iter().all(|k| match k {
        Contraction::NotSymbol(v, x) => value(v, &b.subst, sigma) != Expr(vec![Term::Sym(x.clone())]),
        Contraction::NotEqual(v, w) => value(v, &b.subst, sigma) != value(w, &b.subst, sigma),
        _ => true,
    })
}

fn check_drive(c: &Expr, theta: &Substitution) -> Result<(), TestCaseError> {
    let p = driven();
    let Step::Branches(branches) = drive_step(c, &p, &mut NameGen::avoiding(c.vars())).unwrap() else {
        return Err(TestCaseError::fail("configuration with a call drove to a value"));
    };
    let ground = theta.apply(c);
    let expected = eval(&p, &ground, STEPS).unwrap();
    let hit = branches.iter().find_map(|b| {
        let sigma = instance_of(&b.subst.apply(c), &ground)?;
        satisfies(b, &sigma).then_some((b, sigma))
    });
    let Some((b, sigma)) = hit else {
        return Err(TestCaseError::fail(format!("no branch covers {ground}")));
    };
    match &b.child {
        Some(child) => {
            let got = eval(&p, &sigma.apply(child), STEPS).unwrap();
            prop_assert!(got.agrees_with(&expected), "{ground}: child gives {got}, source {expected}");
        }
        None => prop_assert!(expected.is_abnormal(), "{ground}: abnormal branch but source gives {expected}"),
    }
    Ok(())
}

fn config_and_instance() -> impl Strategy<Value = (Expr, Substitution)> {
    prop::sample::select(CONFIGS.to_vec()).prop_flat_map(|s| {
        let c = parse_expr(s).unwrap();
        (Just(c.clone()), instance_for(&c))
    })
}

const GOALS: [&str; 6] =
    ["<Rev e.1>", "<Pal e.1>", "<equal (e.1)(e.1)>", "<Dup <Rev e.1>>", "<Last <Dup e.1>>", "<Eq s.1 s.1 e.2>"];

fn goal_and_instance() -> impl Strategy<Value = (Expr, Substitution)> {
    prop::sample::select(GOALS.to_vec()).prop_flat_map(|s| {
        let c = parse_expr(s).unwrap();
        (Just(c.clone()), instance_for(&c))
    })
}

fn side() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['a', 'b', 'X']), 0..4).prop_map(|v| v.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn msg_generalizes_both(a in ground_expr(2), b in ground_expr(2)) {
        let g = msg(&a, &b, &mut NameGen::default());
        prop_assert_eq!(g.left.apply(&g.general), a.clone());
        prop_assert_eq!(g.right.apply(&g.general), b.clone());
        prop_assert!(instance_of(&g.general, &a).is_some());
        prop_assert!(instance_of(&g.general, &b).is_some());
    }

    #[test]
    fn embedding_is_reflexive_and_survives_extension(a in ground_expr(2), b in ground_expr(2)) {
        prop_assert!(embeds(&a, &a));
        prop_assert!(embeds(&a, &a.clone().concat(b.clone())));
        prop_assert!(embeds(&a, &b.clone().concat(a.clone())));
    }

    #[test]
    fn driving_covers_and_preserves_meaning((c, theta) in config_and_instance()) {
        check_drive(&c, &theta)?;
    }

    #[test]
    fn residuals_agree_with_sources((goal, theta) in goal_and_instance()) {
        let p = driven();
        let r = supercompile(&p, &goal, &ScpOptions::default()).unwrap();
        let src = eval(&p, &theta.apply(&goal), STEPS).unwrap();
        let res = eval(&r.program, &r.call(&theta), STEPS).unwrap();
        prop_assert!(src.agrees_with(&res), "{}: source {src}, residual {res}", theta.apply(&goal));
    }

    #[test]
    fn word_equation_residuals_accept_the_solutions(lhs in side(), rhs in side()) {
        let text = format!("{lhs}=X{rhs}");
        let eq = match WordEquation::parse(&text) {
            Ok(eq) if eq.variables.len() == 1 => eq,
            _ => return Ok(()),
        };
        let (p, goal) = encode_word_equation(&eq);
        let opts = ScpOptions { node_budget: 2_000, ..ScpOptions::default() };
        let r = supercompile(&p, &goal, &opts).unwrap();
        let alphabet: Vec<Symbol> = eq.alphabet.iter().map(|&c| Symbol::Char(c)).collect();
        let accepted = enumerate_accepted(&r.program, &alphabet, 5, &SearchLimits::default()).unwrap();
        let oracle: BTreeSet<Vec<Symbol>> =
            word_oracle(&eq, 5).into_iter().map(|w| w[0].chars().map(Symbol::Char).collect()).collect();
        prop_assert_eq!(accepted, oracle, "{}", text);
    }
}

#[test]
fn residual_call_uses_goal_parameters() {
    let p = driven();
    let goal = parse_expr("<Eq s.1 s.1 e.2>").unwrap();
    let r = supercompile(&p, &goal, &ScpOptions::default()).unwrap();
    let theta: Substitution = [(Var::s("1"), Expr::chars("a")), (Var::e("2"), Expr::chars("bc"))].into_iter().collect();
    let out = eval(&r.program, &r.call(&theta), DEFAULT_STEP_BUDGET).unwrap();
    assert_eq!(out.value(), Some(&parse_expr("T 'bc'").unwrap()));
}
