use std::path::PathBuf;
use std::process::Command;

use scp::{dispatch, exit};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("scp").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = dispatch(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn run_evaluates_a_call() {
    let (code, out, _) = run(&["run", &fixture("wordeq1.scpl"), "--call", "<main 'b'>"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("result: False\n"), "{out}");
    assert!(out.contains("sha256:"), "{out}");
}

#[test]
fn wordeq_emits_residual_and_dot() {
    let (code, out, _) = run(&["wordeq", "abX=Xba", "--emit-dot"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("'ab' e.1 = <main' e.1>;"), "{out}");
    assert!(out.contains("digraph residual {"), "{out}");
    assert!(out.contains("--- solutions up to length 8\na\naba\nababa\nabababa\n"), "{out}");
}

#[test]
fn puzzle_reports_the_four_paths() {
    let (code, out, _) = run(&["puzzle", "-m", "2", "-c", "2", "--cut-false", "--block-repetition", "--paths"]);
    assert_eq!(code, exit::OK);
    assert!(out.contains("shortest: 5\n"), "{out}");
    for p in ["CC C MM C CC", "CC C MM M MC", "MC M MM C CC", "MC M MM M MC"] {
        assert!(out.contains(&format!("{p}\n")), "{p} missing from {out}");
    }
}

#[test]
fn fail_if_false_flags_negative_answers() {
    let args = ["wordeq", "abXa=Xba", "--fail-if-false"];
    assert_eq!(run(&args).0, exit::NEGATIVE);
    assert_eq!(run(&args[..2]).0, exit::OK);
    let (code, out, _) = run(&["analyze", &fixture("diagonal_cut.scpl"), "--empty", "--fail-if-false"]);
    assert_eq!(code, exit::OK, "{out}");
    assert!(out.contains("empty: true"));
}

#[test]
fn analyze_needs_a_question() {
    let (code, _, err) = run(&["analyze", &fixture("crossing_2_2.scpl")]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("--returns-true"), "{err}");
}

#[test]
fn usage_and_file_errors() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("Usage"), "{err}");
    let (code, _, err) = run(&["run", "/nonexistent/x.scpl", "--call", "<f>"]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("/nonexistent/x.scpl"), "{err}");
    let (code, _, err) = run(&["specialize", &fixture("wordeq1.scpl"), "--goal", "<main e.X"]);
    assert_eq!(code, exit::USAGE);
    assert!(err.contains("--goal"), "{err}");
    assert_eq!(run(&["wordeq", "ab"]).0, exit::USAGE);
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir().join(format!("scp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path: PathBuf = dir.join("matrix.txt");
    let (code, out, _) = run(&["matrix", "--max", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, exit::OK);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("  2 T . T T\n"), "{text}");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn node_budget_exhaustion_exits_3() {
    let out = Command::new(env!("CARGO_BIN_EXE_scp"))
        .args(["puzzle", "-m", "3", "-c", "3", "--cut-false", "--block-repetition"])
        .env(scp::NODE_BUDGET_VAR, "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(exit::BUDGET));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node budget"));
}

#[test]
fn timing_is_opt_in() {
    assert!(!run(&["matrix", "--max", "2"]).1.contains("elapsed_ms"));
    assert!(run(&["matrix", "--max", "2", "--timing"]).1.contains("elapsed_ms"));
}
