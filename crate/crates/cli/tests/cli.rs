use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fibwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibwb")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = fibwb(&all);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1, "{}", text);
    (code(&o), serde_json::from_str(text.trim()).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn absorption_examples() {
    let o = fibwb(&["fib-entail", "--a", "and", "--b", "or", "and(p, or(p,q))", "p"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("saturation"));
    assert!(stdout(&o).contains("{p, and(p, or(p, q)), or(p, q)}"));
    let o = fibwb(&["fib-entail", "--a", "and", "--b", "or", "or(p, and(p,q))", "p"]);
    assert_eq!(code(&o), 1);
    let o = fibwb(&["fib-entail", "--a", "and", "--b", "or", "p", "and(p, or(p, q))"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn collapse_reports() {
    let o = fibwb(&["collapse", "--a", "nimp", "--b", "top"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "collapses: TopLike; merged logic is full classical");
    let o = fibwb(&["collapse", "--a", "and", "--b", "or"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("does not collapse"));
    assert_eq!(code(&fibwb(&["collapse", "--a", "eq", "--b", "bot"])), 0);
    assert_eq!(code(&fibwb(&["collapse", "--a", "or,xor", "--b", "top"])), 0);
    // The first side is already complete.
    assert_eq!(code(&fibwb(&["collapse", "--a", "neg,and", "--b", "top"])), 2);
}

#[test]
fn json_and_text_agree() {
    let queries: [&[&str]; 6] = [
        &["fib-entail", "--a", "and", "--b", "or", "and(p, or(p,q))", "p"],
        &["fib-entail", "--a", "and", "--b", "or", "or(p, and(p,q))", "p"],
        &["entail", "--matrix", "imp", "p, imp(p, q)", "q"],
        &["complete", "nimp", "top"],
        &["collapse", "--a", "and", "--b", "neg"],
        &["classify", "and"],
    ];
    for q in queries {
        let text = code(&fibwb(q));
        let (c, record) = json(q);
        assert_eq!(c, text, "{:?}", q);
        assert_eq!(record["verdict"].as_bool().unwrap(), c == 0, "{:?}", q);
        assert!(record["elapsed_ms"].as_f64().is_some());
        assert!(record["query"].is_object());
    }
    let (_, record) = json(&["fib-entail", "--a", "and", "--b", "or", "and(p, or(p,q))", "p"]);
    assert_eq!(record["query"]["goal"], "p");
    assert_eq!(record["detail"]["iterations"], 1);
}

#[test]
fn entailment_and_completeness() {
    assert_eq!(code(&fibwb(&["entail", "--matrix", "neg,and", "", "neg(and(p, neg(p)))"])), 0);
    assert_eq!(code(&fibwb(&["entail", "--matrix", "or", "or(p, q)", "p"])), 1);
    let o = fibwb(&["complete", "and", "or", "top", "bot"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("monotone"));
    assert_eq!(code(&fibwb(&["complete", "T3_2,neg", "top"])), 0);
}

#[test]
fn discrepancy_search() {
    let o = fibwb(&["discrepancy", "--a", "neg", "--b", "bot", "--depth", "2", "--premises", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "witness: {} |- neg(bot()) (classical: true, fibred: false)");
    let o = fibwb(&["discrepancy", "--a", "nimp", "--b", "top", "--depth", "2", "--premises", "1", "--vars", "2"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "none within bounds");
}

#[test]
fn connective_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "conns.txt", "# majority-or\nmaj 3 00010111\nnor 2 1000\n");
    let o = fibwb(&["--conn-file", &good, "classify", "maj"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("self-dual: yes"));
    assert_eq!(code(&fibwb(&["--conn-file", &good, "complete", "nor"])), 0);
    assert_eq!(
        code(&fibwb(&["--conn-file", &good, "fib-entail", "--a", "maj", "--b", "bot", "maj(p, p, bot())", "p"])),
        0
    );

    let builtin = write(dir.path(), "bad.txt", "and 2 0110\n");
    let o = fibwb(&["--conn-file", &builtin, "classify", "and"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("redefines a builtin"));

    let malformed = write(dir.path(), "malformed.txt", "ok 1 01\nbroken 2 011\n");
    let o = fibwb(&["--conn-file", &malformed, "classify", "ok"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn proofs_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let d2 = write(
        dir.path(),
        "d2.proof",
        "(step and(p, or(p, q)) (rule c3 p=p q=or(p, q))\n  (step p (hyp))\n  (step or(p, q) (rule d1 p=p q=q)\n    (step p (hyp))))\n",
    );
    let o = fibwb(&["check-proof", "builtin:and,or", &d2]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("valid derivation"));
    assert_eq!(code(&fibwb(&["check-proof", "builtin:and,or", &d2, "--hyps", "", "--goal", "and(p, or(p, q))"])), 1);

    let corrupt = write(
        dir.path(),
        "bad.proof",
        "(step and(p, or(p, q)) (rule c3 p=p q=or(q, p))\n  (step p (hyp))\n  (step or(p, q) (rule d1 p=p q=q)\n    (step p (hyp))))\n",
    );
    assert_eq!(code(&fibwb(&["check-proof", "builtin:and,or", &corrupt])), 1);

    let rules = write(
        dir.path(),
        "conj.rules",
        "# conjunction\nc1 : and(p, q) / p\nc2 : and(p, q) / q\nc3 : p ; q / and(p, q)\n",
    );
    let swap = write(
        dir.path(),
        "swap.proof",
        "(step and(q, p) (rule c3 p=q q=p) (step q (rule c2 p=p q=q) (step and(p, q) (hyp))) (step p (rule c1 p=p q=q) (step and(p, q) (hyp))))",
    );
    assert_eq!(code(&fibwb(&["check-proof", &rules, &swap, "--sig", "and"])), 0);

    let broken = write(dir.path(), "broken.rules", "c1 : and(p, q) / p\nc2 and(p, q) / q\n");
    let o = fibwb(&["check-proof", &broken, &swap, "--sig", "and"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = fibwb(&["derive", "builtin:and,or", "p", "and(p, or(p, q))", "--bound", "10"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(rule c3 p=p q=or(p, q))"));
    assert_eq!(code(&fibwb(&["derive", "builtin:and", "", "p", "--bound", "6"])), 1);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&fibwb(&["fib-entail", "--a", "and", "--b", "and", "p", "p"])), 2);
    assert_eq!(code(&fibwb(&["fib-entail", "--a", "nope", "--b", "or", "p", "p"])), 2);
    assert_eq!(code(&fibwb(&["entail", "--matrix", "and", "and(p)", "p"])), 2);
    assert_eq!(code(&fibwb(&["classify"])), 2);
    assert_eq!(code(&fibwb(&["check-proof", "builtin:and", "/nonexistent/file"])), 2);
    let (c, record) = json(&["collapse", "--a", "and", "--b", "and"]);
    assert_eq!(c, 2);
    assert!(record["error"].is_string());
}
