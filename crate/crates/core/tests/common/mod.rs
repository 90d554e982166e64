//! Oracles shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::BTreeSet;

use fibring_core::enumerate::{formulas_up_to_depth, random_formula, variable_pool};
use fibring_core::semantics::{builtin_matrix, entails, truth_table_of_term, BooleanMatrix, TruthTable};
use fibring_core::syntax::{parse_formula, Connective, Formula, Signature, Substitution};
use rand::Rng;

pub fn f(sig: &Signature, s: &str) -> Formula {
    parse_formula(s, sig).unwrap_or_else(|e| panic!("{}: {}", s, e))
}

pub fn matrix(names: &[&str]) -> BooleanMatrix {
    builtin_matrix(names.iter().copied()).unwrap()
}

pub fn table(bits: &str) -> TruthTable {
    bits.parse().unwrap()
}

/// A consequence relation under test.
pub trait Relation {
    fn holds(&self, gamma: &[Formula], goal: &Formula) -> bool;
}

impl Relation for BooleanMatrix {
    fn holds(&self, gamma: &[Formula], goal: &Formula) -> bool {
        entails(self, gamma, goal).unwrap()
    }
}

#[derive(Debug, Default)]
pub struct PostulateReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

fn random_set<R: Rng>(rng: &mut R, sig: &Signature, vars: &[Formula], max: usize, depth: usize) -> Vec<Formula> {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| random_formula(rng, sig, vars, depth)).collect()
}

fn show(gamma: &[Formula], goal: &Formula) -> String {
    let ps: Vec<String> = gamma.iter().map(|f| f.to_string()).collect();
    format!("{{{}}} |- {}", ps.join(", "), goal)
}

/// Samples `samples` instances of each of reflexivity, monotonicity, cut and
/// substitution invariance and records every failure.
pub fn check_postulates<R: Rng, L: Relation>(
    rel: &L,
    sig: &Signature,
    rng: &mut R,
    samples: usize,
) -> PostulateReport {
    let vars = variable_pool(3);
    let mut report = PostulateReport::default();
    for _ in 0..samples {
        let gamma = random_set(rng, sig, &vars, 3, 3);
        let goal = random_formula(rng, sig, &vars, 3);

        // R
        let mut with_goal = gamma.clone();
        with_goal.push(goal.clone());
        if !rel.holds(&with_goal, &goal) {
            report.violations.push(format!("R: {}", show(&with_goal, &goal)));
        }

        let base = rel.holds(&gamma, &goal);

        // M
        let delta = random_set(rng, sig, &vars, 2, 3);
        if base {
            let mut wider = gamma.clone();
            wider.extend(delta.iter().cloned());
            if !rel.holds(&wider, &goal) {
                report.violations.push(format!("M: {} then {}", show(&gamma, &goal), show(&wider, &goal)));
            }
        }

        // T: use lemmas that follow from gamma, so the premise of cut is often met.
        let lemmas: Vec<Formula> = delta.iter().filter(|d| rel.holds(&gamma, d)).cloned().collect();
        let mut extended = gamma.clone();
        extended.extend(lemmas.iter().cloned());
        if rel.holds(&extended, &goal) && !base {
            report.violations.push(format!("T: {} with lemmas {:?}", show(&extended, &goal), lemmas.len()));
        }

        // SI
        if base {
            let sigma: Substitution = vars
                .iter()
                .map(|v| (v.to_string(), random_formula(rng, sig, &vars, 2)))
                .collect();
            let g2: Vec<Formula> = gamma.iter().map(|g| sigma.apply(g)).collect();
            let c2 = sigma.apply(&goal);
            if !rel.holds(&g2, &c2) {
                report.violations.push(format!("SI: {} then {}", show(&gamma, &goal), show(&g2, &c2)));
            }
        }
        report.checked += 4;
    }
    report
}

fn subsets(pool: &[Formula]) -> Vec<Vec<Formula>> {
    (0..1usize << pool.len())
        .map(|mask| {
            pool.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, f)| f.clone())
                .collect()
        })
        .collect()
}

fn plus(gamma: &[Formula], extra: &[&Formula]) -> Vec<Formula> {
    let mut out = gamma.to_vec();
    out.extend(extra.iter().map(|f| (*f).clone()));
    out
}

/// The abstract characterisation of a classical connective, checked with Γ over
/// every subset of `pool` and A, B, C over `pool`. Returns the failures.
pub fn classical_conditions(m: &BooleanMatrix, name: &str, pool: &[Formula]) -> (usize, Vec<String>) {
    let c = m.connective(name).expect("connective in matrix").clone();
    let mut checked = 0;
    let mut bad = Vec::new();
    let mut check = |ok: bool, what: String| {
        checked += 1;
        if !ok {
            bad.push(what);
        }
    };
    let ent = |g: &[Formula], goal: &Formula| entails(m, g, goal).unwrap();
    for gamma in subsets(pool) {
        for a in pool {
            match name {
                "top" => {
                    let top = Formula::app(&c, vec![]);
                    let lhs = ent(&plus(&gamma, &[&top]), a);
                    check(!lhs || ent(&gamma, a), format!("top: {}", show(&gamma, a)));
                }
                "bot" => {
                    let bot = Formula::app(&c, vec![]);
                    let lhs = ent(&gamma, &bot);
                    check(!lhs || ent(&gamma, a), format!("bot: {}", show(&gamma, a)));
                }
                "neg" => {
                    let na = Formula::app(&c, vec![a.clone()]);
                    for goal in pool {
                        check(ent(&[a.clone(), na.clone()], goal), format!("neg i: {} {}", a, goal));
                        let both = ent(&plus(&gamma, &[a]), goal) && ent(&plus(&gamma, &[&na]), goal);
                        check(!both || ent(&gamma, goal), format!("neg ii: {}", show(&gamma, goal)));
                    }
                }
                _ => {
                    for b in pool {
                        let ab = Formula::app(&c, vec![a.clone(), b.clone()]);
                        for goal in pool {
                            match name {
                                "and" => check(
                                    ent(&plus(&gamma, &[&ab]), goal) == ent(&plus(&gamma, &[a, b]), goal),
                                    format!("and: {} / {}", show(&gamma, goal), ab),
                                ),
                                "or" => check(
                                    ent(&plus(&gamma, &[&ab]), goal)
                                        == (ent(&plus(&gamma, &[a]), goal) && ent(&plus(&gamma, &[b]), goal)),
                                    format!("or: {} / {}", show(&gamma, goal), ab),
                                ),
                                "imp" => {
                                    check(ent(&[a.clone(), ab.clone()], b), format!("imp i: {}", ab));
                                    let ii = !ent(&plus(&gamma, &[&ab]), goal) || ent(&plus(&gamma, &[b]), goal);
                                    check(ii, format!("imp ii: {} / {}", show(&gamma, goal), ab));
                                    let both = ent(&plus(&gamma, &[a]), goal) && ent(&plus(&gamma, &[&ab]), goal);
                                    check(!both || ent(&gamma, goal), format!("imp iii: {} / {}", show(&gamma, goal), ab));
                                }
                                other => panic!("no characterisation for {}", other),
                            }
                        }
                    }
                }
            }
        }
    }
    (checked, bad)
}

/// Four formulas used as the premise pool for the classical characterisations.
pub fn classical_pool(m: &BooleanMatrix, name: &str) -> Vec<Formula> {
    let sig = m.signature();
    let texts: [&str; 4] = match name {
        "top" => ["p", "q", "top()", "r"],
        "bot" => ["p", "q", "bot()", "r"],
        "neg" => ["p", "q", "neg(p)", "neg(neg(q))"],
        "and" => ["p", "q", "and(p, q)", "and(q, r)"],
        "or" => ["p", "q", "or(p, q)", "or(q, r)"],
        "imp" => ["p", "q", "imp(p, q)", "imp(q, p)"],
        other => panic!("no pool for {}", other),
    };
    texts.iter().map(|t| f(sig, t)).collect()
}

/// Truth tables of every term over the biconditional alone with at most `arity`
/// parameters and depth at most `depth`.
pub fn equiv_terms_oracle(arity: usize, depth: usize) -> BTreeSet<TruthTable> {
    let m = matrix(&["eq"]);
    let vars = variable_pool(arity);
    let names: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
    let params: Vec<&str> = names.iter().map(String::as_str).collect();
    formulas_up_to_depth(m.signature(), &vars, depth)
        .iter()
        .map(|t| truth_table_of_term(&m, t, &params).unwrap())
        .collect()
}

pub fn all_tables(arity: usize) -> Vec<TruthTable> {
    let rows = 1usize << arity;
    (0..1u64 << rows)
        .map(|code| TruthTable::new(arity, (0..rows).map(|r| code >> r & 1 == 1).collect()).unwrap())
        .collect()
}

/// The four mixed ternary connectives, built from the binary builtins.
pub fn mixed_ternary() -> Vec<(&'static str, TruthTable)> {
    vec![
        ("or_xor", TruthTable::from_fn(3, |a| a[0] || (a[1] ^ a[2]))),
        ("and_imp", TruthTable::from_fn(3, |a| a[0] && (!a[1] || a[2]))),
        ("and_or", TruthTable::from_fn(3, |a| a[0] && (a[1] || a[2]))),
        ("or_and", TruthTable::from_fn(3, |a| a[0] || (a[1] && a[2]))),
    ]
}

pub fn single(name: &str, t: TruthTable) -> BooleanMatrix {
    BooleanMatrix::new().with(name, t).unwrap()
}

pub fn connective(m: &BooleanMatrix, name: &str) -> Connective {
    m.connective(name).unwrap().clone()
}
