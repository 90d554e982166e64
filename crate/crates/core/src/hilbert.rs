//! Hilbert calculi: schematic rules, derivation checking, rule union, and a
//! size-bounded forward-chaining search.
//!
//! Variables occurring in a rule are schematic. They are only ever matched
//! against or substituted into, never compared with object-level variables,
//! so a rule may reuse names such as `p` without capturing anything.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{
    subformulas_of, Connective, Formula, FormulaParser, ParseError, Signature, SignatureError,
    Substitution,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error("no builtin calculus for `{0}`")]
    UnknownCalculus(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("rule `{0}` defined twice")]
    DuplicateRule(String),
    #[error("rule `{rule}` uses connective `{connective}` outside the calculus signature")]
    ForeignConnective { rule: String, connective: String },
    #[error("malformed substitution at node {path}: {detail}")]
    MalformedSubstitution { path: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferenceRule {
    id: String,
    premises: Vec<Formula>,
    conclusion: Formula,
}

impl InferenceRule {
    pub fn new(id: impl Into<String>, premises: Vec<Formula>, conclusion: Formula) -> Self {
        InferenceRule {
            id: id.into(),
            premises,
            conclusion,
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn premises(&self) -> &[Formula] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }

    pub fn is_axiom(&self) -> bool {
        self.premises.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<Arc<str>> {
        let mut vars = self.conclusion.variables();
        for p in &self.premises {
            vars.extend(p.variables());
        }
        vars
    }
}

impl fmt::Display for InferenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.id)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{}", p)?;
        }
        if !self.premises.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "/ {}", self.conclusion)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertCalculus {
    signature: Signature,
    rules: Vec<InferenceRule>,
}

impl HilbertCalculus {
    pub fn new(signature: Signature, rules: Vec<InferenceRule>) -> Result<Self, HilbertError> {
        let mut ids = BTreeSet::new();
        for r in &rules {
            if !ids.insert(r.id.as_str()) {
                return Err(HilbertError::DuplicateRule(r.id.clone()));
            }
            for f in r.premises.iter().chain([&r.conclusion]) {
                if let Some(c) = f.connectives().into_iter().find(|c| !signature.contains(c)) {
                    return Err(HilbertError::ForeignConnective {
                        rule: r.id.clone(),
                        connective: c.name().to_string(),
                    });
                }
            }
        }
        Ok(HilbertCalculus { signature, rules })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rules(&self) -> &[InferenceRule] {
        &self.rules
    }

    pub fn rule(&self, id: &str) -> Option<&InferenceRule> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn rule_ids(&self) -> BTreeSet<&str> {
        self.rules.iter().map(|r| r.id.as_str()).collect()
    }
}

/// The calculus for one classical connective, named `name` in the result.
/// `not` is accepted as a synonym of `neg`.
pub fn builtin_calculus(name: &str) -> Result<HilbertCalculus, HilbertError> {
    let (arity, rules): (usize, &[&str]) = match name {
        "top" => (0, &["t1 : / C()"]),
        "bot" => (0, &["b1 : C() / p"]),
        "neg" | "not" => (
            1,
            &["n1 : p / C(C(p))", "n2 : C(C(p)) / p", "n3 : p ; C(p) / q"],
        ),
        "and" => (
            2,
            &["c1 : C(p, q) / p", "c2 : C(p, q) / q", "c3 : p ; q / C(p, q)"],
        ),
        "or" => (
            2,
            &[
                "d1 : p / C(p, q)",
                "d2 : C(p, p) / p",
                "d3 : C(p, q) / C(q, p)",
                "d4 : C(p, C(q, r)) / C(C(p, q), r)",
            ],
        ),
        "imp" => (
            2,
            &[
                "i1 : / C(p, C(q, p))",
                "i2 : / C(C(p, C(q, r)), C(C(p, q), C(p, r)))",
                "i3 : / C(C(C(p, q), p), p)",
                "i4 : p ; C(p, q) / q",
            ],
        ),
        "eq" => (
            2,
            &[
                "e1 : / C(C(p, C(q, r)), C(C(p, q), r))",
                "e2 : / C(C(C(p, r), C(q, p)), C(r, q))",
                "e3 : p ; C(p, q) / q",
            ],
        ),
        other => return Err(HilbertError::UnknownCalculus(other.to_string())),
    };
    let template = Signature::from_connectives([Connective::new("C", arity)])?;
    let target = Connective::new(name, arity);
    let signature = Signature::from_connectives([target.clone()])?;
    let rules = rules
        .iter()
        .map(|line| {
            let rule = parse_rule_line(line, &template).expect("builtin rule text parses");
            InferenceRule::new(
                rule.id,
                rule.premises.iter().map(|p| rename(p, &target)).collect(),
                rename(&rule.conclusion, &target),
            )
        })
        .collect();
    HilbertCalculus::new(signature, rules)
}

fn rename(f: &Formula, to: &Connective) -> Formula {
    match f {
        Formula::Application(_, args) => {
            Formula::Application(to.clone(), args.iter().map(|a| rename(a, to)).collect())
        }
        other => other.clone(),
    }
}

/// Union of two calculi over disjoint signatures.
pub fn merge_calculi(a: &HilbertCalculus, b: &HilbertCalculus) -> Result<HilbertCalculus, HilbertError> {
    let signature = a.signature.disjoint_union(&b.signature)?;
    let rules = a.rules.iter().chain(&b.rules).cloned().collect();
    HilbertCalculus::new(signature, rules)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct RuleFileError {
    pub line: usize,
    pub message: String,
}

fn parse_rule_line(text: &str, sig: &Signature) -> Result<InferenceRule, ParseError> {
    let mut p = FormulaParser::new(text, sig);
    let id = p.ident()?.to_string();
    p.expect(':')?;
    let mut premises = Vec::new();
    p.skip_ws();
    if p.peek() != Some('/') {
        loop {
            premises.push(p.formula()?);
            p.skip_ws();
            if p.peek() == Some(';') {
                p.expect(';')?;
            } else {
                break;
            }
        }
    }
    p.expect('/')?;
    let conclusion = p.formula()?;
    if !p.at_end() {
        return Err(p.syntax("trailing input after conclusion"));
    }
    Ok(InferenceRule::new(id, premises, conclusion))
}

/// Parses one rule per line: `id : A ; B / C`, or `id : / C` for an axiom.
pub fn parse_rule_file(text: &str, sig: &Signature) -> Result<HilbertCalculus, RuleFileError> {
    let mut rules: Vec<InferenceRule> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let rule = parse_rule_line(content, sig).map_err(|e| RuleFileError {
            line,
            message: e.to_string(),
        })?;
        if rules.iter().any(|r| r.id == rule.id) {
            return Err(RuleFileError {
                line,
                message: format!("rule `{}` defined twice", rule.id),
            });
        }
        rules.push(rule);
    }
    HilbertCalculus::new(sig.clone(), rules).map_err(|e| RuleFileError {
        line: 0,
        message: e.to_string(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Hypothesis,
    Rule {
        rule: String,
        substitution: Substitution,
        children: Vec<DerivationTree>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTree {
    pub formula: Formula,
    pub justification: Justification,
}

impl DerivationTree {
    pub fn hypothesis(formula: Formula) -> Self {
        DerivationTree {
            formula,
            justification: Justification::Hypothesis,
        }
    }

    pub fn rule(
        formula: Formula,
        rule: impl Into<String>,
        substitution: Substitution,
        children: Vec<DerivationTree>,
    ) -> Self {
        DerivationTree {
            formula,
            justification: Justification::Rule {
                rule: rule.into(),
                substitution,
                children,
            },
        }
    }

    /// Number of rule applications in the tree.
    pub fn steps(&self) -> usize {
        match &self.justification {
            Justification::Hypothesis => 0,
            Justification::Rule { children, .. } => {
                1 + children.iter().map(DerivationTree::steps).sum::<usize>()
            }
        }
    }

    /// Renders in the nested `(step ...)` file format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, indent: usize) {
        out.push_str(&"  ".repeat(indent));
        out.push_str(&format!("(step {} ", self.formula));
        match &self.justification {
            Justification::Hypothesis => out.push_str("(hyp))"),
            Justification::Rule {
                rule,
                substitution,
                children,
            } => {
                out.push_str(&format!("(rule {}", rule));
                for (v, f) in substitution.iter() {
                    out.push_str(&format!(" {}={}", v, f));
                }
                out.push(')');
                for c in children {
                    out.push('\n');
                    c.render_into(out, indent + 1);
                }
                out.push(')');
            }
        }
    }
}

fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        let parts: Vec<String> = path.iter().map(|i| i.to_string()).collect();
        format!("root/{}", parts.join("/"))
    }
}

pub fn check_derivation(
    h: &HilbertCalculus,
    hypotheses: &BTreeSet<Formula>,
    goal: &Formula,
    tree: &DerivationTree,
) -> Result<bool, HilbertError> {
    if &tree.formula != goal {
        return Ok(false);
    }
    check_node(h, hypotheses, tree, &mut Vec::new())
}

fn check_node(
    h: &HilbertCalculus,
    hypotheses: &BTreeSet<Formula>,
    node: &DerivationTree,
    path: &mut Vec<usize>,
) -> Result<bool, HilbertError> {
    match &node.justification {
        Justification::Hypothesis => Ok(hypotheses.contains(&node.formula)),
        Justification::Rule {
            rule,
            substitution,
            children,
        } => {
            let Some(rule) = h.rule(rule) else {
                return Ok(false);
            };
            let vars = rule.variables();
            if let Some((v, _)) = substitution.iter().find(|(v, _)| !vars.contains(*v)) {
                return Err(HilbertError::MalformedSubstitution {
                    path: path_string(path),
                    detail: format!("`{}` is not a variable of rule `{}`", v, rule.id),
                });
            }
            if let Some((v, _)) = substitution.iter().find(|(_, f)| matches!(f, Formula::Skeletal(_))) {
                return Err(HilbertError::MalformedSubstitution {
                    path: path_string(path),
                    detail: format!("`{}` is mapped to a skeletal variable", v),
                });
            }
            if substitution.apply(&rule.conclusion) != node.formula {
                return Ok(false);
            }
            let mut expected: Vec<Formula> =
                rule.premises.iter().map(|p| substitution.apply(p)).collect();
            let mut actual: Vec<Formula> = children.iter().map(|c| c.formula.clone()).collect();
            expected.sort();
            actual.sort();
            if expected != actual {
                return Ok(false);
            }
            for (i, c) in children.iter().enumerate() {
                path.push(i);
                let ok = check_node(h, hypotheses, c, path)?;
                path.pop();
                if !ok {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn match_pattern(
    pattern: &Formula,
    target: &Formula,
    binding: &mut BTreeMap<Arc<str>, Formula>,
) -> bool {
    match pattern {
        Formula::Variable(v) => match binding.get(v) {
            Some(bound) => bound == target,
            None => {
                binding.insert(v.clone(), target.clone());
                true
            }
        },
        Formula::Skeletal(_) => pattern == target,
        Formula::Application(c, args) => match target {
            Formula::Application(d, targs) if c == d => args
                .iter()
                .zip(targs)
                .all(|(a, t)| match_pattern(a, t, binding)),
            _ => false,
        },
    }
}

#[derive(Debug, Clone)]
enum Step {
    Hypothesis,
    Rule {
        rule: usize,
        substitution: Substitution,
        premises: Vec<Formula>,
    },
}

/// Breadth-first forward chaining from `hypotheses`, keeping only formulas of at
/// most `size_bound` nodes. Free rule variables range over the subformulas of the
/// hypotheses, the goal, and everything derived so far.
pub fn bounded_derive(
    h: &HilbertCalculus,
    hypotheses: &BTreeSet<Formula>,
    goal: &Formula,
    size_bound: usize,
) -> Option<DerivationTree> {
    let mut derived: BTreeMap<Formula, Step> = hypotheses
        .iter()
        .map(|f| (f.clone(), Step::Hypothesis))
        .collect();
    let mut domain: BTreeSet<Formula> = subformulas_of(hypotheses.iter().chain([goal]));
    domain.retain(|f| f.size() <= size_bound);

    while !derived.contains_key(goal) {
        let known: Vec<Formula> = derived.keys().cloned().collect();
        let pool: Vec<Formula> = domain.iter().cloned().collect();
        let mut fresh: BTreeMap<Formula, Step> = BTreeMap::new();
        for (idx, rule) in h.rules.iter().enumerate() {
            let mut emit = |binding: &BTreeMap<Arc<str>, Formula>| {
                let substitution: Substitution =
                    binding.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                let conclusion = substitution.apply(&rule.conclusion);
                if conclusion.size() > size_bound
                    || derived.contains_key(&conclusion)
                    || fresh.contains_key(&conclusion)
                {
                    return;
                }
                let premises = rule.premises.iter().map(|p| substitution.apply(p)).collect();
                fresh.insert(
                    conclusion,
                    Step::Rule {
                        rule: idx,
                        substitution,
                        premises,
                    },
                );
            };
            let free: Vec<Arc<str>> = {
                let bound: BTreeSet<Arc<str>> =
                    rule.premises.iter().flat_map(|p| p.variables()).collect();
                rule.conclusion
                    .variables()
                    .into_iter()
                    .filter(|v| !bound.contains(v))
                    .collect()
            };
            match_premises(&rule.premises, &known, &mut BTreeMap::new(), &mut |binding| {
                assign_free(&free, &pool, binding, &mut emit);
            });
        }
        if fresh.is_empty() {
            return None;
        }
        for f in fresh.keys() {
            for s in f.subformulas() {
                domain.insert(s);
            }
        }
        derived.extend(fresh);
    }
    Some(build_tree(h, &derived, goal))
}

type Binding = BTreeMap<Arc<str>, Formula>;

fn match_premises(premises: &[Formula], known: &[Formula], binding: &mut Binding, k: &mut dyn FnMut(&mut Binding)) {
    let Some((first, rest)) = premises.split_first() else {
        k(binding);
        return;
    };
    for f in known {
        let mut b = binding.clone();
        if match_pattern(first, f, &mut b) {
            match_premises(rest, known, &mut b, k);
        }
    }
}

fn assign_free(free: &[Arc<str>], pool: &[Formula], binding: &mut Binding, emit: &mut dyn FnMut(&Binding)) {
    let Some((v, rest)) = free.split_first() else {
        emit(binding);
        return;
    };
    for f in pool {
        binding.insert(v.clone(), f.clone());
        assign_free(rest, pool, binding, emit);
    }
    binding.remove(v);
}

fn build_tree(h: &HilbertCalculus, derived: &BTreeMap<Formula, Step>, f: &Formula) -> DerivationTree {
    match &derived[f] {
        Step::Hypothesis => DerivationTree::hypothesis(f.clone()),
        Step::Rule {
            rule,
            substitution,
            premises,
        } => DerivationTree::rule(
            f.clone(),
            h.rules[*rule].id.clone(),
            substitution.clone(),
            premises.iter().map(|p| build_tree(h, derived, p)).collect(),
        ),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("derivation file at {pos}: {message}")]
pub struct DerivationFileError {
    pub pos: usize,
    pub message: String,
}

impl From<ParseError> for DerivationFileError {
    fn from(e: ParseError) -> Self {
        let pos = match &e {
            ParseError::Syntax { pos, .. }
            | ParseError::UnknownConnective { pos, .. }
            | ParseError::ArityMismatch { pos, .. } => *pos,
        };
        DerivationFileError {
            pos,
            message: e.to_string(),
        }
    }
}

/// Parses `(step <formula> (hyp))` or
/// `(step <formula> (rule <id> <var>=<formula> ...) <child>*)`.
pub fn parse_derivation(text: &str, sig: &Signature) -> Result<DerivationTree, DerivationFileError> {
    let mut p = FormulaParser::new(text, sig);
    let tree = parse_step(&mut p)?;
    if !p.at_end() {
        return Err(p.syntax("trailing input after derivation").into());
    }
    Ok(tree)
}

fn keyword(p: &mut FormulaParser<'_>, word: &str) -> Result<(), DerivationFileError> {
    let pos = p.position();
    let found = p.ident()?;
    if found != word {
        return Err(DerivationFileError {
            pos,
            message: format!("expected `{}`, found `{}`", word, found),
        });
    }
    Ok(())
}

fn parse_step(p: &mut FormulaParser<'_>) -> Result<DerivationTree, DerivationFileError> {
    p.expect('(')?;
    keyword(p, "step")?;
    let formula = p.formula()?;
    p.expect('(')?;
    let pos = p.position();
    let kind = p.ident()?;
    match kind {
        "hyp" => {
            p.expect(')')?;
            p.expect(')')?;
            Ok(DerivationTree::hypothesis(formula))
        }
        "rule" => {
            let rule = p.ident()?.to_string();
            let mut substitution = Substitution::new();
            loop {
                p.skip_ws();
                if p.peek() == Some(')') {
                    p.expect(')')?;
                    break;
                }
                let var_pos = p.position();
                let var = p.ident()?.to_string();
                p.expect('=')?;
                let value = p.formula()?;
                if substitution.insert(&var, value).is_some() {
                    return Err(DerivationFileError {
                        pos: var_pos,
                        message: format!("variable `{}` bound twice", var),
                    });
                }
            }
            let mut children = Vec::new();
            loop {
                p.skip_ws();
                if p.peek() == Some(')') {
                    p.expect(')')?;
                    break;
                }
                children.push(parse_step(p)?);
            }
            Ok(DerivationTree::rule(formula, rule, substitution, children))
        }
        other => Err(DerivationFileError {
            pos,
            message: format!("expected `hyp` or `rule`, found `{}`", other),
        }),
    }
}
