//! When does fibring two classical fragments give back the classical logic of
//! the joint language? Pairwise prediction, the merge-to-classical test for
//! connective sets, empirical discrepancy search, and the construction of
//! infinitely many pairwise inequivalent formulas in one variable set.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::clones::{
    classify, completable_by_top, generates_top_clone, in_equiv_clone, is_functionally_complete,
    projective_components,
};
use crate::enumerate::{formulas_up_to_depth, variable_pool, Consecution, ConsecutionSpace};
use crate::fibring::{decide_fibred, equivalent_fibred, FibredSystem, FibringError, Side};
use crate::semantics::{entails, truth_table_of_term, BooleanMatrix, TruthTable};
use crate::syntax::{Connective, Formula, Substitution};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("the two connectives have the same truth table")]
    IdenticalConnectives,
    #[error("formulas {first} and {second} of the family are fibred-equivalent")]
    VerificationFailed { first: usize, second: usize },
    #[error(transparent)]
    Fibring(#[from] FibringError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollapseReason {
    TopLike(Side),
    NeitherVerySignificant,
    EquivClonePlusBot,
    None,
}

impl fmt::Display for CollapseReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollapseReason::TopLike(Side::A) => f.write_str("TopLike(a)"),
            CollapseReason::TopLike(Side::B) => f.write_str("TopLike(b)"),
            CollapseReason::NeitherVerySignificant => f.write_str("NeitherVerySignificant"),
            CollapseReason::EquivClonePlusBot => f.write_str("EquivClonePlusBot"),
            CollapseReason::None => f.write_str("None"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollapseVerdict {
    pub collapses: bool,
    pub reason: CollapseReason,
}

fn is_nullary_bottom(t: &TruthTable) -> bool {
    t.arity() == 0 && !t.output(0)
}

/// Predicts whether the fibring of two single-connective classical logics is the
/// classical logic of both connectives.
pub fn collapse_pair(t1: &TruthTable, t2: &TruthTable) -> Result<CollapseVerdict, CollapseError> {
    if t1 == t2 {
        return Err(CollapseError::IdenticalConnectives);
    }
    let (c1, c2) = (classify(t1), classify(t2));
    let reason = if c1.top_like {
        CollapseReason::TopLike(Side::A)
    } else if c2.top_like {
        CollapseReason::TopLike(Side::B)
    } else if !c1.very_significant && !c2.very_significant {
        CollapseReason::NeitherVerySignificant
    } else if (is_nullary_bottom(t2) && in_equiv_clone(t1))
        || (is_nullary_bottom(t1) && in_equiv_clone(t2))
    {
        CollapseReason::EquivClonePlusBot
    } else {
        CollapseReason::None
    };
    Ok(CollapseVerdict {
        collapses: reason != CollapseReason::None,
        reason,
    })
}

/// For two individually incomplete connective sets whose union is complete:
/// is their disjoint fibring full classical logic?
pub fn merge_is_classical(conn1: &[TruthTable], conn2: &[TruthTable]) -> Result<bool, CollapseError> {
    if conn1.is_empty() || conn2.is_empty() {
        return Err(CollapseError::Precondition("connective sets must be nonempty".into()));
    }
    if is_functionally_complete(conn1) {
        return Err(CollapseError::Precondition(
            "the first connective set is already functionally complete".into(),
        ));
    }
    if is_functionally_complete(conn2) {
        return Err(CollapseError::Precondition(
            "the second connective set is already functionally complete".into(),
        ));
    }
    if !is_functionally_complete(conn1.iter().chain(conn2)) {
        return Err(CollapseError::Precondition(
            "the union of the connective sets is not functionally complete".into(),
        ));
    }
    Ok((generates_top_clone(conn2) && completable_by_top(conn1))
        || (generates_top_clone(conn1) && completable_by_top(conn2)))
}

/// A consecution on which classical logic and the fibring disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub premises: Vec<Formula>,
    pub goal: Formula,
    pub classical_verdict: bool,
    pub fibred_verdict: bool,
}

impl Witness {
    /// Re-runs both deciders and checks they still disagree as recorded.
    pub fn reverify(&self, sys: &FibredSystem) -> Result<bool, CollapseError> {
        let classical = entails(sys.union_matrix(), &self.premises, &self.goal).map_err(FibringError::from)?;
        let fibred = decide_fibred(sys, &self.premises, &self.goal)?;
        Ok(classical == self.classical_verdict
            && fibred == self.fibred_verdict
            && classical != fibred)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = Consecution {
            premises: self.premises.clone(),
            goal: self.goal.clone(),
        };
        write!(
            f,
            "{} (classical: {}, fibred: {})",
            c.render(),
            self.classical_verdict,
            self.fibred_verdict
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_depth: usize,
    pub max_premises: usize,
    pub var_pool: usize,
}

impl SearchBounds {
    pub fn new(max_depth: usize, max_premises: usize, var_pool: usize) -> Self {
        SearchBounds {
            max_depth,
            max_premises,
            var_pool,
        }
    }
}

/// Compares the classical and fibred verdicts on one consecution.
pub fn compare(sys: &FibredSystem, c: &Consecution) -> Result<Option<Witness>, CollapseError> {
    let classical = entails(sys.union_matrix(), &c.premises, &c.goal).map_err(FibringError::from)?;
    let fibred = decide_fibred(sys, &c.premises, &c.goal)?;
    Ok((classical != fibred).then(|| Witness {
        premises: c.premises.clone(),
        goal: c.goal.clone(),
        classical_verdict: classical,
        fibred_verdict: fibred,
    }))
}

/// The space of consecutions explored by [`search_discrepancy`].
pub fn search_space(sys: &FibredSystem, bounds: SearchBounds) -> ConsecutionSpace {
    let vars = variable_pool(bounds.var_pool);
    ConsecutionSpace::new(
        formulas_up_to_depth(sys.signature(), &vars, bounds.max_depth),
        bounds.max_premises,
    )
}

/// First consecution, by total size then canonical text, on which classical
/// logic and the fibring disagree. `None` only means none within the bounds.
pub fn search_discrepancy(sys: &FibredSystem, bounds: SearchBounds) -> Result<Option<Witness>, CollapseError> {
    if bounds.max_depth == 0 || bounds.var_pool == 0 {
        return Err(CollapseError::Precondition("search bounds must be positive".into()));
    }
    let space = search_space(sys, bounds);
    for total in 1..=space.max_total_size() {
        let class = space.class(total);
        let found = class.par_iter().find_map_first(|c| match compare(sys, c) {
            Ok(None) => None,
            other => Some(other),
        });
        if let Some(result) = found {
            return result;
        }
    }
    Ok(None)
}

fn unary_table(m: &BooleanMatrix, f: &Formula) -> TruthTable {
    truth_table_of_term(m, f, &["p"]).expect("one-variable term over the matrix")
}

/// A compound formula in the single variable `p`, built from `conn` alone, whose
/// term function is the identity or negation.
pub fn find_significant_unary(conn: &Connective, t: &TruthTable) -> Result<Formula, CollapseError> {
    if conn.arity() != t.arity() {
        return Err(CollapseError::Precondition(format!(
            "`{}` has arity {} but its table has arity {}",
            conn.name(),
            conn.arity(),
            t.arity()
        )));
    }
    if t.arity() == 0 || !classify(t).significant {
        return Err(CollapseError::Precondition(format!(
            "`{}` must be significant with positive arity",
            conn.name()
        )));
    }
    let m = BooleanMatrix::new()
        .with(conn.name(), t.clone())
        .map_err(FibringError::from)?;
    let p = Formula::var("p");
    let diagonal = Formula::app(conn, vec![p.clone(); t.arity()]);
    let low = t.output(0);
    let high = t.output(t.rows() - 1);
    if low != high {
        return Ok(diagonal);
    }
    // The diagonal is constant: pick a row whose output differs from it, and feed
    // the diagonal into the positions that must take the constant's value.
    let row = (0..t.rows())
        .find(|&r| t.output(r) != low)
        .expect("significant table is not constant");
    let k = t.arity();
    let args = (0..k)
        .map(|i| {
            let bit = crate::semantics::row_arg(row, k, i);
            if bit == low {
                diagonal.clone()
            } else {
                p.clone()
            }
        })
        .collect();
    let f = Formula::app(conn, args);
    let table = unary_table(&m, &f).bitstring();
    debug_assert!(table == "01" || table == "10", "got {}", table);
    Ok(f)
}

/// Compound terms in `p` over `conn`, by increasing size then rendering.
fn compound_unary_terms(conn: &Connective, count: usize) -> Vec<Formula> {
    let k = conn.arity();
    let mut by_size: Vec<Vec<Formula>> = vec![Vec::new(), vec![Formula::var("p")]];
    let mut out = Vec::new();
    let mut size = 1;
    while out.len() < count {
        size += 1;
        let mut level = Vec::new();
        let mut split = Vec::new();
        compositions(size - 1, k, &mut split, &mut |parts| {
            let pools: Vec<&Vec<Formula>> = parts.iter().map(|&s| &by_size[s]).collect();
            product(&pools, &mut Vec::new(), &mut |args| {
                level.push(Formula::app(conn, args.to_vec()));
            });
        });
        level.sort_by_key(|f| f.to_string());
        out.extend(level.iter().cloned());
        by_size.push(level);
    }
    out.truncate(count);
    out
}

fn compositions(total: usize, parts: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if parts == 0 {
        if total == 0 {
            f(acc);
        }
        return;
    }
    for first in 1..=total.saturating_sub(parts - 1) {
        acc.push(first);
        compositions(total - first, parts - 1, acc, f);
        acc.pop();
    }
}

fn product(pools: &[&Vec<Formula>], acc: &mut Vec<Formula>, f: &mut dyn FnMut(&[Formula])) {
    let Some((first, rest)) = pools.split_first() else {
        f(acc);
        return;
    };
    for x in first.iter() {
        acc.push(x.clone());
        product(rest, acc, f);
        acc.pop();
    }
}

fn single_connective(m: &BooleanMatrix, which: &str) -> Result<(Connective, TruthTable), CollapseError> {
    let mut it = m.iter();
    match (it.next(), it.next()) {
        (Some((c, t)), None) => Ok((c.clone(), t.clone())),
        _ => Err(CollapseError::Precondition(format!(
            "side {} must interpret exactly one connective",
            which
        ))),
    }
}

/// `m` syntactically distinct formulas over the two connectives of `sys`
/// (side A very significant, side B neither top-like nor the nullary bottom)
/// that are pairwise inequivalent in the fibring, although they use a fixed
/// finite set of variables. Each pair is checked before returning.
pub fn inequivalence_family(sys: &FibredSystem, m: usize) -> Result<Vec<Formula>, CollapseError> {
    let (c1, t1) = single_connective(sys.side_a(), "a")?;
    let (c2, t2) = single_connective(sys.side_b(), "b")?;
    if !classify(&t1).very_significant {
        return Err(CollapseError::Precondition(format!("`{}` is not very significant", c1.name())));
    }
    let class2 = classify(&t2);
    if class2.top_like {
        return Err(CollapseError::Precondition(format!("`{}` is top-like", c2.name())));
    }
    if t2.arity() == 0 {
        return Err(CollapseError::Precondition(format!(
            "`{}` is the nullary bottom connective",
            c2.name()
        )));
    }
    if m == 0 {
        return Err(CollapseError::Precondition("family size must be positive".into()));
    }

    let k1 = c1.arity();
    let needed = m * k1 + 1;
    let psi: Vec<Formula> = if class2.significant {
        let base = find_significant_unary(&c2, &t2)?;
        let mut seq = vec![base.clone()];
        while seq.len() < needed {
            let prev = seq.last().unwrap().clone();
            let s: Substitution = [("p", prev)].into_iter().collect();
            seq.push(s.apply(&base));
        }
        seq
    } else {
        compound_unary_terms(&c2, needed)
    };

    let projective = projective_components(&t1);
    let family: Vec<Formula> = (1..=m)
        .map(|n| {
            let args = (1..=k1)
                .map(|i| {
                    if projective.contains(&i) {
                        Formula::var(format!("p{}", i))
                    } else {
                        psi[n * i].clone()
                    }
                })
                .collect();
            Formula::app(&c1, args)
        })
        .collect();

    for a in 0..family.len() {
        for b in a + 1..family.len() {
            if equivalent_fibred(sys, &family[a], &family[b])? {
                return Err(CollapseError::VerificationFailed { first: a, second: b });
            }
        }
    }
    Ok(family)
}
