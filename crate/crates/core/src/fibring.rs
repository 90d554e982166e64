//! Decision procedure for the disjoint fibring of two logics, each given by a
//! single two-valued matrix.
//!
//! A consecution `Γ ⊢ C` holds in the fibring iff, writing `S` for the
//! saturation of `Γ`, either `S ∪ Mx ⊢ C` in the component that owns the head
//! of `C` (where `Mx` collects the monoliths of `C` that are themselves
//! fibred consequences of `Γ`), or `S` is explosive in the other component.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::semantics::{entails, is_satisfiable, BooleanMatrix, Compiled, SemanticsError, MAX_VARIABLES};
use crate::syntax::{monoliths, skeleton, subformulas_of, Formula, Signature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibringError {
    #[error("component signatures overlap on `{0}`")]
    Overlap(String),
    #[error("connective `{0}` belongs to neither component")]
    ForeignConnective(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibredSystem {
    side_a: BooleanMatrix,
    side_b: BooleanMatrix,
    union: BooleanMatrix,
}

impl FibredSystem {
    pub fn new(side_a: BooleanMatrix, side_b: BooleanMatrix) -> Result<Self, FibringError> {
        if let Some(c) = side_a
            .signature()
            .iter()
            .find(|c| side_b.signature().get(c.name()).is_some())
        {
            return Err(FibringError::Overlap(c.name().to_string()));
        }
        let union = side_a.union(&side_b)?;
        Ok(FibredSystem {
            side_a,
            side_b,
            union,
        })
    }

    pub fn side(&self, side: Side) -> &BooleanMatrix {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn side_a(&self) -> &BooleanMatrix {
        &self.side_a
    }

    pub fn side_b(&self) -> &BooleanMatrix {
        &self.side_b
    }

    /// The single matrix interpreting both signatures classically.
    pub fn union_matrix(&self) -> &BooleanMatrix {
        &self.union
    }

    pub fn signature(&self) -> &Signature {
        self.union.signature()
    }

    pub fn swapped(&self) -> FibredSystem {
        FibredSystem {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
            union: self.union.clone(),
        }
    }

    fn check_language<'a, I>(&self, formulas: I) -> Result<(), FibringError>
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        for f in formulas {
            if let Some(c) = f.connectives().into_iter().find(|c| !self.signature().contains(c)) {
                return Err(FibringError::ForeignConnective(c.name().to_string()));
            }
        }
        Ok(())
    }

    /// Which component's condition decides a goal: the owner of its head, or side
    /// A for atoms.
    fn owner(&self, goal: &Formula) -> Side {
        match goal.head() {
            Some(c) if self.side_b.signature().contains(c) => Side::B,
            _ => Side::A,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaturationResult {
    pub closure: BTreeSet<Formula>,
    /// Number of steps that enlarged the set.
    pub iterations: usize,
}

/// Members of `candidates` entailed by `theory` in `side`, skeletonizing both.
fn consequences_in(
    side: &BooleanMatrix,
    theory: &BTreeSet<Formula>,
    candidates: &[&Formula],
) -> Result<Vec<bool>, SemanticsError> {
    let sig = side.signature();
    let theory_sk: Vec<Formula> = theory.iter().map(|f| skeleton(sig, f)).collect();
    let cand_sk: Vec<Formula> = candidates.iter().map(|f| skeleton(sig, f)).collect();
    let mut atoms = Vec::new();
    for f in theory_sk.iter().chain(&cand_sk) {
        f.collect_atoms(&mut atoms);
    }
    if atoms.len() > MAX_VARIABLES {
        // One query per candidate keeps each enumeration as small as possible.
        return candidates
            .iter()
            .map(|c| entails(side, theory, c))
            .collect();
    }
    let theory_c = theory_sk
        .iter()
        .map(|f| Compiled::new(side, f, &atoms))
        .collect::<Result<Vec<_>, _>>()?;
    let cand_c = cand_sk
        .iter()
        .map(|f| Compiled::new(side, f, &atoms))
        .collect::<Result<Vec<_>, _>>()?;
    let mut entailed = vec![true; candidates.len()];
    for v in 0..1u64 << atoms.len() {
        if theory_c.iter().all(|t| t.eval(v)) {
            for (e, c) in entailed.iter_mut().zip(&cand_c) {
                if *e && !c.eval(v) {
                    *e = false;
                }
            }
            if entailed.iter().all(|e| !e) {
                break;
            }
        }
    }
    Ok(entailed)
}

/// Least fixpoint of `S ↦ {D ∈ sub(Γ) : S ⊢_a D or S ⊢_b D}` from `S = Γ`.
pub fn saturate<'a, I>(sys: &FibredSystem, gamma: I) -> Result<SaturationResult, FibringError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let gamma: BTreeSet<Formula> = gamma.into_iter().cloned().collect();
    sys.check_language(&gamma)?;
    let sub = subformulas_of(&gamma);
    let mut closure = gamma;
    let mut iterations = 0;
    loop {
        let pending: Vec<&Formula> = sub.iter().filter(|d| !closure.contains(*d)).collect();
        if pending.is_empty() {
            break;
        }
        let by_a = consequences_in(sys.side_a(), &closure, &pending)?;
        let still: Vec<&Formula> = pending
            .iter()
            .zip(&by_a)
            .filter(|(_, &e)| !e)
            .map(|(d, _)| *d)
            .collect();
        let by_b = consequences_in(sys.side_b(), &closure, &still)?;
        let added: Vec<Formula> = pending
            .iter()
            .zip(&by_a)
            .filter(|(_, &e)| e)
            .map(|(d, _)| (*d).clone())
            .chain(still.iter().zip(&by_b).filter(|(_, &e)| e).map(|(d, _)| (*d).clone()))
            .collect();
        if added.is_empty() {
            break;
        }
        closure.extend(added);
        iterations += 1;
    }
    Ok(SaturationResult {
        closure,
        iterations,
    })
}

/// A set is explosive in a two-valued matrix iff its skeleton is unsatisfiable.
pub fn is_explosive<'a, I>(side: &BooleanMatrix, delta: I) -> Result<bool, FibringError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    Ok(!is_satisfiable(side, delta)?)
}

/// Per-query state: the saturation of `Γ` and memoized verdicts for goals.
struct Decider<'s> {
    sys: &'s FibredSystem,
    saturated: BTreeSet<Formula>,
    explosive: [Option<bool>; 2],
    memo: HashMap<Formula, bool>,
}

impl<'s> Decider<'s> {
    fn new(sys: &'s FibredSystem, gamma: &BTreeSet<Formula>) -> Result<Self, FibringError> {
        Ok(Decider {
            sys,
            saturated: saturate(sys, gamma)?.closure,
            explosive: [None, None],
            memo: HashMap::new(),
        })
    }

    fn explosive(&mut self, side: Side) -> Result<bool, FibringError> {
        let slot = match side {
            Side::A => 0,
            Side::B => 1,
        };
        if let Some(e) = self.explosive[slot] {
            return Ok(e);
        }
        let e = is_explosive(self.sys.side(side), &self.saturated)?;
        self.explosive[slot] = Some(e);
        Ok(e)
    }

    fn decide(&mut self, goal: &Formula) -> Result<bool, FibringError> {
        if let Some(&v) = self.memo.get(goal) {
            return Ok(v);
        }
        let owner = self.sys.owner(goal);
        let matrix = self.sys.side(owner);
        // Monoliths of a goal headed in `owner` (or atomic) are proper subformulas.
        let mut premises = self.saturated.clone();
        for m in monoliths(matrix.signature(), goal) {
            if self.decide(&m)? {
                premises.insert(m);
            }
        }
        let verdict = entails(matrix, &premises, goal)? || self.explosive(owner.other())?;
        self.memo.insert(goal.clone(), verdict);
        Ok(verdict)
    }
}

pub fn decide_fibred<'a, I>(sys: &FibredSystem, gamma: I, goal: &Formula) -> Result<bool, FibringError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let gamma: BTreeSet<Formula> = gamma.into_iter().cloned().collect();
    sys.check_language([goal])?;
    Decider::new(sys, &gamma)?.decide(goal)
}

/// Detailed verdict: the saturation used and the verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibredVerdict {
    pub saturation: SaturationResult,
    pub holds: bool,
}

pub fn decide_fibred_explained<'a, I>(
    sys: &FibredSystem,
    gamma: I,
    goal: &Formula,
) -> Result<FibredVerdict, FibringError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let gamma: BTreeSet<Formula> = gamma.into_iter().cloned().collect();
    sys.check_language([goal])?;
    let saturation = saturate(sys, &gamma)?;
    let holds = Decider::new(sys, &gamma)?.decide(goal)?;
    Ok(FibredVerdict { saturation, holds })
}

pub fn equivalent_fibred(sys: &FibredSystem, f: &Formula, g: &Formula) -> Result<bool, FibringError> {
    Ok(decide_fibred(sys, [f], g)? && decide_fibred(sys, [g], f)?)
}
