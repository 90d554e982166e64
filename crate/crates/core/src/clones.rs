//! Classification of Boolean term functions and the Post-lattice predicates
//! needed to decide functional completeness.

use std::collections::BTreeSet;

use crate::semantics::{row_arg, TruthTable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub top_like: bool,
    pub bottom_like: bool,
    /// 1-based argument positions.
    pub projective_components: BTreeSet<usize>,
    pub projection_conjunction: bool,
    pub significant: bool,
    pub very_significant: bool,
}

/// Membership of a table in each of the five maximal incomplete clones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostProfile {
    pub preserves_zero: bool,
    pub preserves_one: bool,
    pub monotone: bool,
    pub affine: bool,
    pub self_dual: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PostClone {
    PreservesZero,
    PreservesOne,
    Monotone,
    Affine,
    SelfDual,
}

impl PostClone {
    pub const ALL: [PostClone; 5] = [
        PostClone::PreservesZero,
        PostClone::PreservesOne,
        PostClone::Monotone,
        PostClone::Affine,
        PostClone::SelfDual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PostClone::PreservesZero => "0-preserving",
            PostClone::PreservesOne => "1-preserving",
            PostClone::Monotone => "monotone",
            PostClone::Affine => "affine",
            PostClone::SelfDual => "self-dual",
        }
    }
}

impl PostProfile {
    pub fn has(&self, clone: PostClone) -> bool {
        match clone {
            PostClone::PreservesZero => self.preserves_zero,
            PostClone::PreservesOne => self.preserves_one,
            PostClone::Monotone => self.monotone,
            PostClone::Affine => self.affine,
            PostClone::SelfDual => self.self_dual,
        }
    }
}

/// Positions `j` such that every designated row has argument `j` set.
pub fn projective_components(t: &TruthTable) -> BTreeSet<usize> {
    let k = t.arity();
    (0..k)
        .filter(|&j| (0..t.rows()).all(|r| !t.output(r) || row_arg(r, k, j)))
        .map(|j| j + 1)
        .collect()
}

pub fn classify(t: &TruthTable) -> Classification {
    let top_like = t.outputs().iter().all(|&b| b);
    let bottom_like = t.outputs().iter().all(|&b| !b);
    let projective = projective_components(t);
    let k = t.arity();
    let projection_conjunction = (0..t.rows())
        .filter(|&r| projective.iter().all(|&j| row_arg(r, k, j - 1)))
        .all(|r| t.output(r));
    let significant = !top_like && !bottom_like;
    Classification {
        top_like,
        bottom_like,
        projective_components: projective,
        projection_conjunction,
        significant,
        very_significant: significant && !projection_conjunction,
    }
}

/// Coefficients of the algebraic normal form, indexed by monomial bitmask over rows.
pub fn anf(t: &TruthTable) -> Vec<bool> {
    let mut coeffs = t.outputs().to_vec();
    for i in 0..t.arity() {
        let bit = 1 << i;
        for r in 0..coeffs.len() {
            if r & bit != 0 {
                coeffs[r] ^= coeffs[r ^ bit];
            }
        }
    }
    coeffs
}

pub fn anf_degree(t: &TruthTable) -> usize {
    anf(t)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(m, _)| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn post_profile(t: &TruthTable) -> PostProfile {
    let rows = t.rows();
    let mask = rows - 1;
    let monotone = (0..rows).all(|r| {
        (0..t.arity())
            .map(|i| 1 << i)
            .filter(|bit| r & bit == 0)
            .all(|bit| !t.output(r) || t.output(r | bit))
    });
    PostProfile {
        preserves_zero: !t.output(0),
        preserves_one: t.output(rows - 1),
        monotone,
        affine: anf_degree(t) <= 1,
        self_dual: (0..rows).all(|r| t.output(r) != t.output(!r & mask)),
    }
}

/// Post properties shared by every member of `ts`.
pub fn shared_post_clones<'a, I>(ts: I) -> Vec<PostClone>
where
    I: IntoIterator<Item = &'a TruthTable>,
{
    let profiles: Vec<PostProfile> = ts.into_iter().map(post_profile).collect();
    PostClone::ALL
        .into_iter()
        .filter(|&c| profiles.iter().all(|p| p.has(c)))
        .collect()
}

/// Post's criterion: complete iff no maximal clone contains every member.
pub fn is_functionally_complete<'a, I>(ts: I) -> bool
where
    I: IntoIterator<Item = &'a TruthTable>,
{
    let ts: Vec<&TruthTable> = ts.into_iter().collect();
    !ts.is_empty() && shared_post_clones(ts).is_empty()
}

/// Membership in the clone generated by the biconditional.
pub fn in_equiv_clone(t: &TruthTable) -> bool {
    let p = post_profile(t);
    p.affine && p.preserves_one
}

pub fn generates_top_clone<'a, I>(ts: I) -> bool
where
    I: IntoIterator<Item = &'a TruthTable>,
{
    ts.into_iter().all(|t| classify(t).top_like)
}

pub fn completable_by_top<'a, I>(ts: I) -> bool
where
    I: IntoIterator<Item = &'a TruthTable>,
{
    let top = TruthTable::constant(0, true);
    let mut all: Vec<&TruthTable> = ts.into_iter().collect();
    all.push(&top);
    is_functionally_complete(all)
}
