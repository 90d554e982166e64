//! Fibring of classical propositional fragments given by truth tables.
//!
//! Formulas, Boolean matrices, clone-theoretic classification of connectives,
//! Hilbert calculi, the fibred consequence relation and tools for predicting
//! and detecting when a fibring collapses to classical logic.

pub mod clones;
pub mod collapse;
pub mod enumerate;
pub mod fibring;
pub mod hilbert;
pub mod semantics;
pub mod syntax;

pub use collapse::{collapse_pair, merge_is_classical, CollapseError, CollapseReason, CollapseVerdict, Witness};
pub use fibring::{decide_fibred, saturate, FibredSystem, Side};
pub use semantics::{builtin_matrix, builtin_table, entails, BooleanMatrix, TruthTable};
pub use syntax::{parse_formula, Connective, Formula, Signature};
