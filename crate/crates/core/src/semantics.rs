//! Two-valued matrix semantics: truth tables, valuations and brute-force
//! consequence over the values {0, 1} with 1 designated.
//!
//! Rows of a truth table are numbered so that argument 1 is the most significant
//! bit of the row index; row 0 is the all-zeros input.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::syntax::{skeleton, Connective, Formula, Signature, SignatureError};

/// Largest number of distinct (skeletal) variables a single query may enumerate.
pub const MAX_VARIABLES: usize = 24;

const PARALLEL_THRESHOLD: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("connective `{0}` is not interpreted by the matrix")]
    UnknownConnective(String),
    #[error("query needs {found} variables, above the budget of {limit}")]
    VariableBudget { found: usize, limit: usize },
    #[error("variable `{0}` is not among the term parameters")]
    FreeVariable(String),
    #[error("term functions cannot contain skeletal variables")]
    SkeletalInTerm,
    #[error("invalid threshold T({n},{k}): need n >= k >= 0")]
    InvalidThreshold { n: usize, k: usize },
    #[error("unknown builtin connective `{0}`")]
    UnknownBuiltin(String),
    #[error("bad truth table: {0}")]
    BadTable(String),
    #[error("table for `{name}` has arity {table}, connective has arity {connective}")]
    ArityMismatch {
        name: String,
        connective: usize,
        table: usize,
    },
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    arity: usize,
    outputs: Vec<bool>,
}

impl TruthTable {
    pub fn new(arity: usize, outputs: Vec<bool>) -> Result<Self, SemanticsError> {
        if arity >= usize::BITS as usize || outputs.len() != 1usize << arity {
            return Err(SemanticsError::BadTable(format!(
                "arity {} needs {} rows, got {}",
                arity,
                1u128 << arity.min(127),
                outputs.len()
            )));
        }
        Ok(TruthTable { arity, outputs })
    }

    /// Builds a table from a function of the argument tuple.
    pub fn from_fn(arity: usize, mut f: impl FnMut(&[bool]) -> bool) -> Self {
        let mut args = vec![false; arity];
        let outputs = (0..1usize << arity)
            .map(|row| {
                for (i, a) in args.iter_mut().enumerate() {
                    *a = row_arg(row, arity, i);
                }
                f(&args)
            })
            .collect();
        TruthTable { arity, outputs }
    }

    /// Parses a bitstring such as `0001` with a given arity.
    pub fn parse(arity: usize, bits: &str) -> Result<Self, SemanticsError> {
        let outputs = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(SemanticsError::BadTable(format!("unexpected `{}`", other))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        TruthTable::new(arity, outputs)
    }

    pub fn constant(arity: usize, value: bool) -> Self {
        TruthTable {
            arity,
            outputs: vec![value; 1 << arity],
        }
    }

    /// The `index`-th projection (0-based) of the given arity.
    pub fn projection(arity: usize, index: usize) -> Self {
        assert!(index < arity);
        TruthTable::from_fn(arity, |args| args[index])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> usize {
        self.outputs.len()
    }

    pub fn output(&self, row: usize) -> bool {
        self.outputs[row]
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn eval(&self, args: &[bool]) -> bool {
        debug_assert_eq!(args.len(), self.arity);
        let row = args.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        self.outputs[row]
    }

    pub fn bitstring(&self) -> String {
        self.outputs.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// Value of argument `i` (0-based) in `row` of a table with `arity` arguments.
pub fn row_arg(row: usize, arity: usize, i: usize) -> bool {
    (row >> (arity - 1 - i)) & 1 == 1
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bitstring())
    }
}

impl FromStr for TruthTable {
    type Err = SemanticsError;

    /// Infers the arity from the bitstring length, which must be a power of two.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let len = s.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SemanticsError::BadTable(format!(
                "length {} is not a power of two",
                len
            )));
        }
        TruthTable::parse(len.trailing_zeros() as usize, s)
    }
}

/// A signature together with a Boolean interpretation of each connective.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BooleanMatrix {
    signature: Signature,
    tables: BTreeMap<String, TruthTable>,
}

impl BooleanMatrix {
    pub fn new() -> Self {
        BooleanMatrix::default()
    }

    pub fn insert(&mut self, name: &str, table: TruthTable) -> Result<Connective, SemanticsError> {
        let conn = Connective::new(name, table.arity());
        self.signature.insert(conn.clone())?;
        self.tables.insert(name.to_string(), table);
        Ok(conn)
    }

    pub fn with(mut self, name: &str, table: TruthTable) -> Result<Self, SemanticsError> {
        self.insert(name, table)?;
        Ok(self)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn table(&self, name: &str) -> Option<&TruthTable> {
        self.tables.get(name)
    }

    pub fn connective(&self, name: &str) -> Option<&Connective> {
        self.signature.get(name)
    }

    pub fn table_of(&self, c: &Connective) -> Option<&TruthTable> {
        if self.signature.contains(c) {
            self.tables.get(c.name())
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Connective, &TruthTable)> {
        self.signature.iter().map(|c| (c, &self.tables[c.name()]))
    }

    pub fn tables(&self) -> impl Iterator<Item = &TruthTable> {
        self.tables.values()
    }

    /// The matrix interpreting both signatures, which must be disjoint.
    pub fn union(&self, other: &BooleanMatrix) -> Result<BooleanMatrix, SemanticsError> {
        let signature = self.signature.disjoint_union(&other.signature)?;
        let mut tables = self.tables.clone();
        tables.extend(other.tables.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(BooleanMatrix { signature, tables })
    }
}

/// An assignment of bits to ordinary and skeletal variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    assignment: HashMap<Formula, bool>,
}

impl Valuation {
    pub fn new() -> Self {
        Valuation::default()
    }

    pub fn set_var(&mut self, name: &str, value: bool) -> &mut Self {
        self.assignment.insert(Formula::var(name), value);
        self
    }

    /// `atom` should be a variable or a skeletal variable.
    pub fn set(&mut self, atom: Formula, value: bool) -> &mut Self {
        debug_assert!(atom.is_atomic());
        self.assignment.insert(atom, value);
        self
    }

    pub fn get(&self, atom: &Formula) -> Option<bool> {
        self.assignment.get(atom).copied()
    }
}

impl<'a> FromIterator<(&'a str, bool)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (&'a str, bool)>>(iter: T) -> Self {
        let mut v = Valuation::new();
        for (name, b) in iter {
            v.set_var(name, b);
        }
        v
    }
}

pub fn eval_formula(m: &BooleanMatrix, v: &Valuation, f: &Formula) -> Result<bool, SemanticsError> {
    match f {
        Formula::Variable(_) | Formula::Skeletal(_) => {
            v.get(f).ok_or_else(|| SemanticsError::Unassigned(f.to_string()))
        }
        Formula::Application(c, args) => {
            let table = m
                .table_of(c)
                .ok_or_else(|| SemanticsError::UnknownConnective(c.name().to_string()))?;
            let vals = args
                .iter()
                .map(|a| eval_formula(m, v, a))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(table.eval(&vals))
        }
    }
}

/// Table of the term function `λ params . f`.
pub fn truth_table_of_term(
    m: &BooleanMatrix,
    f: &Formula,
    params: &[&str],
) -> Result<TruthTable, SemanticsError> {
    if params.len() > MAX_VARIABLES {
        return Err(SemanticsError::VariableBudget {
            found: params.len(),
            limit: MAX_VARIABLES,
        });
    }
    let atoms: Vec<Formula> = params.iter().map(Formula::var).collect();
    for a in f.atoms() {
        match &a {
            Formula::Skeletal(_) => return Err(SemanticsError::SkeletalInTerm),
            Formula::Variable(name) if !params.contains(&&**name) => {
                return Err(SemanticsError::FreeVariable(name.to_string()))
            }
            _ => {}
        }
    }
    let compiled = Compiled::new(m, f, &atoms)?;
    let k = params.len();
    let outputs = (0..1usize << k)
        .map(|row| {
            // param i takes bit (k-1-i) of the row; the compiled form reads bit i.
            let mut assignment = 0u64;
            for i in 0..k {
                if row_arg(row, k, i) {
                    assignment |= 1 << i;
                }
            }
            compiled.eval(assignment)
        })
        .collect();
    TruthTable::new(k, outputs)
}

/// A formula flattened against a fixed atom order, evaluated under bitmask valuations.
#[derive(Debug, Clone)]
pub(crate) enum Compiled<'m> {
    Atom(u32),
    App(&'m TruthTable, Vec<Compiled<'m>>),
}

impl<'m> Compiled<'m> {
    pub(crate) fn new(
        m: &'m BooleanMatrix,
        f: &Formula,
        atoms: &[Formula],
    ) -> Result<Self, SemanticsError> {
        match f {
            Formula::Variable(_) | Formula::Skeletal(_) => atoms
                .iter()
                .position(|a| a == f)
                .map(|i| Compiled::Atom(i as u32))
                .ok_or_else(|| SemanticsError::Unassigned(f.to_string())),
            Formula::Application(c, args) => {
                let table = m
                    .table_of(c)
                    .ok_or_else(|| SemanticsError::UnknownConnective(c.name().to_string()))?;
                let args = args
                    .iter()
                    .map(|a| Compiled::new(m, a, atoms))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Compiled::App(table, args))
            }
        }
    }

    pub(crate) fn eval(&self, assignment: u64) -> bool {
        match self {
            Compiled::Atom(i) => (assignment >> i) & 1 == 1,
            Compiled::App(table, args) => {
                let row = args
                    .iter()
                    .fold(0usize, |acc, a| (acc << 1) | a.eval(assignment) as usize);
                table.output(row)
            }
        }
    }
}

/// Skeletonized premises and goal, compiled over a shared atom order.
struct Instance<'m> {
    premises: Vec<Compiled<'m>>,
    goal: Option<Compiled<'m>>,
    atoms: usize,
}

impl<'m> Instance<'m> {
    fn build<'a, I>(
        m: &'m BooleanMatrix,
        premises: I,
        goal: Option<&Formula>,
    ) -> Result<Self, SemanticsError>
    where
        I: IntoIterator<Item = &'a Formula>,
    {
        let sig = m.signature();
        let premises: Vec<Formula> = premises.into_iter().map(|p| skeleton(sig, p)).collect();
        let goal = goal.map(|g| skeleton(sig, g));
        let mut atoms = Vec::new();
        for f in premises.iter().chain(goal.iter()) {
            f.collect_atoms(&mut atoms);
        }
        if atoms.len() > MAX_VARIABLES {
            return Err(SemanticsError::VariableBudget {
                found: atoms.len(),
                limit: MAX_VARIABLES,
            });
        }
        let premises = premises
            .iter()
            .map(|p| Compiled::new(m, p, &atoms))
            .collect::<Result<Vec<_>, _>>()?;
        let goal = goal.map(|g| Compiled::new(m, &g, &atoms)).transpose()?;
        Ok(Instance {
            premises,
            goal,
            atoms: atoms.len(),
        })
    }

    /// Whether some valuation satisfies every premise and falsifies the goal (if any).
    fn has_countermodel(&self) -> bool {
        let check = |v: u64| {
            self.premises.iter().all(|p| p.eval(v)) && self.goal.as_ref().is_none_or(|g| !g.eval(v))
        };
        let total = 1u64 << self.atoms;
        if self.atoms >= PARALLEL_THRESHOLD {
            (0..total).into_par_iter().any(check)
        } else {
            (0..total).any(check)
        }
    }
}

/// Matrix consequence over mixed formulas: both sides are skeletonized with
/// respect to the matrix signature, then all valuations are enumerated.
pub fn entails<'a, I>(m: &BooleanMatrix, premises: I, goal: &Formula) -> Result<bool, SemanticsError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    Ok(!Instance::build(m, premises, Some(goal))?.has_countermodel())
}

pub fn is_satisfiable<'a, I>(m: &BooleanMatrix, set: I) -> Result<bool, SemanticsError>
where
    I: IntoIterator<Item = &'a Formula>,
{
    Ok(Instance::build(m, set, None)?.has_countermodel())
}

/// Names accepted by [`builtin_table`] besides thresholds `T<n>_<k>`.
pub const BUILTIN_NAMES: &[&str] = &[
    "top", "bot", "neg", "not", "and", "or", "imp", "eq", "nimp", "xor", "ite",
];

/// Table of the threshold function: 1 iff at least `k` of the `n` inputs are 1.
pub fn threshold(n: usize, k: usize) -> Result<TruthTable, SemanticsError> {
    if k > n {
        return Err(SemanticsError::InvalidThreshold { n, k });
    }
    Ok(TruthTable::from_fn(n, |args| {
        args.iter().filter(|&&b| b).count() >= k
    }))
}

/// Splits a threshold name `T<n>_<k>` into `(n, k)`.
pub fn parse_threshold_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('T')?;
    let (n, k) = rest.split_once('_')?;
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(n) || !digits(k) {
        return None;
    }
    Some((n.parse().ok()?, k.parse().ok()?))
}

pub fn threshold_name(n: usize, k: usize) -> String {
    format!("T{}_{}", n, k)
}

pub fn is_builtin_name(name: &str) -> bool {
    BUILTIN_NAMES.contains(&name) || parse_threshold_name(name).is_some()
}

pub fn builtin_table(name: &str) -> Result<TruthTable, SemanticsError> {
    let bits = match name {
        "top" => "1",
        "bot" => "0",
        "neg" | "not" => "10",
        "and" => "0001",
        "or" => "0111",
        "imp" => "1101",
        "eq" => "1001",
        "nimp" => "0010",
        "xor" => "0110",
        "ite" => "01010011",
        _ => {
            return match parse_threshold_name(name) {
                Some((n, k)) => threshold(n, k),
                None => Err(SemanticsError::UnknownBuiltin(name.to_string())),
            }
        }
    };
    bits.parse()
}

pub fn builtin_matrix<'a, I>(names: I) -> Result<BooleanMatrix, SemanticsError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut m = BooleanMatrix::new();
    for name in names {
        m.insert(name, builtin_table(name)?)?;
    }
    Ok(m)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DefinitionFileError {
    pub line: usize,
    pub message: String,
}

/// Parses `name arity bitstring` lines. Blank lines and `#` comments are skipped.
pub fn parse_connective_file(text: &str) -> Result<Vec<(Connective, TruthTable)>, DefinitionFileError> {
    let mut out: Vec<(Connective, TruthTable)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| DefinitionFileError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let [name, arity, bits] = fields[..] else {
            return Err(err(format!(
                "expected `name arity bitstring`, found {} field(s)",
                fields.len()
            )));
        };
        if !is_identifier(name) {
            return Err(err(format!("`{}` is not a valid identifier", name)));
        }
        let arity: usize = arity
            .parse()
            .map_err(|_| err(format!("`{}` is not a valid arity", arity)))?;
        let table = TruthTable::parse(arity, bits).map_err(|e| err(e.to_string()))?;
        if out.iter().any(|(c, _)| c.name() == name) {
            return Err(err(format!("connective `{}` defined twice", name)));
        }
        out.push((Connective::new(name, arity), table));
    }
    Ok(out)
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn m(names: &[&str]) -> BooleanMatrix {
        builtin_matrix(names.iter().copied()).unwrap()
    }

    fn f(m: &BooleanMatrix, s: &str) -> Formula {
        parse_formula(s, m.signature()).unwrap()
    }

    #[test]
    fn evaluation() {
        let and = m(&["and"]);
        let v: Valuation = [("p", true), ("q", false)].into_iter().collect();
        assert!(!eval_formula(&and, &v, &f(&and, "and(p, q)")).unwrap());
        assert!(eval_formula(&and, &v, &f(&and, "p")).unwrap());
        let imp = m(&["imp"]);
        assert!(!eval_formula(&imp, &v, &f(&imp, "imp(p, q)")).unwrap());
        assert!(matches!(
            eval_formula(&imp, &v, &f(&imp, "imp(p, r)")),
            Err(SemanticsError::Unassigned(_))
        ));
        let foreign = f(&m(&["or"]), "or(p, q)");
        assert!(matches!(
            eval_formula(&imp, &v, &foreign),
            Err(SemanticsError::UnknownConnective(_))
        ));
    }

    #[test]
    fn term_tables() {
        let eq = m(&["eq"]);
        assert_eq!(truth_table_of_term(&eq, &f(&eq, "eq(p,p)"), &["p"]).unwrap().bitstring(), "11");
        let neg = m(&["neg"]);
        assert_eq!(
            truth_table_of_term(&neg, &f(&neg, "neg(neg(p))"), &["p"]).unwrap().bitstring(),
            "01"
        );
        assert_eq!(truth_table_of_term(&neg, &f(&neg, "p"), &["p", "q"]).unwrap().bitstring(), "0011");
        assert!(matches!(
            truth_table_of_term(&neg, &f(&neg, "neg(r)"), &["p"]),
            Err(SemanticsError::FreeVariable(_))
        ));
    }

    #[test]
    fn entailment_examples() {
        let and = m(&["and"]);
        let or = m(&["or"]);
        let sig = and.union(&or).unwrap();
        let g = |s: &str| parse_formula(s, sig.signature()).unwrap();
        assert!(entails(&and, &[g("and(p,q)")], &g("q")).unwrap());
        assert!(!entails(&or, &[g("or(p, and(p,q))")], &g("p")).unwrap());
        assert!(entails(&and, &[g("and(p, or(p,q))")], &g("or(p,q)")).unwrap());
        assert!(!entails(&and, &[], &g("p")).unwrap());
    }

    #[test]
    fn satisfiability() {
        let bot = m(&["bot"]);
        assert!(is_satisfiable(&bot, &[]).unwrap());
        assert!(!is_satisfiable(&bot, &[f(&bot, "bot()")]).unwrap());
        let neg = m(&["neg"]);
        assert!(!is_satisfiable(&neg, &[f(&neg, "p"), f(&neg, "neg(p)")]).unwrap());
    }

    #[test]
    fn variable_budget() {
        let and = m(&["and"]);
        let premises: Vec<Formula> = (0..25).map(|i| Formula::var(format!("p{}", i))).collect();
        assert!(matches!(
            entails(&and, &premises, &Formula::var("q")),
            Err(SemanticsError::VariableBudget { found: 26, .. })
        ));
    }

    #[test]
    fn builtin_tables() {
        assert_eq!(builtin_table("nimp").unwrap().bitstring(), "0010");
        let t32 = builtin_table("T3_2").unwrap();
        assert!(t32.eval(&[true, true, false]));
        assert!(!t32.eval(&[false, true, false]));
        assert_eq!(builtin_table("T4_0").unwrap(), TruthTable::constant(4, true));
        assert_eq!(builtin_table("T0_0").unwrap().bitstring(), "1");
        assert!(matches!(builtin_table("T2_3"), Err(SemanticsError::InvalidThreshold { n: 2, k: 3 })));
        assert!(matches!(builtin_table("frob"), Err(SemanticsError::UnknownBuiltin(_))));
        assert_eq!(builtin_table("ite").unwrap().bitstring(), "01010011");
        assert!(builtin_matrix(["and", "and"]).is_err());
    }

    #[test]
    fn table_parsing() {
        assert_eq!("0111".parse::<TruthTable>().unwrap().arity(), 2);
        assert!("011".parse::<TruthTable>().is_err());
        assert!(TruthTable::parse(2, "01").is_err());
        assert!(TruthTable::parse(1, "0x").is_err());
        assert_eq!(TruthTable::projection(2, 0).bitstring(), "0011");
    }

    #[test]
    fn connective_files() {
        let defs = parse_connective_file("# demo\nand 2 0001\n\nnot 1 10  # negation\ntop 0 1\n").unwrap();
        assert_eq!(defs.len(), 3);
        assert_eq!(defs[1].0, Connective::new("not", 1));
        assert_eq!(defs[1].1.bitstring(), "10");
        let e = parse_connective_file("and 2 0001\nor 2 011\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(parse_connective_file("and 2").unwrap_err().line, 1);
        assert_eq!(parse_connective_file("a 1 10\na 1 01").unwrap_err().line, 2);
        assert_eq!(parse_connective_file("9a 1 10").unwrap_err().line, 1);
    }
}
