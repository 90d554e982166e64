//! Formulas over a signature of named connectives, the textual grammar, and the
//! monolith/skeleton transforms used to look at a mixed formula from the point of
//! view of one component signature.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Connective {
    name: Arc<str>,
    arity: usize,
}

impl Connective {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        Connective {
            name: Arc::from(name.as_ref()),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("connective `{0}` declared twice")]
    Duplicate(String),
    #[error("signatures overlap on `{0}`")]
    Overlap(String),
}

/// A finite set of connectives with pairwise distinct names.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    connectives: BTreeMap<Arc<str>, Connective>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_connectives<I>(connectives: I) -> Result<Self, SignatureError>
    where
        I: IntoIterator<Item = Connective>,
    {
        let mut sig = Signature::new();
        for c in connectives {
            sig.insert(c)?;
        }
        Ok(sig)
    }

    pub fn insert(&mut self, c: Connective) -> Result<(), SignatureError> {
        if self.connectives.contains_key(&c.name) {
            return Err(SignatureError::Duplicate(c.name.to_string()));
        }
        self.connectives.insert(c.name.clone(), c);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Connective> {
        self.connectives.get(name)
    }

    /// Membership is by name and arity.
    pub fn contains(&self, c: &Connective) -> bool {
        self.connectives.get(c.name()) == Some(c)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Connective> {
        self.connectives.values()
    }

    pub fn len(&self) -> usize {
        self.connectives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.connectives.is_empty()
    }

    pub fn is_disjoint(&self, other: &Signature) -> bool {
        self.connectives
            .keys()
            .all(|k| !other.connectives.contains_key(k))
    }

    /// Union of two signatures that must not share a connective name.
    pub fn disjoint_union(&self, other: &Signature) -> Result<Signature, SignatureError> {
        let mut out = self.clone();
        for c in other.iter() {
            if out.connectives.contains_key(c.name()) {
                return Err(SignatureError::Overlap(c.name().to_string()));
            }
            out.connectives.insert(c.name.clone(), c.clone());
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Variable(Arc<str>),
    /// Stands for the whole foreign-headed subformula it wraps.
    Skeletal(Box<Formula>),
    Application(Connective, Vec<Formula>),
}

impl Formula {
    pub fn var(name: impl AsRef<str>) -> Self {
        Formula::Variable(Arc::from(name.as_ref()))
    }

    /// Panics if `args.len()` differs from the connective's arity.
    pub fn app(connective: &Connective, args: Vec<Formula>) -> Self {
        assert_eq!(
            connective.arity(),
            args.len(),
            "arity mismatch applying {}",
            connective
        );
        Formula::Application(connective.clone(), args)
    }

    pub fn is_atomic(&self) -> bool {
        !matches!(self, Formula::Application(..))
    }

    pub fn head(&self) -> Option<&Connective> {
        match self {
            Formula::Application(c, _) => Some(c),
            _ => None,
        }
    }

    /// Number of nodes; atoms and nullary applications count one.
    pub fn size(&self) -> usize {
        match self {
            Formula::Variable(_) | Formula::Skeletal(_) => 1,
            Formula::Application(_, args) => 1 + args.iter().map(Formula::size).sum::<usize>(),
        }
    }

    /// Height counted in levels: atoms and nullary applications have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Variable(_) | Formula::Skeletal(_) => 1,
            Formula::Application(_, args) => {
                1 + args.iter().map(Formula::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.insert(self.clone()) {
            if let Formula::Application(_, args) = self {
                for a in args {
                    a.collect_subformulas(out);
                }
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Formula::Variable(v) => {
                out.insert(v.clone());
            }
            Formula::Skeletal(_) => {}
            Formula::Application(_, args) => args.iter().for_each(|a| a.collect_variables(out)),
        }
    }

    /// Ordinary and skeletal variables, in first-occurrence order.
    pub fn atoms(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::Application(_, args) => args.iter().for_each(|a| a.collect_atoms(out)),
            atom => {
                if !out.contains(atom) {
                    out.push(atom.clone());
                }
            }
        }
    }

    pub fn connectives(&self) -> BTreeSet<Connective> {
        let mut out = BTreeSet::new();
        self.collect_connectives(&mut out);
        out
    }

    fn collect_connectives(&self, out: &mut BTreeSet<Connective>) {
        if let Formula::Application(c, args) = self {
            out.insert(c.clone());
            args.iter().for_each(|a| a.collect_connectives(out));
        }
    }

    /// Whether every connective occurring in the formula belongs to `sig`.
    pub fn is_over(&self, sig: &Signature) -> bool {
        match self {
            Formula::Variable(_) | Formula::Skeletal(_) => true,
            Formula::Application(c, args) => sig.contains(c) && args.iter().all(|a| a.is_over(sig)),
        }
    }

    /// Replaces each skeletal variable by the formula it stands for.
    pub fn unskeleton(&self) -> Formula {
        match self {
            Formula::Variable(_) => self.clone(),
            Formula::Skeletal(body) => body.unskeleton(),
            Formula::Application(c, args) => {
                Formula::Application(c.clone(), args.iter().map(Formula::unskeleton).collect())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Variable(v) => f.write_str(v),
            Formula::Skeletal(body) => write!(f, "x[{}]", body),
            Formula::Application(c, args) => {
                write!(f, "{}(", c.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                f.write_str(")")
            }
        }
    }
}

pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub head: Option<Connective>,
    pub sub: BTreeSet<Formula>,
    pub var: BTreeSet<Arc<str>>,
}

pub fn analyze(f: &Formula) -> Analysis {
    Analysis {
        head: f.head().cloned(),
        sub: f.subformulas(),
        var: f.variables(),
    }
}

/// Sub-formulas of a set of formulas.
pub fn subformulas_of<'a, I>(formulas: I) -> BTreeSet<Formula>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut out = BTreeSet::new();
    for f in formulas {
        f.collect_subformulas(&mut out);
    }
    out
}

/// Maps variable names to formulas; unmapped variables are left alone.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    mapping: BTreeMap<Arc<str>, Formula>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn insert(&mut self, var: impl AsRef<str>, f: Formula) -> Option<Formula> {
        self.mapping.insert(Arc::from(var.as_ref()), f)
    }

    pub fn get(&self, var: &str) -> Option<&Formula> {
        self.mapping.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Formula)> {
        self.mapping.iter().map(|(k, v)| (&**k, v))
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, f: &Formula) -> Formula {
        match f {
            Formula::Variable(v) => self.mapping.get(v).cloned().unwrap_or_else(|| f.clone()),
            Formula::Skeletal(_) => f.clone(),
            Formula::Application(c, args) => {
                Formula::Application(c.clone(), args.iter().map(|a| self.apply(a)).collect())
            }
        }
    }
}

impl<K: AsRef<str>> FromIterator<(K, Formula)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (K, Formula)>>(iter: T) -> Self {
        let mut s = Substitution::new();
        for (k, v) in iter {
            s.insert(k, v);
        }
        s
    }
}

pub fn apply_substitution(s: &Substitution, f: &Formula) -> Formula {
    s.apply(f)
}

/// The largest subformulas of `f` whose head lies outside `sig`.
pub fn monoliths(sig: &Signature, f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    collect_monoliths(sig, f, &mut out);
    out
}

pub fn monoliths_of_set<'a, I>(sig: &Signature, formulas: I) -> BTreeSet<Formula>
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut out = BTreeSet::new();
    for f in formulas {
        collect_monoliths(sig, f, &mut out);
    }
    out
}

fn collect_monoliths(sig: &Signature, f: &Formula, out: &mut BTreeSet<Formula>) {
    match f {
        Formula::Variable(_) | Formula::Skeletal(_) => {}
        Formula::Application(c, args) if sig.contains(c) => {
            args.iter().for_each(|a| collect_monoliths(sig, a, out))
        }
        _ => {
            out.insert(f.clone());
        }
    }
}

/// Replaces every `sig`-monolith by a skeletal variable keyed on that subformula.
pub fn skeleton(sig: &Signature, f: &Formula) -> Formula {
    match f {
        Formula::Variable(_) | Formula::Skeletal(_) => f.clone(),
        Formula::Application(c, args) if sig.contains(c) => {
            Formula::Application(c.clone(), args.iter().map(|a| skeleton(sig, a)).collect())
        }
        _ => Formula::Skeletal(Box::new(f.clone())),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown connective `{name}` at {pos}")]
    UnknownConnective { pos: usize, name: String },
    #[error("connective `{name}` expects {expected} argument(s), found {found} at {pos}")]
    ArityMismatch {
        pos: usize,
        name: String,
        expected: usize,
        found: usize,
    },
}

/// Cursor over formula text. Exposed so that other file formats can embed formulas.
pub struct FormulaParser<'a> {
    src: &'a str,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> FormulaParser<'a> {
    pub fn new(src: &'a str, sig: &'a Signature) -> Self {
        FormulaParser { src, pos: 0, sig }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn set_position(&mut self, pos: usize) {
        self.pos = pos;
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    pub fn expect(&mut self, ch: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            Ok(())
        } else {
            Err(self.syntax(format!(
                "expected `{}`, found {}",
                ch,
                self.peek().map_or("end of input".to_string(), |c| format!("`{}`", c))
            )))
        }
    }

    pub fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    pub fn ident(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let rest = self.rest();
        let mut end = 0;
        for (i, ch) in rest.char_indices() {
            let ok = if i == 0 {
                ch.is_ascii_alphabetic() || ch == '_'
            } else {
                ch.is_ascii_alphanumeric() || ch == '_'
            };
            if !ok {
                break;
            }
            end = i + ch.len_utf8();
        }
        if end == 0 {
            return Err(self.syntax("expected identifier"));
        }
        self.pos += end;
        Ok(&rest[..end])
    }

    pub fn formula(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.ident()?;
        let Some(conn) = self.sig.get(name) else {
            // Only an immediately following parenthesis marks an attempted
            // application, so that formulas can be embedded in larger syntax.
            if self.peek() == Some('(') {
                return Err(ParseError::UnknownConnective {
                    pos: start,
                    name: name.to_string(),
                });
            }
            return Ok(Formula::var(name));
        };
        self.expect('(')?;
        let mut args = Vec::new();
        self.skip_ws();
        if self.peek() == Some(')') {
            self.pos += 1;
        } else {
            loop {
                args.push(self.formula()?);
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.syntax("expected `,` or `)`")),
                }
            }
        }
        if args.len() != conn.arity() {
            return Err(ParseError::ArityMismatch {
                pos: start,
                name: name.to_string(),
                expected: conn.arity(),
                found: args.len(),
            });
        }
        Ok(Formula::Application(conn.clone(), args))
    }
}

pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let mut p = FormulaParser::new(text, sig);
    let f = p.formula()?;
    if !p.at_end() {
        return Err(p.syntax("trailing input"));
    }
    Ok(f)
}

/// Parses a comma-separated list of formulas; the empty string is the empty list.
pub fn parse_formula_list(text: &str, sig: &Signature) -> Result<Vec<Formula>, ParseError> {
    let mut p = FormulaParser::new(text, sig);
    let mut out = Vec::new();
    if p.at_end() {
        return Ok(out);
    }
    loop {
        out.push(p.formula()?);
        if p.at_end() {
            return Ok(out);
        }
        p.expect(',')?;
    }
}
