//! Resolution of connective names, calculi and formulas from command-line input.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fibring_core::hilbert::{
    builtin_calculus, merge_calculi, parse_derivation, parse_rule_file, DerivationTree, HilbertCalculus,
    HilbertError,
};
use fibring_core::semantics::{
    builtin_table, is_builtin_name, parse_connective_file, BooleanMatrix, SemanticsError, TruthTable,
    MAX_VARIABLES,
};
use fibring_core::syntax::{parse_formula, parse_formula_list, Connective, Formula, Signature};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}: {message}")]
    FileFormat { path: PathBuf, line: usize, message: String },
    #[error("{path}: {message}")]
    Derivation { path: PathBuf, message: String },
    #[error("cannot parse `{text}`: {message}")]
    Formula { text: String, message: String },
    #[error("{0}")]
    Core(String),
}

macro_rules! core_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.to_string())
            }
        }
    )*};
}

core_error!(
    SemanticsError,
    HilbertError,
    fibring_core::fibring::FibringError,
    fibring_core::collapse::CollapseError,
    fibring_core::syntax::SignatureError
);

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Connectives available to a session: builtins first, then file definitions.
#[derive(Debug, Default)]
pub struct Registry {
    defined: BTreeMap<String, TruthTable>,
}

impl Registry {
    pub fn load(files: &[PathBuf]) -> Result<Self, CliError> {
        let mut reg = Registry::default();
        for path in files {
            let text = read(path)?;
            let defs = parse_connective_file(&text).map_err(|e| CliError::FileFormat {
                path: path.clone(),
                line: e.line,
                message: e.message,
            })?;
            for (c, t) in defs {
                if is_builtin_name(c.name()) {
                    return Err(CliError::Usage(format!(
                        "{}: `{}` redefines a builtin connective",
                        path.display(),
                        c.name()
                    )));
                }
                if reg.defined.insert(c.name().to_string(), t).is_some() {
                    return Err(CliError::Usage(format!(
                        "{}: connective `{}` already defined by an earlier file",
                        path.display(),
                        c.name()
                    )));
                }
            }
        }
        Ok(reg)
    }

    pub fn table(&self, name: &str) -> Result<TruthTable, CliError> {
        if is_builtin_name(name) {
            return Ok(builtin_table(name)?);
        }
        self.defined
            .get(name)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("unknown connective `{}`", name)))
    }

    /// A matrix from a comma-separated list of connective names.
    pub fn matrix(&self, names: &str) -> Result<BooleanMatrix, CliError> {
        let mut m = BooleanMatrix::new();
        for name in split_names(names)? {
            m.insert(name, self.table(name)?)?;
        }
        Ok(m)
    }

    pub fn tables(&self, names: &str) -> Result<Vec<TruthTable>, CliError> {
        split_names(names)?.into_iter().map(|n| self.table(n)).collect()
    }

    /// Every non-threshold builtin plus every file-defined connective.
    pub fn default_signature(&self) -> Signature {
        let mut sig = Signature::new();
        for name in fibring_core::semantics::BUILTIN_NAMES {
            let t = builtin_table(name).expect("builtin");
            sig.insert(Connective::new(name, t.arity())).expect("distinct builtin names");
        }
        for (name, t) in &self.defined {
            sig.insert(Connective::new(name, t.arity())).expect("checked against builtins");
        }
        sig
    }

    pub fn signature(&self, names: Option<&str>) -> Result<Signature, CliError> {
        match names {
            None => Ok(self.default_signature()),
            Some(names) => Ok(self.matrix(names)?.signature().clone()),
        }
    }
}

pub fn split_names(names: &str) -> Result<Vec<&str>, CliError> {
    let out: Vec<&str> = names.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if out.is_empty() {
        return Err(CliError::Usage("empty connective list".into()));
    }
    Ok(out)
}

pub fn formula(text: &str, sig: &Signature) -> Result<Formula, CliError> {
    parse_formula(text, sig).map_err(|e| CliError::Formula {
        text: text.to_string(),
        message: e.to_string(),
    })
}

pub fn formula_list(text: &str, sig: &Signature) -> Result<Vec<Formula>, CliError> {
    let fs = parse_formula_list(text, sig).map_err(|e| CliError::Formula {
        text: text.to_string(),
        message: e.to_string(),
    })?;
    Ok(fs)
}

/// Checks the number of distinct variables against the enumeration budget.
pub fn check_budget<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Result<(), CliError> {
    let mut vars = std::collections::BTreeSet::new();
    for f in formulas {
        vars.extend(f.variables());
    }
    if vars.len() > MAX_VARIABLES {
        return Err(CliError::Usage(format!(
            "query uses {} variables; the limit is {}",
            vars.len(),
            MAX_VARIABLES
        )));
    }
    Ok(())
}

/// `builtin:and,or` names merged builtin calculi; anything else is a rule file
/// read over `sig`.
pub fn calculus(spec: &str, sig: &Signature) -> Result<HilbertCalculus, CliError> {
    if let Some(names) = spec.strip_prefix("builtin:") {
        let mut parts = split_names(names)?.into_iter();
        let first = builtin_calculus(parts.next().expect("nonempty"))?;
        return parts.try_fold(first, |acc, n| Ok(merge_calculi(&acc, &builtin_calculus(n)?)?));
    }
    let path = PathBuf::from(spec);
    parse_rule_file(&read(&path)?, sig).map_err(|e| CliError::FileFormat {
        path,
        line: e.line,
        message: e.message,
    })
}

pub fn derivation(path: &Path, sig: &Signature) -> Result<DerivationTree, CliError> {
    parse_derivation(&read(path)?, sig).map_err(|e| CliError::Derivation {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
