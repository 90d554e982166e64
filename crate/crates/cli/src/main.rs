//! `fibwb`: command-line workbench for fibred two-valued logics.
//!
//! Exit status is 0 for an affirmative verdict, 1 for a negative one and 2 for
//! usage or input errors.

mod session;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fibring_core::clones::{classify, is_functionally_complete, post_profile, shared_post_clones, PostClone};
use fibring_core::collapse::{collapse_pair, merge_is_classical, search_discrepancy, CollapseReason, SearchBounds};
use fibring_core::fibring::{decide_fibred_explained, FibredSystem};
use fibring_core::hilbert::{bounded_derive, check_derivation, DerivationTree, Justification};
use fibring_core::semantics::{entails, MAX_VARIABLES};
use fibring_core::syntax::Formula;
use serde_json::{json, Value};

use session::{CliError, Registry};

#[derive(Parser, Debug)]
#[command(name = "fibwb", version, about = "Decide fibred and classical consequence between truth-table fragments")]
struct Cli {
    /// File of extra connectives, one `name arity bitstring` per line.
    #[arg(long = "conn-file", global = true)]
    conn_files: Vec<PathBuf>,
    /// Output mode.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a connective and list its Post properties.
    Classify { conn: String },
    /// Decide functional completeness of a set of connectives.
    Complete {
        #[arg(required = true)]
        conns: Vec<String>,
    },
    /// Truth-table consequence in the matrix of the given connectives.
    Entail {
        #[arg(long)]
        matrix: String,
        /// Comma-separated premises; empty for none.
        gamma: String,
        goal: String,
    },
    /// Consequence in the fibring of two fragments.
    FibEntail {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        gamma: String,
        goal: String,
    },
    /// Predict whether fibring the two fragments gives classical logic.
    Collapse {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Search for a consecution separating the fibring from classical logic.
    Discrepancy {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        premises: usize,
        #[arg(long, default_value_t = 3)]
        vars: usize,
    },
    /// Check a derivation file against a calculus.
    CheckProof {
        /// Rule file, or `builtin:and,or` for builtin calculi.
        calculus: String,
        derivation: PathBuf,
        /// Connectives the rule and derivation files may use.
        #[arg(long)]
        sig: Option<String>,
        /// Hypotheses; defaults to the hypothesis leaves of the derivation.
        #[arg(long)]
        hyps: Option<String>,
        /// Goal; defaults to the root formula of the derivation.
        #[arg(long)]
        goal: Option<String>,
    },
    /// Bounded forward search for a derivation.
    Derive {
        calculus: String,
        gamma: String,
        goal: String,
        #[arg(long, default_value_t = 10)]
        bound: usize,
        #[arg(long)]
        sig: Option<String>,
    },
}

/// Result of one query, rendered either as text or as one JSON line.
struct Report {
    command: &'static str,
    query: Value,
    verdict: bool,
    text: Vec<String>,
    detail: Value,
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn set_text(fs: &BTreeSet<Formula>) -> String {
    let items: Vec<String> = fs.iter().map(|f| f.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn strings<'a>(fs: impl IntoIterator<Item = &'a Formula>) -> Vec<String> {
    fs.into_iter().map(|f| f.to_string()).collect()
}

fn reason_name(r: CollapseReason) -> &'static str {
    match r {
        CollapseReason::TopLike(_) => "TopLike",
        CollapseReason::NeitherVerySignificant => "NeitherVerySignificant",
        CollapseReason::EquivClonePlusBot => "EquivClonePlusBot",
        CollapseReason::None => "None",
    }
}

fn hypothesis_leaves(t: &DerivationTree, out: &mut BTreeSet<Formula>) {
    match &t.justification {
        Justification::Hypothesis => {
            out.insert(t.formula.clone());
        }
        Justification::Rule { children, .. } => children.iter().for_each(|c| hypothesis_leaves(c, out)),
    }
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let reg = Registry::load(&cli.conn_files)?;
    match &cli.command {
        Command::Classify { conn } => {
            let t = reg.table(conn)?;
            let c = classify(&t);
            let p = post_profile(&t);
            let comps: Vec<String> = c.projective_components.iter().map(|j| j.to_string()).collect();
            let post: Vec<(PostClone, bool)> = PostClone::ALL.iter().map(|&k| (k, p.has(k))).collect();
            let mut text = vec![
                format!("{}: arity {}, table {}", conn, t.arity(), t),
                format!("top-like: {}", yes(c.top_like)),
                format!("bottom-like: {}", yes(c.bottom_like)),
                format!("projective components: {{{}}}", comps.join(", ")),
                format!("projection-conjunction: {}", yes(c.projection_conjunction)),
                format!("significant: {}", yes(c.significant)),
                format!("very significant: {}", yes(c.very_significant)),
            ];
            text.extend(post.iter().map(|(k, v)| format!("{}: {}", k.name(), yes(*v))));
            Ok(Report {
                command: "classify",
                query: json!({ "connective": conn }),
                verdict: c.very_significant,
                text,
                detail: json!({
                    "table": t.bitstring(),
                    "top_like": c.top_like,
                    "bottom_like": c.bottom_like,
                    "projective_components": c.projective_components,
                    "projection_conjunction": c.projection_conjunction,
                    "significant": c.significant,
                    "very_significant": c.very_significant,
                    "post": post.iter().map(|(k, v)| (k.name().to_string(), Value::Bool(*v))).collect::<serde_json::Map<_, _>>(),
                }),
            })
        }
        Command::Complete { conns } => {
            let mut tables = Vec::new();
            for c in conns {
                tables.extend(reg.tables(c)?);
            }
            let complete = is_functionally_complete(&tables);
            let shared: Vec<&str> = shared_post_clones(&tables).into_iter().map(PostClone::name).collect();
            let line = if complete {
                "complete: yes (every Post property is violated by some member)".to_string()
            } else {
                format!("complete: no (all members are {})", shared.join(", "))
            };
            Ok(Report {
                command: "complete",
                query: json!({ "connectives": conns }),
                verdict: complete,
                text: vec![line],
                detail: json!({ "shared_properties": shared }),
            })
        }
        Command::Entail { matrix, gamma, goal } => {
            let m = reg.matrix(matrix)?;
            let g = session::formula_list(gamma, m.signature())?;
            let c = session::formula(goal, m.signature())?;
            session::check_budget(g.iter().chain([&c]))?;
            let holds = entails(&m, &g, &c)?;
            Ok(Report {
                command: "entail",
                query: json!({ "matrix": matrix, "gamma": strings(&g), "goal": c.to_string() }),
                verdict: holds,
                text: vec![format!("{}: {}", if holds { "valid" } else { "invalid" }, consecution(&g, &c))],
                detail: Value::Null,
            })
        }
        Command::FibEntail { a, b, gamma, goal } => {
            let sys = FibredSystem::new(reg.matrix(a)?, reg.matrix(b)?)?;
            let g = session::formula_list(gamma, sys.signature())?;
            let c = session::formula(goal, sys.signature())?;
            session::check_budget(g.iter().chain([&c]))?;
            let v = decide_fibred_explained(&sys, &g, &c)?;
            Ok(Report {
                command: "fib-entail",
                query: json!({ "a": a, "b": b, "gamma": strings(&g), "goal": c.to_string() }),
                verdict: v.holds,
                text: vec![
                    format!("{}: {}", if v.holds { "holds" } else { "fails" }, consecution(&g, &c)),
                    format!(
                        "saturation ({} enlarging steps): {}",
                        v.saturation.iterations,
                        set_text(&v.saturation.closure)
                    ),
                ],
                detail: json!({
                    "saturation": strings(&v.saturation.closure),
                    "iterations": v.saturation.iterations,
                }),
            })
        }
        Command::Collapse { a, b } => collapse(&reg, a, b),
        Command::Discrepancy {
            a,
            b,
            depth,
            premises,
            vars,
        } => {
            if *depth == 0 || *vars == 0 {
                return Err(CliError::Usage("--depth and --vars must be positive".into()));
            }
            if *vars > MAX_VARIABLES {
                return Err(CliError::Usage(format!("--vars is limited to {}", MAX_VARIABLES)));
            }
            let sys = FibredSystem::new(reg.matrix(a)?, reg.matrix(b)?)?;
            let w = search_discrepancy(&sys, SearchBounds::new(*depth, *premises, *vars))?;
            let query = json!({ "a": a, "b": b, "depth": depth, "premises": premises, "vars": vars });
            Ok(match w {
                Some(w) => Report {
                    command: "discrepancy",
                    query,
                    verdict: true,
                    text: vec![format!("witness: {}", w)],
                    detail: json!({
                        "premises": strings(&w.premises),
                        "goal": w.goal.to_string(),
                        "classical": w.classical_verdict,
                        "fibred": w.fibred_verdict,
                    }),
                },
                None => Report {
                    command: "discrepancy",
                    query,
                    verdict: false,
                    text: vec!["none within bounds".into()],
                    detail: Value::Null,
                },
            })
        }
        Command::CheckProof {
            calculus,
            derivation,
            sig,
            hyps,
            goal,
        } => {
            let sig = reg.signature(sig.as_deref())?;
            let h = session::calculus(calculus, &sig)?;
            let tree = session::derivation(derivation, h.signature())?;
            let hyps: BTreeSet<Formula> = match hyps {
                Some(text) => session::formula_list(text, h.signature())?.into_iter().collect(),
                None => {
                    let mut out = BTreeSet::new();
                    hypothesis_leaves(&tree, &mut out);
                    out
                }
            };
            let goal = match goal {
                Some(text) => session::formula(text, h.signature())?,
                None => tree.formula.clone(),
            };
            let ok = check_derivation(&h, &hyps, &goal, &tree)?;
            Ok(Report {
                command: "check-proof",
                query: json!({
                    "calculus": calculus,
                    "derivation": derivation.display().to_string(),
                    "hypotheses": strings(&hyps),
                    "goal": goal.to_string(),
                }),
                verdict: ok,
                text: vec![format!(
                    "{}: {} {} |- {} in {} steps",
                    if ok { "valid derivation" } else { "invalid derivation" },
                    derivation.display(),
                    set_text(&hyps),
                    goal,
                    tree.steps()
                )],
                detail: json!({ "steps": tree.steps() }),
            })
        }
        Command::Derive {
            calculus,
            gamma,
            goal,
            bound,
            sig,
        } => {
            let sig = reg.signature(sig.as_deref())?;
            let h = session::calculus(calculus, &sig)?;
            let hyps: BTreeSet<Formula> = session::formula_list(gamma, h.signature())?.into_iter().collect();
            let c = session::formula(goal, h.signature())?;
            let found = bounded_derive(&h, &hyps, &c, *bound);
            let query = json!({
                "calculus": calculus,
                "gamma": strings(&hyps),
                "goal": c.to_string(),
                "bound": bound,
            });
            Ok(match found {
                Some(tree) => Report {
                    command: "derive",
                    query,
                    verdict: true,
                    text: vec![format!("derivation in {} steps:", tree.steps()), tree.render()],
                    detail: json!({ "steps": tree.steps(), "derivation": tree.render() }),
                },
                None => Report {
                    command: "derive",
                    query,
                    verdict: false,
                    text: vec![format!("no derivation within size bound {}", bound)],
                    detail: Value::Null,
                },
            })
        }
    }
}

fn consecution(g: &[Formula], c: &Formula) -> String {
    format!("{{{}}} |- {}", strings(g).join(", "), c)
}

/// Pairs of single connectives are judged by the pairwise criterion; larger
/// sets by the merge criterion, whose preconditions then become input errors.
fn collapse(reg: &Registry, a: &str, b: &str) -> Result<Report, CliError> {
    let ta = reg.tables(a)?;
    let tb = reg.tables(b)?;
    let query = json!({ "a": a, "b": b });
    let merged = merge_is_classical(&ta, &tb);
    let merged_text = match &merged {
        Ok(true) => "merged logic is full classical".to_string(),
        Ok(false) => "merged logic is not full classical".to_string(),
        Err(e) => format!("merge criterion not applicable: {}", e),
    };
    let merged_json = match &merged {
        Ok(v) => json!(v),
        Err(e) => json!(e.to_string()),
    };
    if let ([t1], [t2]) = (&ta[..], &tb[..]) {
        let v = collapse_pair(t1, t2)?;
        let head = if v.collapses {
            format!("collapses: {}", reason_name(v.reason))
        } else {
            "does not collapse".to_string()
        };
        return Ok(Report {
            command: "collapse",
            query,
            verdict: v.collapses,
            text: vec![format!("{}; {}", head, merged_text)],
            detail: json!({ "reason": reason_name(v.reason), "merged_classical": merged_json }),
        });
    }
    let classical = merged?;
    Ok(Report {
        command: "collapse",
        query,
        verdict: classical,
        text: vec![merged_text],
        detail: json!({ "merged_classical": classical }),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Text => {
                    for line in &report.text {
                        println!("{}", line);
                    }
                }
                Format::Json => {
                    let record = json!({
                        "command": report.command,
                        "query": report.query,
                        "verdict": report.verdict,
                        "detail": report.detail,
                        "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0,
                    });
                    println!("{}", record);
                }
            }
            if report.verdict {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.format == Format::Json {
                println!("{}", json!({ "error": e.to_string() }));
            }
            eprintln!("fibwb: {}", e);
            ExitCode::from(2)
        }
    }
}
