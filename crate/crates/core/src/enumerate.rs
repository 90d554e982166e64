//! Exhaustive and random generation of formulas and consecutions.

use std::collections::BTreeSet;

use rand::Rng;

use crate::syntax::{Connective, Formula, Signature};

/// `n` distinct variable names: p, q, r, s, t, then p5, p6, ...
pub fn variable_pool(n: usize) -> Vec<Formula> {
    const NAMES: [&str; 5] = ["p", "q", "r", "s", "t"];
    (0..n)
        .map(|i| match NAMES.get(i) {
            Some(name) => Formula::var(name),
            None => Formula::var(format!("p{}", i)),
        })
        .collect()
}

/// Every formula over `sig` and `vars` of depth at most `max_depth`, where
/// atoms and nullary applications have depth 1.
pub fn formulas_up_to_depth(sig: &Signature, vars: &[Formula], max_depth: usize) -> Vec<Formula> {
    if max_depth == 0 {
        return Vec::new();
    }
    let mut all: BTreeSet<Formula> = vars.iter().cloned().collect();
    for c in sig.iter().filter(|c| c.arity() == 0) {
        all.insert(Formula::app(c, Vec::new()));
    }
    for _ in 1..max_depth {
        let prev: Vec<Formula> = all.iter().cloned().collect();
        for c in sig.iter().filter(|c| c.arity() > 0) {
            for_each_tuple(&prev, c.arity(), &mut |args| {
                all.insert(Formula::app(c, args.to_vec()));
            });
        }
    }
    all.into_iter().collect()
}

fn for_each_tuple(pool: &[Formula], k: usize, f: &mut dyn FnMut(&[Formula])) {
    fn go(pool: &[Formula], k: usize, acc: &mut Vec<Formula>, f: &mut dyn FnMut(&[Formula])) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for x in pool {
            acc.push(x.clone());
            go(pool, k, acc, f);
            acc.pop();
        }
    }
    go(pool, k, &mut Vec::with_capacity(k), f);
}

/// A random formula of depth at most `max_depth`; inner nodes are chosen with
/// probability 2/3 while depth remains.
pub fn random_formula<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Signature,
    vars: &[Formula],
    max_depth: usize,
) -> Formula {
    let connectives: Vec<&Connective> = sig.iter().collect();
    let nullary: Vec<&Connective> = connectives.iter().copied().filter(|c| c.arity() == 0).collect();
    let leaf = |rng: &mut R| {
        let n = vars.len() + nullary.len();
        let i = rng.gen_range(0..n);
        match vars.get(i) {
            Some(v) => v.clone(),
            None => Formula::app(nullary[i - vars.len()], Vec::new()),
        }
    };
    if max_depth <= 1 || connectives.is_empty() || rng.gen_ratio(1, 3) {
        return leaf(rng);
    }
    let c = connectives[rng.gen_range(0..connectives.len())];
    let args = (0..c.arity())
        .map(|_| random_formula(rng, sig, vars, max_depth - 1))
        .collect();
    Formula::app(c, args)
}

/// A candidate consecution: finite premise set and goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Consecution {
    pub premises: Vec<Formula>,
    pub goal: Formula,
}

impl Consecution {
    pub fn size(&self) -> usize {
        self.premises.iter().map(Formula::size).sum::<usize>() + self.goal.size()
    }

    /// Canonical text: premises sorted by their rendering.
    pub fn render(&self) -> String {
        let mut ps: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        ps.sort();
        format!("{{{}}} |- {}", ps.join(", "), self.goal)
    }
}

/// All consecutions with premises and goal drawn from a fixed formula pool,
/// grouped into classes of equal total size.
pub struct ConsecutionSpace {
    /// Sorted by size, then rendering.
    formulas: Vec<Formula>,
    sizes: Vec<usize>,
    max_premises: usize,
}

impl ConsecutionSpace {
    pub fn new(formulas: Vec<Formula>, max_premises: usize) -> Self {
        let mut keyed: Vec<(usize, String, Formula)> = formulas
            .into_iter()
            .map(|f| (f.size(), f.to_string(), f))
            .collect();
        keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        keyed.dedup_by(|a, b| a.2 == b.2);
        let sizes = keyed.iter().map(|k| k.0).collect();
        let formulas = keyed.into_iter().map(|k| k.2).collect();
        ConsecutionSpace {
            formulas,
            sizes,
            max_premises,
        }
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn max_total_size(&self) -> usize {
        self.sizes.last().map_or(0, |s| s * (self.max_premises + 1))
    }

    /// Consecutions of the given total size, ordered by canonical rendering.
    pub fn class(&self, total: usize) -> Vec<Consecution> {
        let mut out = Vec::new();
        for (gi, goal) in self.formulas.iter().enumerate() {
            let gs = self.sizes[gi];
            if gs > total {
                break;
            }
            let rest = total - gs;
            for k in 0..=self.max_premises {
                self.premise_sets(0, k, rest, &mut Vec::new(), &mut |ps| {
                    out.push(Consecution {
                        premises: ps.iter().map(|&i| self.formulas[i].clone()).collect(),
                        goal: goal.clone(),
                    })
                });
            }
        }
        let mut keyed: Vec<(String, Consecution)> = out.into_iter().map(|c| (c.render(), c)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.into_iter().map(|(_, c)| c).collect()
    }

    fn premise_sets(
        &self,
        start: usize,
        k: usize,
        remaining: usize,
        acc: &mut Vec<usize>,
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if k == 0 {
            if remaining == 0 {
                emit(acc);
            }
            return;
        }
        for i in start..self.formulas.len() {
            // Sizes are non-decreasing from here on.
            if self.sizes[i] * k > remaining {
                break;
            }
            acc.push(i);
            self.premise_sets(i + 1, k - 1, remaining - self.sizes[i], acc, emit);
            acc.pop();
        }
    }

    pub fn count(&self) -> usize {
        (1..=self.max_total_size()).map(|s| self.class(s).len()).sum()
    }
}
