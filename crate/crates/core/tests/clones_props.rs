mod common;

use std::collections::BTreeSet;

use common::*;
use fibring_core::clones::{
    classify, completable_by_top, generates_top_clone, in_equiv_clone, is_functionally_complete, post_profile,
};
use fibring_core::enumerate::variable_pool;
use fibring_core::semantics::{builtin_table, entails, threshold, TruthTable};
use fibring_core::syntax::{Connective, Formula};
use proptest::prelude::*;

#[test]
fn classify_matches_semantic_definitions() {
    for arity in 0..=3 {
        let vars = variable_pool(arity + 1);
        let (args, fresh) = vars.split_at(arity);
        for t in all_tables(arity) {
            let m = single("c", t.clone());
            let phi = Formula::app(&Connective::new("c", arity), args.to_vec());
            let class = classify(&t);
            let ent = |g: &[Formula], c: &Formula| entails(&m, g, c).unwrap();
            assert_eq!(class.top_like, ent(&[], &phi), "{}", t);
            assert_eq!(class.bottom_like, ent(std::slice::from_ref(&phi), &fresh[0]), "{}", t);
            let projective: BTreeSet<usize> =
                (0..arity).filter(|&j| ent(std::slice::from_ref(&phi), &args[j])).map(|j| j + 1).collect();
            assert_eq!(class.projective_components, projective, "{}", t);
            let comps: Vec<Formula> = projective.iter().map(|&j| args[j - 1].clone()).collect();
            assert_eq!(class.projection_conjunction, ent(&comps, &phi), "{}", t);
        }
    }
}

#[test]
fn equiv_clone_matches_term_enumeration() {
    for arity in 1..=3 {
        let oracle = equiv_terms_oracle(arity, 4);
        let predicted: BTreeSet<TruthTable> = all_tables(arity).into_iter().filter(in_equiv_clone).collect();
        assert_eq!(predicted, oracle, "arity {}", arity);
    }
}

#[test]
fn post_lattice_base_connectives_are_very_significant() {
    let mut ts: Vec<TruthTable> = ["neg", "imp", "eq", "nimp", "xor", "ite"]
        .iter()
        .map(|n| builtin_table(n).unwrap())
        .collect();
    for n in 1..=5 {
        ts.push(threshold(n + 1, n).unwrap());
    }
    // T^{n+1}_2 at n = 1 would be conjunction.
    for n in 2..=5 {
        ts.push(threshold(n + 1, 2).unwrap());
    }
    ts.extend(mixed_ternary().into_iter().map(|(_, t)| t));
    ts.push(TruthTable::from_fn(3, |a| a[0] ^ a[1] ^ a[2]));
    for t in &ts {
        assert!(classify(t).very_significant, "{}", t);
    }
    for bits in ["0001", "1", "01"] {
        assert!(classify(&table(bits)).projection_conjunction, "{}", bits);
    }
    for bits in ["0", "0000"] {
        assert!(classify(&table(bits)).bottom_like, "{}", bits);
    }
}

#[test]
fn complete_and_incomplete_families() {
    let binary = all_tables(2);
    assert!(is_functionally_complete(&binary));
    for clone in fibring_core::clones::PostClone::ALL {
        let members: Vec<&TruthTable> = binary.iter().filter(|t| post_profile(t).has(clone)).collect();
        assert!(!members.is_empty());
        assert!(!is_functionally_complete(members), "{}", clone.name());
    }
}

/// Binary part of the clone generated by `gens`, computed by composition.
fn binary_closure(gens: &[TruthTable]) -> BTreeSet<TruthTable> {
    let mut have: BTreeSet<TruthTable> = [TruthTable::projection(2, 0), TruthTable::projection(2, 1)].into();
    loop {
        let current: Vec<TruthTable> = have.iter().cloned().collect();
        let mut grew = false;
        for g in gens {
            let k = g.arity();
            let mut idx = vec![0usize; k];
            loop {
                let composed = TruthTable::from_fn(2, |xy| {
                    let args: Vec<bool> = idx.iter().map(|&i| current[i].eval(xy)).collect();
                    g.eval(&args)
                });
                grew |= have.insert(composed);
                // next tuple
                let mut pos = 0;
                while pos < k {
                    idx[pos] += 1;
                    if idx[pos] < current.len() {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
        }
        if !grew {
            return have;
        }
    }
}

fn table_strategy() -> impl Strategy<Value = TruthTable> {
    (0usize..=3).prop_flat_map(|arity| {
        prop::collection::vec(any::<bool>(), 1 << arity).prop_map(move |bits| TruthTable::new(arity, bits).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn completeness_matches_composition_closure(ts in prop::collection::vec(table_strategy(), 1..4)) {
        let complete = binary_closure(&ts).len() == 16;
        prop_assert_eq!(is_functionally_complete(&ts), complete);
    }

    #[test]
    fn top_helpers_agree_with_definitions(ts in prop::collection::vec(table_strategy(), 1..3)) {
        prop_assert_eq!(generates_top_clone(&ts), ts.iter().all(|t| t.outputs().iter().all(|&b| b)));
        let mut with_top = ts.clone();
        with_top.push(table("1"));
        prop_assert_eq!(completable_by_top(&ts), binary_closure(&with_top).len() == 16);
    }

    #[test]
    fn profile_matches_definitions(t in table_strategy()) {
        let p = post_profile(&t);
        let k = t.arity();
        let rows = t.rows();
        let arg = |r: usize| -> Vec<bool> { (0..k).map(|i| r >> (k - 1 - i) & 1 == 1).collect() };
        let leq = |a: usize, b: usize| a & b == a;
        let monotone = (0..rows).all(|a| (0..rows).all(|b| !leq(a, b) || !t.output(a) || t.output(b)));
        prop_assert_eq!(p.monotone, monotone);
        let self_dual = (0..rows).all(|r| t.output(r) != t.output(r ^ (rows - 1)));
        prop_assert_eq!(p.self_dual, self_dual);
        // Affine iff f(x ^ y ^ z) = f(x) ^ f(y) ^ f(z) for all rows.
        let affine = (0..rows).all(|x| (0..rows).all(|y| (0..rows).all(|z| {
            t.output(x ^ y ^ z) == (t.output(x) ^ t.output(y) ^ t.output(z))
        })));
        prop_assert_eq!(p.affine, affine);
        prop_assert_eq!(p.preserves_zero, !t.eval(&arg(0)));
        prop_assert_eq!(p.preserves_one, t.eval(&arg(rows - 1)));
    }
}
