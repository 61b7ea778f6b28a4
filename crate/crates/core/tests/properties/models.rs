use std::collections::BTreeSet;

use crate::common::*;
use eiskit_core::formula::Quantifier;
use eiskit_core::formula::partial_ground;
use eiskit_core::model::{cell_index, least_predicates, verify_model, Table};
use eiskit_core::system::theory_of;
use eiskit_core::{classify, qe_transform, FiniteStructure, Formula, FormulaClass};
use indexmap::IndexMap;
use proptest::prelude::*;

/// Structures over `a`, `b`, `f` of size 1 or 2, with no predicates.
fn algebra() -> BoxedStrategy<FiniteStructure> {
    (1usize..3)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(0..n, 2 + n)))
        .prop_map(|(n, c)| {
            let mut s = FiniteStructure::new(n).with_function("a", vec![c[0]]).with_function("b", vec![c[1]]);
            s.functions.insert("f".into(), Table { arity: 1, cells: c[2..].to_vec() });
            s
        })
        .boxed()
}

/// Every way to fill the tables of `predicates` over `a`.
fn all_interpretations(a: &FiniteStructure, predicates: &IndexMap<String, usize>) -> Vec<FiniteStructure> {
    let sizes: Vec<usize> = predicates.values().map(|&k| a.size.pow(k as u32)).collect();
    let total: usize = sizes.iter().sum();
    (0u64..1 << total)
        .map(|bits| {
            let mut s = a.clone();
            let mut i = 0;
            for ((p, &k), &n) in predicates.iter().zip(&sizes) {
                let cells = (i..i + n).map(|j| bits >> j & 1 == 1).collect();
                s.predicates.insert(p.clone(), Table { arity: k, cells });
                i += n;
            }
            s
        })
        .collect()
}

fn contained(small: &FiniteStructure, large: &FiniteStructure) -> bool {
    small.predicates.iter().all(|(p, t)| {
        let u = &large.predicates[p];
        t.cells.iter().zip(&u.cells).all(|(&x, &y)| !x || y)
    })
}

/// A structure with one more element. Old function values, grounded
/// constants and predicate cells are kept; the new cells come from `fresh`.
fn extend(s: &FiniteStructure, fresh: &[usize]) -> FiniteStructure {
    let n = s.size + 1;
    let mut next = fresh.iter().cycle();
    let mut t = FiniteStructure::new(n);
    t.grounded = s.grounded.clone();
    for (name, table) in &s.functions {
        let cells = tuples(n, table.arity)
            .map(|args| {
                if args.iter().all(|&x| x < s.size) {
                    table.cells[cell_index(s.size, &args)]
                } else {
                    next.next().unwrap() % n
                }
            })
            .collect();
        t.functions.insert(name.clone(), Table { arity: table.arity, cells });
    }
    for (name, table) in &s.predicates {
        let cells = tuples(n, table.arity)
            .map(|args| {
                if args.iter().all(|&x| x < s.size) {
                    table.cells[cell_index(s.size, &args)]
                } else {
                    next.next().unwrap() % 2 == 1
                }
            })
            .collect();
        t.predicates.insert(name.clone(), Table { arity: table.arity, cells });
    }
    t
}

fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n.pow(k as u32)).map(move |mut i| {
        let mut v = vec![0; k];
        for slot in v.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        v
    })
}

/// `s` with every grounded constant of `f` set from `values`.
fn assign(s: &FiniteStructure, f: &Formula, values: &[usize]) -> FiniteStructure {
    let mut t = s.clone();
    for (v, &d) in f.grounded_constants().iter().zip(values.iter().cycle()) {
        t.grounded.insert(v.clone(), d % s.size);
    }
    t
}

fn holds(s: &FiniteStructure, f: &Formula) -> bool {
    s.satisfies(f).unwrap_or_else(|e| panic!("{f}: {e}"))
}

proptest! {
    #![proptest_config(config(256))]

    fn least_predicates_is_the_least_model(e in small_eis(), a in algebra()) {
        let theory = theory_of(&e);
        let sentences: Vec<Formula> = theory.iter().map(|h| h.to_formula()).collect();
        let least = least_predicates(&a, &theory, &e.signature.predicates).unwrap();
        let mut m = a.clone();
        m.predicates = least;
        prop_assert!(verify_model(&m, &sentences));
        let mut models = 0;
        for candidate in all_interpretations(&a, &e.signature.predicates) {
            if verify_model(&candidate, &sentences) {
                models += 1;
                prop_assert!(contained(&m, &candidate));
            }
        }
        // the full interpretation is always a model
        prop_assert!(models >= 1);
    }

    fn positive_sentences_are_monotone(
        f in formula(false, 3),
        s in structure(),
        extra in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let f = close(f);
        prop_assert_ne!(classify(&f).class, FormulaClass::General);
        if holds(&s, &f) {
            prop_assert!(holds(&grow(&s, &extra), &f));
        }
    }

    fn classification_preserves_meaning(
        f in formula(true, 3),
        s in structure(),
        extra in proptest::collection::vec(any::<bool>(), 12),
        fresh in proptest::collection::vec(0usize..8, 16),
    ) {
        let f = close(f);
        let c = classify(&f);
        let n = c.normalized();
        prop_assert!(n.is_sentence());
        prop_assert_eq!(holds(&s, &n), holds(&s, &f), "{} vs {}", f, n);
        if c.class != FormulaClass::General && holds(&s, &f) {
            prop_assert!(holds(&grow(&s, &extra), &f));
        }
        if c.class == FormulaClass::Ecbca && holds(&s, &f) {
            // existential positive sentences survive superstructures
            prop_assert!(holds(&extend(&s, &fresh), &f));
        }
    }

    fn qe_targets_follow_from_sources(
        f in formula(false, 3),
        s in structure(),
        values in proptest::collection::vec(0usize..3, 4),
    ) {
        let f = close(f);
        let q = qe_transform(&f).unwrap();
        prop_assert_eq!(holds(&s, &q.source), holds(&s, &f));
        prop_assert!(q.target.free_vars().is_empty());
        let u: BTreeSet<String> = q.universal.iter().cloned().collect();
        prop_assert!(q.target.grounded_constants().is_subset(&u));
        if holds(&s, &q.source) {
            prop_assert!(holds(&assign(&s, &q.target, &values), &q.target));
        }
        // with the universals in front, the target under every value of the
        // grounded constants says what the source says
        let prefix = classify(&f).prefix;
        let first_exists = prefix.iter().position(|(q, _)| *q == Quantifier::Exists).unwrap_or(prefix.len());
        if prefix[first_exists..].iter().all(|(q, _)| *q == Quantifier::Exists) {
            let k = u.len() as u32;
            let everywhere = (0..s.size.pow(k)).all(|i| {
                let vals: Vec<usize> = (0..k).map(|j| i / s.size.pow(j) % s.size).collect();
                let vals = if vals.is_empty() { vec![0] } else { vals };
                holds(&assign(&s, &q.target, &vals), &q.target)
            });
            prop_assert_eq!(everywhere, holds(&s, &f), "{} -> {}", f, q.target);
        }
    }

    fn partial_grounding_is_undone_by_closure(g in formula(true, 3), s in structure()) {
        let body = Formula::forall("Y", g);
        let f = Formula::forall("X", body.clone());
        let all: BTreeSet<String> = ["X".to_string(), "Y".to_string()].into();
        let pg = partial_ground(&f, &all).unwrap();
        prop_assert_eq!(Formula::forall("X", Formula::forall("Y", pg.ground_up())), f.clone());
        let outer = partial_ground(&f, &["X".to_string()].into()).unwrap();
        prop_assert_eq!(Formula::forall("X", outer.ground_up()), f.clone());
        // the grounded sentence is an instance: it holds wherever the source does
        prop_assert!(pg.is_sentence());
        if holds(&s, &f) {
            prop_assert!(holds(&s, &pg));
            prop_assert!(holds(&s, &outer));
        }
        let every = (0..s.size).all(|x| (0..s.size).all(|y| holds(&s.clone().with_grounded("X", x).with_grounded("Y", y), &pg)));
        prop_assert_eq!(every, holds(&s, &f));
    }
}

suite! {
    least_predicates_is_the_least_model,
    positive_sentences_are_monotone,
    classification_preserves_meaning,
    qe_targets_follow_from_sources,
    partial_grounding_is_undone_by_closure,
}
