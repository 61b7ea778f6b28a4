#![allow(dead_code)]

use std::collections::BTreeMap;

use eiskit_core::model::{FiniteStructure, Table};
use eiskit_core::system::{InferenceRule, RuleLabel, Signature};
use eiskit_core::{Atom, Eis, Formula, Term};
use proptest::prelude::*;

/// Lists the properties of a module as `SUITE` and wraps each in a test.
macro_rules! suite {
    ($($name:ident),* $(,)?) => {
        #[allow(dead_code)]
        pub const SUITE: &[(&str, fn())] = &[$((stringify!($name), $name)),*];

        #[cfg(test)]
        mod harness {
            $(#[test]
            fn $name() {
                super::$name()
            })*
        }
    };
}

pub const EXAMPLE: &str = "\
func 0/0, s/1.
pred geq/2, odd/1, peven/1, zero/1.
mu_bottom.
clause geq(X, 0).
clause geq(s(X), s(Y)) :- geq(X, Y).
clause peven(X) :- X ->* s(s(0)).
clause odd(X) :- X ->* s(0).
clause zero(X) :- X ->* 0.
rule s(s(X)) -> X :- geq(X, s(0)).
";

pub fn example() -> Eis {
    eiskit_core::parse_spec(EXAMPLE).unwrap().eis()
}

pub fn numeral(n: usize) -> Term {
    Term::iterate("s", n, Term::constant("0"))
}

pub fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// Terms over `a/0, b/0, f/1, g/2` and the given variables.
pub fn term_over(vars: &'static [&'static str], depth: u32) -> BoxedStrategy<Term> {
    let mut leaves: Vec<BoxedStrategy<Term>> = vec![Just(Term::constant("a")).boxed(), Just(Term::constant("b")).boxed()];
    if !vars.is_empty() {
        leaves.push(proptest::sample::select(vars).prop_map(Term::var).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves);
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Term::app("g", vec![l, r])),
        ]
    })
    .boxed()
}

pub fn term() -> BoxedStrategy<Term> {
    term_over(&["X", "Y", "Z"], 3)
}

pub fn ground_term() -> BoxedStrategy<Term> {
    term_over(&[], 3)
}

/// Terms that may also contain grounded constants `%x`, `%y`.
pub fn term_with_grounded() -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        Just(Term::constant("a")),
        proptest::sample::select(&["X", "Y"][..]).prop_map(Term::var),
        proptest::sample::select(&["x", "y"][..]).prop_map(Term::grounded),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| Term::app("f", vec![t])),
            (inner.clone(), inner).prop_map(|(l, r)| Term::app("g", vec![l, r])),
        ]
    })
    .boxed()
}

pub fn subst_over(vars: &'static [&'static str], images: BoxedStrategy<Term>) -> BoxedStrategy<eiskit_core::Substitution> {
    proptest::collection::vec(images, vars.len())
        .prop_map(move |ts| vars.iter().map(|v| v.to_string()).zip(ts).collect())
        .boxed()
}

/// Natural-number terms `s^n(0)` mixed with the variables `X`, `Y`.
pub fn nat_term() -> BoxedStrategy<Term> {
    prop_oneof![
        (0usize..6).prop_map(numeral),
        (0usize..3, proptest::sample::select(&["X", "Y"][..])).prop_map(|(n, v)| Term::iterate("s", n, Term::var(v))),
    ]
    .boxed()
}

/// Atoms of the running example over [`nat_term`].
pub fn example_atom(t: BoxedStrategy<Term>) -> BoxedStrategy<Atom> {
    prop_oneof![
        (proptest::sample::select(&["zero", "odd", "peven"][..]), t.clone()).prop_map(|(p, x)| Atom::new(p, vec![x])),
        (proptest::sample::select(&["geq", "->", "->*"][..]), t.clone(), t).prop_map(|(p, x, y)| Atom::new(p, vec![x, y])),
    ]
    .boxed()
}

pub fn small_signature() -> Signature {
    Signature::new()
        .with_function("a", 0)
        .with_function("b", 0)
        .with_function("f", 1)
        .with_predicate("p", 1)
        .with_predicate("q", 2)
        .with_predicate("r", 1)
}

fn small_atom() -> BoxedStrategy<Atom> {
    let t = || {
        let leaf = prop_oneof![
            Just(Term::constant("a")),
            Just(Term::constant("b")),
            proptest::sample::select(&["X", "Y"][..]).prop_map(Term::var),
        ];
        leaf.prop_recursive(1, 4, 1, |inner| inner.prop_map(|t| Term::app("f", vec![t])))
    };
    prop_oneof![
        (proptest::sample::select(&["p", "r"][..]), t()).prop_map(|(p, x)| Atom::new(p, vec![x])),
        (t(), t()).prop_map(|(x, y)| Atom::new("q", vec![x, y])),
    ]
    .boxed()
}

/// Small inference systems over [`small_signature`].
pub fn small_eis() -> BoxedStrategy<Eis> {
    let rule = (proptest::collection::vec(small_atom(), 0..3), small_atom());
    proptest::collection::vec(rule, 1..5)
        .prop_map(|rules| Eis {
            signature: small_signature(),
            rules: rules
                .into_iter()
                .enumerate()
                .map(|(i, (premises, conclusion))| InferenceRule::new(RuleLabel::Named(format!("r{i}")), premises, conclusion))
                .collect(),
        })
        .boxed()
}

/// Formulas over `p/1`, `q/2`, the constant `a`, the unary `f` and the
/// variables `X`, `Y`. With `negation`, `~`, `=>` and `=` may occur.
pub fn formula(negation: bool, depth: u32) -> BoxedStrategy<Formula> {
    let var = proptest::sample::select(&["X", "Y"][..]);
    let t = prop_oneof![
        Just(Term::constant("a")),
        var.clone().prop_map(Term::var),
        var.prop_map(|v| Term::app("f", vec![Term::var(v)])),
    ];
    let atom = prop_oneof![
        t.clone().prop_map(|x| Formula::Atom(Atom::new("p", vec![x]))),
        (t.clone(), t.clone()).prop_map(|(x, y)| Formula::Atom(Atom::new("q", vec![x, y]))),
    ];
    let leaf = if negation {
        prop_oneof![4 => atom, 1 => (t.clone(), t).prop_map(|(x, y)| Formula::Equal(x, y))].boxed()
    } else {
        atom.boxed()
    };
    leaf.prop_recursive(depth, 32, 3, move |inner| {
        let binder = (proptest::sample::select(&["X", "Y"][..]), any::<bool>(), inner.clone())
            .prop_map(|(v, universal, b)| if universal { Formula::forall(v, b) } else { Formula::exists(v, b) });
        let base = prop_oneof![
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            binder,
        ];
        if negation {
            prop_oneof![
                3 => base,
                1 => inner.clone().prop_map(Formula::not),
                1 => (inner.clone(), inner).prop_map(|(l, r)| Formula::implies(l, r)),
            ]
            .boxed()
        } else {
            base.boxed()
        }
    })
    .boxed()
}

/// Universal closure over `X`, `Y`.
pub fn close(f: Formula) -> Formula {
    let free = f.free_vars();
    free.into_iter().rev().fold(f, |b, v| Formula::forall(v, b))
}

/// Random structures over `a`, `f`, `p`, `q` and the grounded constants
/// `%X`, `%Y` of size 1 to 3.
pub fn structure() -> BoxedStrategy<FiniteStructure> {
    (1usize..4)
        .prop_flat_map(|n| {
            (
                Just(n),
                0..n,
                proptest::collection::vec(0..n, n),
                proptest::collection::vec(0..n, 2),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n * n),
            )
        })
        .prop_map(|(n, a, f, k, p, q)| {
            let mut s = FiniteStructure::new(n).with_function("a", vec![a]).with_grounded("X", k[0]).with_grounded("Y", k[1]);
            s.functions.insert("f".into(), Table { arity: 1, cells: f });
            s.predicates.insert("p".into(), Table { arity: 1, cells: p });
            s.predicates.insert("q".into(), Table { arity: 2, cells: q });
            s
        })
        .boxed()
}

/// The structure with some extra predicate tuples switched on.
pub fn grow(s: &FiniteStructure, extra: &[bool]) -> FiniteStructure {
    let mut t = s.clone();
    let mut i = 0;
    for table in t.predicates.values_mut() {
        for c in table.cells.iter_mut() {
            *c |= extra.get(i).copied().unwrap_or(false);
            i += 1;
        }
    }
    t
}

pub fn predicate_count(s: &FiniteStructure) -> BTreeMap<String, usize> {
    s.predicates.iter().map(|(p, t)| (p.clone(), t.cells.iter().filter(|&&c| c).count())).collect()
}
