use crate::common::*;
use eiskit_core::proof::{herbrand_enumerate, prove, Budget, ProofNode, ProofTree, Verdict};
use eiskit_core::syntax::{parse_spec, print_spec};
use eiskit_core::{Atom, SpecDocument, Substitution, Term};
use proptest::prelude::*;

fn map_terms(tree: &ProofTree, g: &impl Fn(&Term) -> Term) -> ProofTree {
    let goal = Atom::new(tree.goal.pred.clone(), tree.goal.args.iter().map(g).collect());
    let node = match &tree.node {
        ProofNode::Open => ProofNode::Open,
        ProofNode::Derivation { rule, substitution, children } => ProofNode::Derivation {
            rule: rule.clone(),
            substitution: substitution.iter().map(|(v, t)| (v.clone(), g(t))).collect(),
            children: children.iter().map(|c| map_terms(c, g)).collect(),
        },
    };
    ProofTree { goal, node }
}

fn replace_grounded(t: &Term, s: &Substitution) -> Term {
    match t {
        Term::Grounded(v) => s.get(v).map_or_else(|| t.clone(), Term::ground_down),
        Term::App(f, args) => Term::app(f.clone(), args.iter().map(|a| replace_grounded(a, s)).collect()),
        Term::Var(_) => t.clone(),
    }
}

fn value(t: &Term) -> Option<usize> {
    match t {
        Term::App(f, args) if f == "0" && args.is_empty() => Some(0),
        Term::App(f, args) if f == "s" && args.len() == 1 => value(&args[0]).map(|n| n + 1),
        _ => None,
    }
}

/// Least model of the running example on numerals.
fn arithmetic(a: &Atom) -> bool {
    let n: Vec<usize> = a.args.iter().map(|t| value(t).unwrap()).collect();
    match a.pred.as_str() {
        "zero" => n[0] == 0,
        "odd" => n[0] % 2 == 1,
        "peven" => n[0] % 2 == 0 && n[0] > 0,
        "geq" => n[0] >= n[1],
        "->" => n[1] >= 1 && n[0] == n[1] + 2,
        "->*" => n[0] == n[1] || (n[1] >= 1 && n[0] > n[1] && (n[0] - n[1]) % 2 == 0),
        p => panic!("unexpected predicate {p}"),
    }
}

fn ground_nat() -> BoxedStrategy<Term> {
    (0usize..9).prop_map(numeral).boxed()
}

proptest! {
    #![proptest_config(config(256))]

    fn ground_atoms_follow_arithmetic(a in example_atom(ground_nat())) {
        let e = example();
        let r = prove(&e, &a, &Budget::new(40, 1_000_000));
        prop_assert!(!matches!(r.verdict, Verdict::Unknown(_)), "{}: {:?}", a, r.verdict);
        prop_assert_eq!(r.verdict.is_proved(), arithmetic(&a), "{}", a);
        if let Verdict::Proved(t) = &r.verdict {
            prop_assert!(t.is_closed());
            prop_assert_eq!(t.replay(&e), Ok(()));
        }
    }

    fn grounding_preserves_provability(a in example_atom(nat_term())) {
        let e = example();
        let b = Budget::new(32, 200_000);
        let plain = prove(&e, &a, &b);
        let grounded = prove(&e, &a.ground_down(), &b);
        prop_assert_eq!(plain.verdict.name(), grounded.verdict.name());
        prop_assert_eq!(&plain.goal, &a.ground_down());
        prop_assert_eq!(plain.verdict, grounded.verdict);
    }

    fn provability_is_stable_under_substitution(
        a in example_atom(nat_term()),
        s in subst_over(&["X", "Y"], nat_term()),
    ) {
        let e = example();
        let b = Budget::new(32, 200_000);
        let r = prove(&e, &a, &b);
        if let Verdict::Proved(tree) = r.verdict {
            // the instance of the tree proves the instance of the atom
            let inst = map_terms(&tree, &|t| replace_grounded(t, &s));
            prop_assert_eq!(&inst.goal, &s.apply_atom(&a).ground_down());
            prop_assert_eq!(inst.replay(&e), Ok(()));
            prop_assert!(eiskit_core::proof::check_substitution_stability(&e, &a, &s, &b), "{} under {}", a, s);
        }
    }

    fn herbrand_facts_are_provable_and_grow_with_depth(e in small_eis(), d in 1usize..4) {
        let b = Budget::new(0, 20_000);
        let small = herbrand_enumerate(&e, d, &b).unwrap();
        let large = herbrand_enumerate(&e, d + 1, &b).unwrap();
        prop_assume!(small.stopped.is_none() && large.stopped.is_none());
        prop_assert!(small.facts.is_subset(&large.facts));
        let depth = small.iterations + 2;
        for f in &small.facts {
            prop_assert!(f.is_ground());
            prop_assert!(f.args.iter().all(|t| t.depth() <= d));
            let r = prove(&e, f, &Budget::new(depth, 1_000_000));
            prop_assert!(r.verdict.is_proved(), "{} at depth {}: {:?}", f, depth, r.verdict);
        }
    }

    fn herbrand_agrees_with_prove_on_the_example(a in example_atom((0usize..7).prop_map(numeral).boxed())) {
        let e = example();
        let m = herbrand_enumerate(&e, 8, &Budget::default()).unwrap();
        prop_assert!(m.saturated);
        prop_assert_eq!(m.contains(&a), prove(&e, &a, &Budget::new(40, 1_000_000)).verdict.is_proved(), "{}", a);
    }

    fn specs_print_and_parse(e in small_eis()) {
        let doc = SpecDocument::from_eis(Some("random".into()), &e);
        let text = print_spec(&doc);
        let back = parse_spec(&text);
        prop_assert!(back.is_ok(), "{}\n{:?}", text, back);
        let back = back.unwrap();
        prop_assert_eq!(&back, &doc);
        // `->` and `->*` are always part of a parsed signature
        prop_assert_eq!(back.eis().rules, e.rules);
    }
}

suite! {
    ground_atoms_follow_arithmetic,
    grounding_preserves_provability,
    provability_is_stable_under_substitution,
    herbrand_facts_are_provable_and_grow_with_depth,
    herbrand_agrees_with_prove_on_the_example,
    specs_print_and_parse,
}
