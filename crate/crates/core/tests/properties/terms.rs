use crate::common::*;
use eiskit_core::subst::{match_atom, match_term, unify_atoms, unify_terms};
use eiskit_core::syntax::{parse_atom, parse_formula, parse_term};
use eiskit_core::{Atom, Substitution, Term};
use proptest::prelude::*;

fn vars_of(ts: &[&Term]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in ts {
        for v in t.vars() {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out
}

/// Replaces the subterms of `t` chosen by `mask` (in preorder) with fresh
/// variables `W0, W1, ...`, recording what each one stands for.
fn generalize(t: &Term, mask: &[bool], pos: &mut usize, out: &mut Vec<(String, Term)>) -> Term {
    let here = mask.get(*pos).copied().unwrap_or(false);
    *pos += 1;
    if here {
        let w = format!("W{}", out.len());
        out.push((w.clone(), t.clone()));
        return Term::var(w);
    }
    match t {
        Term::App(f, args) => Term::app(f.clone(), args.iter().map(|a| generalize(a, mask, pos, out)).collect()),
        _ => t.clone(),
    }
}

proptest! {
    #![proptest_config(config(256))]

    fn grounding_round_trips(t in term(), g in term_with_grounded()) {
        prop_assert_eq!(t.ground_down().ground_up(), t.clone());
        prop_assert!(t.ground_down().is_ground());
        let ungrounded = g.ground_up();
        prop_assert!(ungrounded.grounded_constants().is_empty());
        // `(t↑)↓ = t` holds for terms without variables
        let closed = g.ground_down();
        prop_assert_eq!(closed.ground_up().ground_down(), closed);
        let a = Atom::new("q", vec![t.clone(), g.ground_up()]);
        prop_assert_eq!(a.ground_down().ground_up(), a);
    }

    fn substitution_application_commutes_with_grounding(t in term(), s in subst_over(&["X", "Y"], term())) {
        // σ↓(t)↓ = σ(t)↓: grounding after substitution only touches the
        // variables the substitution leaves in place
        prop_assert_eq!(s.ground_down().apply_term(&t).ground_down(), s.apply_term(&t).ground_down());
        prop_assert_eq!(s.ground_down().ground_up(), s);
    }

    fn matching_agrees_with_grounding(p in term(), t in term(), s in subst_over(&["X", "Y", "Z"], term())) {
        // t = σ(p) iff t↓ = σ↓(p)
        prop_assert_eq!(s.apply_term(&p) == t, s.ground_down().apply_term(&p) == t.ground_down());
        let inst = s.apply_term(&p);
        prop_assert_eq!(s.ground_down().apply_term(&p), inst.ground_down());
        // the matcher finds a substitution for instances, and grounding the
        // subject grounds the matcher
        let m = match_term(&p, &inst);
        prop_assert!(m.is_some());
        let m = m.unwrap();
        prop_assert_eq!(m.apply_term(&p), inst.clone());
        let md = match_term(&p, &inst.ground_down());
        prop_assert_eq!(md, Some(m.ground_down()));
        // and fails exactly when no instance exists
        match match_term(&p, &t) {
            Some(m) => prop_assert_eq!(m.apply_term(&p), t.clone()),
            None => prop_assert!(match_term(&p, &t.ground_down()).is_none()),
        }
        let a = Atom::new("q", vec![p.clone(), p.clone()]);
        let b = s.apply_atom(&a);
        prop_assert_eq!(match_atom(&a, &b).map(|m| m.apply_atom(&a)), Some(b.clone()));
        prop_assert_eq!(match_atom(&a, &b.ground_down()).map(|m| m.apply_atom(&a)), Some(b.ground_down()));
    }

    fn unifiers_are_sound(a in term(), b in term()) {
        if let Some(s) = unify_terms(&a, &b) {
            prop_assert_eq!(s.apply_term(&a), s.apply_term(&b));
            prop_assert!(s.is_idempotent());
        }
        let (x, y) = (Atom::new("q", vec![a.clone(), b.clone()]), Atom::new("q", vec![b.clone(), a.clone()]));
        if let Some(s) = unify_atoms(&x, &y) {
            prop_assert_eq!(s.apply_atom(&x), s.apply_atom(&y));
        }
    }

    fn unifiers_are_most_general(
        a in term(),
        theta in subst_over(&["X", "Y", "Z"], ground_term()),
        mask in proptest::collection::vec(proptest::bool::weighted(0.3), 40),
    ) {
        let image = theta.apply_term(&a);
        let mut fresh = Vec::new();
        let b = generalize(&image, &mask, &mut 0, &mut fresh);
        let mut unifier = theta.clone();
        for (w, t) in fresh {
            unifier.insert(w, t);
        }
        prop_assert_eq!(unifier.apply_term(&a), unifier.apply_term(&b));
        let mgu = unify_terms(&a, &b);
        prop_assert!(mgu.is_some(), "{} and {} have a unifier", a, b);
        let mgu = mgu.unwrap();
        // θ = θ ∘ mgu on the variables of both terms
        for v in vars_of(&[&a, &b]) {
            let x = Term::var(v);
            prop_assert_eq!(unifier.apply_term(&mgu.apply_term(&x)), unifier.apply_term(&x));
        }
    }

    fn occurs_check(t in term()) {
        let wrapped = Term::app("f", vec![t.clone()]);
        for v in t.vars() {
            let x = Term::var(v);
            prop_assert!(unify_terms(&x, &Term::app("g", vec![wrapped.clone(), x.clone()])).is_none());
        }
    }

    fn composition(
        t in term(),
        r in subst_over(&["X", "Z"], term()),
        s in subst_over(&["Y"], term()),
        u in subst_over(&["X", "Y"], term()),
    ) {
        // (σ ∘ τ)(t) = σ(τ(t))
        prop_assert_eq!(s.compose(&u).apply_term(&t), s.apply_term(&u.apply_term(&t)));
        let left = r.compose(&s).compose(&u);
        let right = r.compose(&s.compose(&u));
        prop_assert_eq!(left.apply_term(&t), right.apply_term(&t));
        prop_assert_eq!(left, right);
        // composition drops identity bindings such as `X ↦ X`
        let canonical: Substitution = u.iter().filter(|(v, t)| **t != Term::var(v.as_str())).map(|(v, t)| (v.clone(), t.clone())).collect();
        prop_assert_eq!(Substitution::new().compose(&u), canonical);
        prop_assert_eq!(u.compose(&Substitution::new()), u);
    }

    fn terms_print_and_parse(t in term_with_grounded()) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t.clone());
        let a = Atom::rewrites(t.clone(), Term::app("f", vec![t]));
        prop_assert_eq!(parse_atom(&a.to_string()).unwrap(), a);
    }

    fn formulas_print_and_parse(f in formula(true, 4)) {
        let text = f.to_string();
        let back = parse_formula(&text);
        prop_assert!(back.is_ok(), "{}: {:?}", text, back);
        prop_assert_eq!(back.unwrap(), f);
    }
}

suite! {
    grounding_round_trips,
    substitution_application_commutes_with_grounding,
    matching_agrees_with_grounding,
    unifiers_are_sound,
    unifiers_are_most_general,
    occurs_check,
    composition,
    terms_print_and_parse,
    formulas_print_and_parse,
}
