//! Substitutions, one-way matching and syntactic unification.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Atom, Term};

/// A finite map from variable names to terms, applied eagerly.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Substitution {
    bindings: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn singleton(var: impl Into<String>, term: Term) -> Self {
        let mut s = Substitution::new();
        s.bindings.insert(var.into(), term);
        s
    }

    /// Inserts a raw binding without normalising the existing ones.
    pub fn insert(&mut self, var: impl Into<String>, term: Term) {
        self.bindings.insert(var.into(), term);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.bindings.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.bindings.keys()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        if self.bindings.is_empty() {
            return t.clone();
        }
        match t {
            Term::Var(v) => self.bindings.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Grounded(_) => t.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply_term(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply_term(t)).collect() }
    }

    /// `self ∘ first`: applying the result equals applying `first`, then `self`.
    pub fn compose(&self, first: &Substitution) -> Substitution {
        let mut bindings: BTreeMap<String, Term> = first
            .bindings
            .iter()
            .map(|(v, t)| (v.clone(), self.apply_term(t)))
            .filter(|(v, t)| !matches!(t, Term::Var(w) if w == v))
            .collect();
        for (v, t) in &self.bindings {
            bindings.entry(v.clone()).or_insert_with(|| t.clone());
        }
        Substitution { bindings }
    }

    /// Keeps only the bindings of the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Substitution {
        let mut out = Substitution::new();
        for v in vars {
            if let Some(t) = self.bindings.get(v) {
                out.bindings.insert(v.clone(), t.clone());
            }
        }
        out
    }

    /// `σ↓ = {x ↦ t↓}`.
    pub fn ground_down(&self) -> Substitution {
        Substitution {
            bindings: self.bindings.iter().map(|(v, t)| (v.clone(), t.ground_down())).collect(),
        }
    }

    pub fn ground_up(&self) -> Substitution {
        Substitution {
            bindings: self.bindings.iter().map(|(v, t)| (v.clone(), t.ground_up())).collect(),
        }
    }

    /// No bound variable occurs in any image.
    pub fn is_idempotent(&self) -> bool {
        self.bindings.values().all(|t| self.bindings.keys().all(|v| !t.occurs(v)))
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution { bindings: iter.into_iter().collect() }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        write!(f, "}}")
    }
}

/// One-way matching: the least `σ` with `σ(pattern) = subject`. Variables of
/// the subject are treated as constants and never bound.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    match_into(pattern, subject, &mut s).then_some(s)
}

pub fn match_atom(pattern: &Atom, subject: &Atom) -> Option<Substitution> {
    if pattern.pred != subject.pred || pattern.args.len() != subject.args.len() {
        return None;
    }
    let mut s = Substitution::new();
    pattern
        .args
        .iter()
        .zip(&subject.args)
        .all(|(p, t)| match_into(p, t, &mut s))
        .then_some(s)
}

fn match_into(pattern: &Term, subject: &Term, s: &mut Substitution) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => match s.bindings.get(v) {
            Some(bound) => bound == subject,
            None => {
                s.bindings.insert(v.clone(), subject.clone());
                true
            }
        },
        (Term::Grounded(a), Term::Grounded(b)) => a == b,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_into(x, y, s))
        }
        _ => false,
    }
}

/// Most general unifier with occurs check.
pub fn unify_terms(a: &Term, b: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    unify_into(a, b, &mut s).then_some(s)
}

pub fn unify_atoms(a: &Atom, b: &Atom) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let mut s = Substitution::new();
    a.args
        .iter()
        .zip(&b.args)
        .all(|(x, y)| unify_into(x, y, &mut s))
        .then_some(s)
}

// Keeps `s` idempotent: each new binding is applied to the existing images.
fn unify_into(a: &Term, b: &Term, s: &mut Substitution) -> bool {
    let a = s.apply_term(a);
    let b = s.apply_term(b);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) => {
            if t.occurs(x) {
                return false;
            }
            let single = Substitution::singleton(x.clone(), t.clone());
            for image in s.bindings.values_mut() {
                *image = single.apply_term(image);
            }
            s.bindings.insert(x.clone(), t.clone());
            true
        }
        (Term::Grounded(x), Term::Grounded(y)) => x == y,
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| unify_into(x, y, s))
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: Term) -> Term {
        Term::app("s", vec![t])
    }
    fn zero() -> Term {
        Term::constant("0")
    }
    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn apply_replaces_bound_variables() {
        let sigma = Substitution::singleton("x", s(zero()));
        assert_eq!(sigma.apply_term(&s(s(x()))), s(s(s(zero()))));
        let geq = Atom::new("geq", vec![x(), zero()]);
        assert_eq!(sigma.apply_atom(&geq), Atom::new("geq", vec![s(zero()), zero()]));
        assert_eq!(Substitution::new().apply_term(&s(x())), s(x()));
    }

    #[test]
    fn matching() {
        assert_eq!(match_term(&s(s(x())), &s(s(s(zero())))), Some(Substitution::singleton("x", s(zero()))));
        assert_eq!(match_term(&s(x()), &zero()), None);
        assert_eq!(
            match_term(&s(s(x())), &s(s(Term::grounded("x")))),
            Some(Substitution::singleton("x", Term::grounded("x")))
        );
        // subject variables are rigid
        assert_eq!(match_term(&s(zero()), &s(x())), None);
        // non-linear patterns
        let p = Term::app("f", vec![x(), x()]);
        assert!(match_term(&p, &Term::app("f", vec![zero(), zero()])).is_some());
        assert!(match_term(&p, &Term::app("f", vec![zero(), s(zero())])).is_none());
    }

    #[test]
    fn unification() {
        let a = Atom::rewrite(s(s(x())), x());
        let b = Atom::rewrite(s(s(s(Term::grounded("x")))), Term::var("z"));
        let mgu = unify_atoms(&a, &b).unwrap();
        assert_eq!(mgu.get("x"), Some(&s(Term::grounded("x"))));
        assert_eq!(mgu.get("z"), Some(&s(Term::grounded("x"))));
        assert_eq!(mgu.apply_atom(&a), mgu.apply_atom(&b));

        let p = Atom::new("P", vec![x()]);
        let q = Atom::new("P", vec![Term::app("f", vec![x()])]);
        assert_eq!(unify_atoms(&p, &q), None);

        let p = Atom::new("P", vec![x(), Term::var("y")]);
        let q = Atom::new("P", vec![Term::var("y"), x()]);
        let mgu = unify_atoms(&p, &q).unwrap();
        assert_eq!(mgu.len(), 1);
        assert_eq!(mgu.apply_atom(&p), mgu.apply_atom(&q));
    }

    #[test]
    fn unifier_is_idempotent() {
        let a = Term::app("f", vec![x(), Term::var("y"), Term::var("z")]);
        let b = Term::app("f", vec![Term::var("y"), Term::var("z"), s(zero())]);
        let mgu = unify_terms(&a, &b).unwrap();
        assert!(mgu.is_idempotent());
        assert_eq!(mgu.apply_term(&a), mgu.apply_term(&b));
    }

    #[test]
    fn compose_applies_first_then_second() {
        let s1 = Substitution::singleton("x", s(Term::var("y")));
        let s2 = Substitution::singleton("y", zero());
        let t = Term::app("f", vec![x(), Term::var("y")]);
        assert_eq!(s2.compose(&s1).apply_term(&t), s2.apply_term(&s1.apply_term(&t)));
    }
}
