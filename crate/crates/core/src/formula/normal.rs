//! Negation normal form and prenex form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Formula;
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A quantifier prefix, outermost first.
pub type Prefix = Vec<(Quantifier, String)>;

/// Eliminates `=>` and pushes negation down to atoms and equations.
pub fn nnf(f: &Formula) -> Formula {
    to_nnf(f, true)
}

/// `nnf(~f)`.
pub fn negate_nnf(f: &Formula) -> Formula {
    to_nnf(f, false)
}

fn to_nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Equal(..) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(x) => to_nnf(x, !positive),
        Formula::And(xs) => {
            let ys = xs.iter().map(|x| to_nnf(x, positive)).collect();
            if positive {
                Formula::And(ys)
            } else {
                Formula::Or(ys)
            }
        }
        Formula::Or(xs) => {
            let ys = xs.iter().map(|x| to_nnf(x, positive)).collect();
            if positive {
                Formula::Or(ys)
            } else {
                Formula::And(ys)
            }
        }
        Formula::Implies(l, r) => {
            if positive {
                Formula::Or(vec![to_nnf(l, false), to_nnf(r, true)])
            } else {
                Formula::And(vec![to_nnf(l, true), to_nnf(r, false)])
            }
        }
        Formula::Forall(v, b) => {
            if positive {
                Formula::forall(v.clone(), to_nnf(b, true))
            } else {
                Formula::exists(v.clone(), to_nnf(b, false))
            }
        }
        Formula::Exists(v, b) => {
            if positive {
                Formula::exists(v.clone(), to_nnf(b, true))
            } else {
                Formula::forall(v.clone(), to_nnf(b, false))
            }
        }
    }
}

/// Prenex form of a formula. The input is first put in negation normal
/// form; bound variables are renamed apart from each other and from the free
/// variables wherever needed, so the prefix has pairwise distinct names.
pub fn prenex(f: &Formula) -> (Prefix, Formula) {
    let n = nnf(f);
    let mut taken: BTreeSet<String> = n.free_vars().into_iter().collect();
    let mut avoid = n.all_vars();
    pull(&n, &mut taken, &mut avoid)
}

fn fresh(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..).map(|i| format!("{base}_{i}")).find(|c| !avoid.contains(c)).unwrap()
}

fn pull(f: &Formula, taken: &mut BTreeSet<String>, avoid: &mut BTreeSet<String>) -> (Prefix, Formula) {
    match f {
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            let q = if matches!(f, Formula::Forall(..)) { Quantifier::Forall } else { Quantifier::Exists };
            let (name, body) = if taken.contains(v) {
                let w = fresh(v, avoid);
                avoid.insert(w.clone());
                let body = b.replace_free(v, &Term::var(w.clone()));
                (w, body)
            } else {
                (v.clone(), (**b).clone())
            };
            taken.insert(name.clone());
            let (mut prefix, matrix) = pull(&body, taken, avoid);
            prefix.insert(0, (q, name));
            (prefix, matrix)
        }
        Formula::And(xs) | Formula::Or(xs) => {
            let mut prefix = Vec::new();
            let mut parts = Vec::with_capacity(xs.len());
            for x in xs {
                let (p, m) = pull(x, taken, avoid);
                prefix.extend(p);
                parts.push(m);
            }
            let matrix = if matches!(f, Formula::And(_)) { Formula::And(parts) } else { Formula::Or(parts) };
            (prefix, matrix)
        }
        _ => (Vec::new(), f.clone()),
    }
}

/// Rebuilds `Q1 x1 ... Qn xn. matrix`.
pub(crate) fn close(prefix: &[(Quantifier, String)], matrix: Formula) -> Formula {
    prefix.iter().rev().fold(matrix, |body, (q, v)| match q {
        Quantifier::Forall => Formula::forall(v.clone(), body),
        Quantifier::Exists => Formula::exists(v.clone(), body),
    })
}

/// Flattens nested conjunctions and disjunctions.
pub(crate) fn flatten(f: &Formula) -> Formula {
    match f {
        Formula::And(xs) => {
            let mut out = Vec::new();
            for x in xs {
                match flatten(x) {
                    Formula::And(ys) => out.extend(ys),
                    y => out.push(y),
                }
            }
            Formula::and(out)
        }
        Formula::Or(xs) => {
            let mut out = Vec::new();
            for x in xs {
                match flatten(x) {
                    Formula::Or(ys) => out.extend(ys),
                    y => out.push(y),
                }
            }
            Formula::or(out)
        }
        Formula::Not(x) => Formula::not(flatten(x)),
        Formula::Implies(l, r) => Formula::implies(flatten(l), flatten(r)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), flatten(b)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), flatten(b)),
        _ => f.clone(),
    }
}

/// Disjunctive normal form of a quantifier-free formula in negation normal
/// form, as a list of conjunctions of literals. Duplicate literals inside a
/// conjunction are dropped.
pub(crate) fn dnf(f: &Formula) -> Vec<Vec<Formula>> {
    match f {
        Formula::And(xs) => {
            let mut acc: Vec<Vec<Formula>> = vec![Vec::new()];
            for x in xs {
                let d = dnf(x);
                let mut next = Vec::with_capacity(acc.len() * d.len());
                for a in &acc {
                    for c in &d {
                        let mut merged = a.clone();
                        for lit in c {
                            if !merged.contains(lit) {
                                merged.push(lit.clone());
                            }
                        }
                        next.push(merged);
                    }
                }
                acc = next;
            }
            acc
        }
        Formula::Or(xs) => xs.iter().flat_map(dnf).collect(),
        _ => vec![vec![f.clone()]],
    }
}
