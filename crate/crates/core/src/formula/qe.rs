//! Partial grounding and the removal of universal quantifiers.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::classify::{classify, FormulaClass};
use super::normal::{close, dnf, Quantifier};
use super::{Formula, FormulaError};
use crate::term::Term;

/// `F↓_U`: drops the universal quantifiers binding variables of `vars` and
/// replaces their occurrences by grounded constants. Quantifiers are read
/// with their polarity, so `~exists X` counts as universal. A variable of
/// `vars` bound existentially is an error. Below the dropped binder, a
/// binder reusing the name protects its body.
pub fn partial_ground(f: &Formula, vars: &BTreeSet<String>) -> Result<Formula, FormulaError> {
    ground_rec(f, vars, vars, true)
}

fn ground_rec(
    f: &Formula,
    vars: &BTreeSet<String>,
    pending: &BTreeSet<String>,
    positive: bool,
) -> Result<Formula, FormulaError> {
    let rec = |x: &Formula, positive: bool| ground_rec(x, vars, pending, positive);
    Ok(match f {
        Formula::Atom(_) | Formula::Equal(..) => f.map_terms(&|t: &Term| t.ground_some(vars)),
        Formula::Not(x) => Formula::not(rec(x, !positive)?),
        Formula::And(xs) => Formula::And(xs.iter().map(|x| rec(x, positive)).collect::<Result<_, _>>()?),
        Formula::Or(xs) => Formula::Or(xs.iter().map(|x| rec(x, positive)).collect::<Result<_, _>>()?),
        Formula::Implies(l, r) => Formula::implies(rec(l, !positive)?, rec(r, positive)?),
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            let universal = matches!(f, Formula::Forall(..)) == positive;
            if pending.contains(v) {
                if !universal {
                    return Err(FormulaError::ExistentialGrounding(v.clone()));
                }
                let mut rest = pending.clone();
                rest.remove(v);
                ground_rec(b, vars, &rest, positive)?
            } else {
                let mut inner = vars.clone();
                inner.remove(v);
                let body = ground_rec(b, &inner, pending, positive)?;
                if matches!(f, Formula::Forall(..)) {
                    Formula::forall(v.clone(), body)
                } else {
                    Formula::exists(v.clone(), body)
                }
            }
        }
    })
}

/// Which shape of the prenex matrix licensed the transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QeRule {
    /// No universal variables; the sentence is its own target.
    ExistentialOnly,
    UniversalConjunction,
    UniversalDisjunction,
    MixedConjunction,
    MixedDisjunction,
    /// Conjunction where each existential variable occurs in at most one
    /// conjunct.
    DisjointExistentialConjunction,
}

impl fmt::Display for QeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QeRule::ExistentialOnly => "existential-only",
            QeRule::UniversalConjunction => "universal-conjunction",
            QeRule::UniversalDisjunction => "universal-disjunction",
            QeRule::MixedConjunction => "mixed-conjunction",
            QeRule::MixedDisjunction => "mixed-disjunction",
            QeRule::DisjointExistentialConjunction => "disjoint-existential-conjunction",
        })
    }
}

/// How provability of the target relates to provability of the source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Iff,
    /// Proving the target proves the source.
    TargetImpliesSource,
    /// Proving the source proves the target, so refuting the target
    /// refutes the source.
    SourceImpliesTarget,
}

impl Direction {
    pub fn target_proves_source(self) -> bool {
        matches!(self, Direction::Iff | Direction::TargetImpliesSource)
    }

    pub fn target_refutes_source(self) -> bool {
        matches!(self, Direction::Iff | Direction::SourceImpliesTarget)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Iff => "iff",
            Direction::TargetImpliesSource => "if",
            Direction::SourceImpliesTarget => "only-if",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QeResult {
    pub rule: QeRule,
    pub direction: Direction,
    pub universal: Vec<String>,
    pub existential: Vec<String>,
    /// The source sentence in prenex negation normal form.
    pub source: Formula,
    /// Existential closure of the matrix grounded on the universal variables.
    pub target: Formula,
    /// The matrix is a single atom, which makes the correspondence an
    /// equivalence regardless of the prefix.
    pub single_atom: bool,
}

/// Replaces the universal variables of a positive sentence by grounded
/// constants and reports how the result relates to the source.
pub fn qe_transform(f: &Formula) -> Result<QeResult, FormulaError> {
    let c = classify(f);
    if c.class == FormulaClass::General {
        if let Some(reason) = &c.reason {
            if reason.starts_with("free") {
                return Err(FormulaError::NotASentence(f.free_vars()));
            }
        }
        return Err(FormulaError::NotPositive(f.to_string()));
    }
    let universal = c.universal();
    let existential = c.existential();
    let source = c.normalized();
    let u: BTreeSet<String> = universal.iter().cloned().collect();
    let disjuncts = dnf(&c.matrix);
    let conjunctive = disjuncts.len() == 1;
    let single_atom = conjunctive && disjuncts[0].len() == 1;

    let ground = |lit: &Formula| lit.map_terms(&|t: &Term| t.ground_some(&u));
    let matrix = if conjunctive {
        Formula::and(disjuncts[0].iter().map(ground).collect())
    } else {
        Formula::or(
            disjuncts
                .iter()
                .map(|d| Formula::and(d.iter().map(ground).collect()))
                .collect(),
        )
    };
    let ex_prefix: Vec<_> = c.prefix.iter().filter(|(q, _)| *q == Quantifier::Exists).cloned().collect();
    let target = close(&ex_prefix, matrix);

    let (rule, direction) = if universal.is_empty() {
        (QeRule::ExistentialOnly, Direction::Iff)
    } else if existential.is_empty() {
        if conjunctive {
            (QeRule::UniversalConjunction, Direction::Iff)
        } else {
            (QeRule::UniversalDisjunction, Direction::TargetImpliesSource)
        }
    } else if conjunctive {
        let disjoint = existential.iter().all(|e| {
            disjuncts[0]
                .iter()
                .filter(|lit| matches!(lit, Formula::Atom(a) if a.vars().contains(e)))
                .count()
                <= 1
        });
        if disjoint {
            (QeRule::DisjointExistentialConjunction, Direction::Iff)
        } else {
            (QeRule::MixedConjunction, Direction::SourceImpliesTarget)
        }
    } else {
        (QeRule::MixedDisjunction, Direction::TargetImpliesSource)
    };
    let direction = if single_atom { Direction::Iff } else { direction };
    Ok(QeResult { rule, direction, universal, existential, source, target, single_atom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Atom;

    fn at(name: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(Atom::new(name, args))
    }
    fn v(n: &str) -> Term {
        Term::var(n)
    }

    #[test]
    fn partial_ground_drops_universals() {
        let f = Formula::forall("X", Formula::exists("Z", at("->", vec![v("X"), v("Z")])));
        let u: BTreeSet<String> = ["X".to_string()].into();
        assert_eq!(partial_ground(&f, &u).unwrap().to_string(), "exists Z. %X -> Z");
        let bad: BTreeSet<String> = ["Z".to_string()].into();
        assert_eq!(partial_ground(&f, &bad), Err(FormulaError::ExistentialGrounding("Z".into())));
        let neg = Formula::not(Formula::exists("X", at("q", vec![v("X")])));
        assert_eq!(partial_ground(&neg, &u).unwrap().to_string(), "~q(%X)");
    }

    #[test]
    fn rule_selection() {
        let red = Formula::forall("X", Formula::exists("Z", at("->", vec![v("X"), v("Z")])));
        let r = qe_transform(&red).unwrap();
        assert_eq!(r.rule, QeRule::DisjointExistentialConjunction);
        assert_eq!(r.direction, Direction::Iff);
        assert!(r.single_atom);
        assert_eq!(r.target.to_string(), "exists Z. %X -> Z");

        let tri = Formula::forall(
            "X",
            Formula::Or(vec![at("peven", vec![v("X")]), at("odd", vec![v("X")]), at("zero", vec![v("X")])]),
        );
        let r = qe_transform(&tri).unwrap();
        assert_eq!(r.rule, QeRule::UniversalDisjunction);
        assert_eq!(r.direction, Direction::TargetImpliesSource);
        assert_eq!(r.target.to_string(), "peven(%X) \\/ odd(%X) \\/ zero(%X)");

        let shared = Formula::forall(
            "X",
            Formula::exists("Z", Formula::And(vec![at("p", vec![v("X"), v("Z")]), at("q", vec![v("Z")])])),
        );
        let r = qe_transform(&shared).unwrap();
        assert_eq!(r.rule, QeRule::MixedConjunction);
        assert_eq!(r.direction, Direction::SourceImpliesTarget);

        let both = Formula::forall("X", Formula::And(vec![at("p", vec![v("X")]), at("q", vec![v("X")])]));
        assert_eq!(qe_transform(&both).unwrap().rule, QeRule::UniversalConjunction);

        let ex = Formula::exists("X", at("p", vec![v("X")]));
        assert_eq!(qe_transform(&ex).unwrap().rule, QeRule::ExistentialOnly);

        assert!(qe_transform(&Formula::forall("X", Formula::not(at("p", vec![v("X")])))).is_err());
    }
}
