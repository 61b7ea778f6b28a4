use std::fmt;

use serde::Serialize;

use super::normal::{flatten, prenex, Prefix, Quantifier};
use super::Formula;

/// Syntactic classes of sentences, most specific first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaClass {
    /// Existentially closed boolean combination of atoms: a positive
    /// matrix under existential quantifiers only.
    Ecbca,
    /// Positive prenex sentence whose matrix has no disjunction.
    AndPositive,
    Positive,
    General,
}

impl fmt::Display for FormulaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FormulaClass::Ecbca => "ecbca",
            FormulaClass::AndPositive => "and-positive",
            FormulaClass::Positive => "positive",
            FormulaClass::General => "general",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: FormulaClass,
    pub prefix: Prefix,
    /// Flattened quantifier-free matrix of the prenex form.
    pub matrix: Formula,
    /// Set when the class is `General`.
    pub reason: Option<String>,
}

impl Classification {
    pub fn universal(&self) -> Vec<String> {
        self.vars_of(Quantifier::Forall)
    }

    pub fn existential(&self) -> Vec<String> {
        self.vars_of(Quantifier::Exists)
    }

    fn vars_of(&self, q: Quantifier) -> Vec<String> {
        self.prefix.iter().filter(|(p, _)| *p == q).map(|(_, v)| v.clone()).collect()
    }

    /// The prenex sentence `prefix. matrix`.
    pub fn normalized(&self) -> Formula {
        super::normal::close(&self.prefix, self.matrix.clone())
    }
}

fn positive_matrix(f: &Formula) -> Result<(), String> {
    match f {
        Formula::Atom(_) => Ok(()),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().try_for_each(positive_matrix),
        Formula::Equal(..) => Err("equality is not allowed in a positive matrix".into()),
        Formula::Not(_) => Err("negation is not allowed in a positive matrix".into()),
        other => Err(format!("unexpected connective in matrix: {other}")),
    }
}

fn has_disjunction(f: &Formula) -> bool {
    match f {
        Formula::Or(xs) if xs.len() != 1 => true,
        Formula::And(xs) | Formula::Or(xs) => xs.iter().any(has_disjunction),
        _ => false,
    }
}

/// Classifies a sentence after normalising it to prenex negation normal form.
pub fn classify(f: &Formula) -> Classification {
    let (prefix, matrix) = prenex(f);
    let matrix = flatten(&matrix);
    let free = f.free_vars();
    let reason = if !free.is_empty() {
        Some(format!("free variables: {}", free.join(", ")))
    } else {
        positive_matrix(&matrix).err()
    };
    let class = if reason.is_some() {
        FormulaClass::General
    } else if prefix.iter().all(|(q, _)| *q == Quantifier::Exists) {
        FormulaClass::Ecbca
    } else if !has_disjunction(&matrix) {
        FormulaClass::AndPositive
    } else {
        FormulaClass::Positive
    };
    Classification { class, prefix, matrix, reason }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{Atom, Term};

    fn p(name: &str, args: &[&str]) -> Formula {
        Formula::Atom(Atom::new(name, args.iter().map(|a| Term::var(*a)).collect()))
    }

    #[test]
    fn classes() {
        let tri = Formula::forall("X", Formula::Or(vec![p("peven", &["X"]), p("odd", &["X"]), p("zero", &["X"])]));
        assert_eq!(classify(&tri).class, FormulaClass::Positive);

        let red = Formula::forall("X", Formula::exists("Z", p("r", &["X", "Z"])));
        let c = classify(&red);
        assert_eq!(c.class, FormulaClass::AndPositive);
        assert_eq!(c.universal(), vec!["X"]);
        assert_eq!(c.existential(), vec!["Z"]);

        let cyc = Formula::exists("X", p("r", &["X", "X"]));
        assert_eq!(classify(&cyc).class, FormulaClass::Ecbca);

        let neg = Formula::forall("X", Formula::not(p("q", &["X"])));
        let c = classify(&neg);
        assert_eq!(c.class, FormulaClass::General);
        assert!(c.reason.unwrap().contains("negation"));

        let open = p("q", &["X"]);
        assert_eq!(classify(&open).class, FormulaClass::General);
    }

    #[test]
    fn double_negation_is_positive() {
        let f = Formula::forall("X", Formula::not(Formula::not(p("q", &["X"]))));
        assert_eq!(classify(&f).class, FormulaClass::AndPositive);
    }
}
