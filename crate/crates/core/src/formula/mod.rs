//! First-order formulas over atoms and equality.

mod classify;
pub(crate) mod normal;
mod qe;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Atom, Term};

pub use classify::{classify, Classification, FormulaClass};
pub use normal::{negate_nnf, nnf, prenex, Prefix, Quantifier};
pub use qe::{partial_ground, qe_transform, Direction, QeResult, QeRule};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom(Atom),
    Equal(Term, Term),
    Not(Box<Formula>),
    /// The empty conjunction is `true`.
    And(Vec<Formula>),
    /// The empty disjunction is `false`.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("variable `{0}` is existentially quantified and cannot be grounded")]
    ExistentialGrounding(String),
    #[error("formula is not a sentence; free variables: {0:?}")]
    NotASentence(Vec<String>),
    #[error("quantifier elimination needs a positive prenex formula, got {0}")]
    NotPositive(String),
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    pub fn top() -> Self {
        Formula::And(Vec::new())
    }

    pub fn bottom() -> Self {
        Formula::Or(Vec::new())
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    /// Conjunction that collapses the single-element case.
    pub fn and(mut xs: Vec<Formula>) -> Self {
        if xs.len() == 1 {
            xs.pop().unwrap()
        } else {
            Formula::And(xs)
        }
    }

    /// Disjunction that collapses the single-element case.
    pub fn or(mut xs: Vec<Formula>) -> Self {
        if xs.len() == 1 {
            xs.pop().unwrap()
        } else {
            Formula::Or(xs)
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let push_term = |t: &Term, out: &mut Vec<String>| {
            for v in t.vars() {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Atom(a) => a.args.iter().for_each(|t| push_term(t, out)),
            Formula::Equal(l, r) => {
                push_term(l, out);
                push_term(r, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.collect_free(bound, out)),
            Formula::Implies(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                bound.push(v.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => out.extend(a.vars()),
            Formula::Equal(l, r) => {
                out.extend(l.vars());
                out.extend(r.vars());
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    pub fn grounded_constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => out.extend(a.grounded_constants()),
            Formula::Equal(l, r) => {
                out.extend(l.grounded_constants());
                out.extend(r.grounded_constants());
            }
            _ => {}
        });
        out
    }

    /// Function symbols with arities, in order of first occurrence.
    pub fn functions(&self) -> Vec<(String, usize)> {
        let mut out = Vec::new();
        self.visit(&mut |f| match f {
            Formula::Atom(a) => a.args.iter().for_each(|t| t.collect_functions(&mut out)),
            Formula::Equal(l, r) => {
                l.collect_functions(&mut out);
                r.collect_functions(&mut out);
            }
            _ => {}
        });
        out
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, out: &mut Vec<&'a Atom>) {
            match f {
                Formula::Atom(a) => out.push(a),
                Formula::Equal(..) => {}
                Formula::Not(x) => go(x, out),
                Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| go(x, out)),
                Formula::Implies(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                Formula::Forall(_, b) | Formula::Exists(_, b) => go(b, out),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn contains_equality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |f| found |= matches!(f, Formula::Equal(..)));
        found
    }

    /// Pre-order traversal.
    pub fn visit(&self, g: &mut impl FnMut(&Formula)) {
        g(self);
        match self {
            Formula::Atom(_) | Formula::Equal(..) => {}
            Formula::Not(x) => x.visit(g),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.visit(g)),
            Formula::Implies(l, r) => {
                l.visit(g);
                r.visit(g);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.visit(g),
        }
    }

    /// Rewrites every term with `g`, leaving binders untouched.
    pub fn map_terms(&self, g: &impl Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(Atom { pred: a.pred.clone(), args: a.args.iter().map(g).collect() }),
            Formula::Equal(l, r) => Formula::Equal(g(l), g(r)),
            Formula::Not(x) => Formula::not(x.map_terms(g)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.map_terms(g)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.map_terms(g)).collect()),
            Formula::Implies(l, r) => Formula::implies(l.map_terms(g), r.map_terms(g)),
            Formula::Forall(v, b) => Formula::forall(v.clone(), b.map_terms(g)),
            Formula::Exists(v, b) => Formula::exists(v.clone(), b.map_terms(g)),
        }
    }

    /// Replaces the free occurrences of `var` by `replacement`. The
    /// replacement must not contain variables that are bound in `self`.
    pub fn replace_free(&self, var: &str, replacement: &Term) -> Formula {
        let subst = crate::subst::Substitution::singleton(var, replacement.clone());
        match self {
            Formula::Atom(a) => Formula::Atom(subst.apply_atom(a)),
            Formula::Equal(l, r) => Formula::Equal(subst.apply_term(l), subst.apply_term(r)),
            Formula::Not(x) => Formula::not(x.replace_free(var, replacement)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| x.replace_free(var, replacement)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| x.replace_free(var, replacement)).collect()),
            Formula::Implies(l, r) => {
                Formula::implies(l.replace_free(var, replacement), r.replace_free(var, replacement))
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) if v == var => self.clone(),
            Formula::Forall(v, b) => Formula::forall(v.clone(), b.replace_free(var, replacement)),
            Formula::Exists(v, b) => Formula::exists(v.clone(), b.replace_free(var, replacement)),
        }
    }

    pub fn ground_up(&self) -> Formula {
        self.map_terms(&Term::ground_up)
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Forall(..) | Formula::Exists(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(xs) if xs.len() > 1 => 2,
            Formula::And(xs) if xs.len() > 1 => 3,
            Formula::Or(xs) | Formula::And(xs) if xs.len() == 1 => xs[0].precedence(),
            _ => 4,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.precedence() < ctx;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Formula::Atom(a) => write!(f, "{a}")?,
            Formula::Equal(l, r) => write!(f, "{l} = {r}")?,
            Formula::Not(x) => {
                write!(f, "~")?;
                x.fmt_prec(f, 4)?;
            }
            Formula::And(xs) if xs.is_empty() => write!(f, "true")?,
            Formula::Or(xs) if xs.is_empty() => write!(f, "false")?,
            Formula::And(xs) | Formula::Or(xs) if xs.len() == 1 => xs[0].fmt_prec(f, ctx)?,
            Formula::And(xs) => fmt_list(f, xs, " /\\ ", 4)?,
            Formula::Or(xs) => fmt_list(f, xs, " \\/ ", 3)?,
            Formula::Implies(l, r) => {
                l.fmt_prec(f, 2)?;
                write!(f, " => ")?;
                r.fmt_prec(f, 1)?;
            }
            Formula::Forall(..) | Formula::Exists(..) => {
                // Consecutive binders of the same kind share one keyword.
                let universal = matches!(self, Formula::Forall(..));
                write!(f, "{}", if universal { "forall" } else { "exists" })?;
                let mut cur = self;
                loop {
                    match cur {
                        Formula::Forall(v, b) if universal => {
                            write!(f, " {v}")?;
                            cur = b;
                        }
                        Formula::Exists(v, b) if !universal => {
                            write!(f, " {v}")?;
                            cur = b;
                        }
                        _ => break,
                    }
                }
                write!(f, ". ")?;
                cur.fmt_prec(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

fn fmt_list(f: &mut fmt::Formatter<'_>, xs: &[Formula], sep: &str, ctx: u8) -> fmt::Result {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, "{sep}")?;
        }
        x.fmt_prec(f, ctx)?;
    }
    Ok(())
}

/// Concrete syntax; `parse_formula` reads it back.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
