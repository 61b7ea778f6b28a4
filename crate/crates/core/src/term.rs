//! First-order terms and atoms.
//!
//! Variables that have been grounded (`c_x` in the usual notation) are a
//! separate term variant rather than a naming convention on constants, so
//! that ungrounding is total and cannot capture a user constant that happens
//! to be spelled like a grounded one.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Name of the one-step rewriting predicate `->`.
pub const REWRITE: &str = "->";
/// Name of the many-step rewriting predicate `->*`.
pub const REWRITES: &str = "->*";

/// The three kinds of symbols that can appear in a signature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    Function,
    Predicate,
    GroundedVariable,
}

/// A declared symbol. `(name, kind)` identifies it within a signature.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn function(name: impl Into<String>, arity: usize) -> Self {
        Symbol { name: name.into(), arity, kind: SymbolKind::Function }
    }

    pub fn predicate(name: impl Into<String>, arity: usize) -> Self {
        Symbol { name: name.into(), arity, kind: SymbolKind::Predicate }
    }

    /// The constant `c_v` standing for variable `v`.
    pub fn grounded(var: impl Into<String>) -> Self {
        Symbol { name: var.into(), arity: 0, kind: SymbolKind::GroundedVariable }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
    /// The grounded constant `c_v` for variable `v`, written `%v`.
    Grounded(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn grounded(var: impl Into<String>) -> Self {
        Term::Grounded(var.into())
    }

    /// `f(f(...f(base)))` with `n` applications of the unary symbol `f`.
    pub fn iterate(f: &str, n: usize, base: Term) -> Self {
        (0..n).fold(base, |t, _| Term::App(f.to_string(), vec![t]))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    /// A term is ground iff it contains no `Var` node. Grounded constants
    /// count as ground.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Grounded(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Height of the term: constants, variables and grounded constants have
    /// depth 0, `f(t1..tn)` has depth `1 + max depth(ti)`.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Grounded(_) => 0,
            Term::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Grounded(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn occurs(&self, var: &str) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Grounded(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|o| o == v) {
                    out.push(v.clone());
                }
            }
            Term::Grounded(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub(crate) fn collect_grounded(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(_) => {}
            Term::Grounded(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_grounded(out)),
        }
    }

    pub(crate) fn collect_functions(&self, out: &mut Vec<(String, usize)>) {
        if let Term::App(f, args) = self {
            if !out.iter().any(|(g, n)| g == f && *n == args.len()) {
                out.push((f.clone(), args.len()));
            }
            args.iter().for_each(|a| a.collect_functions(out));
        }
    }

    /// Grounded constants occurring in the term.
    pub fn grounded_constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_grounded(&mut out);
        out
    }

    /// `t↓`: every variable `x` becomes the grounded constant `c_x`.
    pub fn ground_down(&self) -> Term {
        match self {
            Term::Var(v) => Term::Grounded(v.clone()),
            Term::Grounded(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(Term::ground_down).collect()),
        }
    }

    /// `t↑`: every grounded constant `c_x` becomes the variable `x`.
    pub fn ground_up(&self) -> Term {
        match self {
            Term::Grounded(v) => Term::Var(v.clone()),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(Term::ground_up).collect()),
        }
    }

    /// Grounds only the variables in `vars` (`t↓_V`).
    pub fn ground_some(&self, vars: &BTreeSet<String>) -> Term {
        match self {
            Term::Var(v) if vars.contains(v) => Term::Grounded(v.clone()),
            Term::Var(_) | Term::Grounded(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.ground_some(vars)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Grounded(v) => write!(f, "%{v}"),
            Term::App(name, args) => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// `P(t1, ..., tn)`; the rewriting predicates are ordinary binary predicates
/// named [`REWRITE`] and [`REWRITES`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn rewrite(lhs: Term, rhs: Term) -> Self {
        Atom::new(REWRITE, vec![lhs, rhs])
    }

    pub fn rewrites(lhs: Term, rhs: Term) -> Self {
        Atom::new(REWRITES, vec![lhs, rhs])
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn is_rewrite_atom(&self) -> bool {
        is_rewrite_predicate(&self.pred) && self.args.len() == 2
    }

    /// Maximum depth over the arguments.
    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub(crate) fn collect_vars(&self, out: &mut Vec<String>) {
        self.args.iter().for_each(|a| a.collect_vars(out));
    }

    pub fn grounded_constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.args.iter().for_each(|a| a.collect_grounded(&mut out));
        out
    }

    pub fn ground_down(&self) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(Term::ground_down).collect() }
    }

    pub fn ground_up(&self) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(Term::ground_up).collect() }
    }

    pub fn ground_some(&self, vars: &BTreeSet<String>) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.ground_some(vars)).collect() }
    }
}

pub fn is_rewrite_predicate(name: &str) -> bool {
    name == REWRITE || name == REWRITES
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rewrite_atom() {
            return write!(f, "{} {} {}", self.args[0], self.pred, self.args[1]);
        }
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}
