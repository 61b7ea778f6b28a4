//! Concrete syntax for system specifications (`.eis`) and formulas (`.fof`).
//!
//! The grammar is documented in `docs/syntax.md`.

mod lexer;
mod parser;
mod printer;

use indexmap::IndexMap;
use serde::Serialize;

use crate::diagnostic::{Diagnostic, DiagnosticList};
use crate::system::{compile_gtrs, Clause, Eis, Gtrs, InferenceRule, ReplacementMap, RewriteRule, Signature};

pub use parser::{check_formula, parse_atom, parse_formula, parse_formula_checked, parse_formula_file, parse_spec, parse_term};
pub use printer::{print_formula, print_spec};

/// Names that cannot be declared because the formula language uses them.
pub const RESERVED_NAMES: [&str; 4] = ["forall", "exists", "true", "false"];

/// Parse and validation failures, sorted by source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", DiagnosticList(.diagnostics))]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

/// A parsed `.eis` document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecDocument {
    pub name: Option<String>,
    /// Declared function symbols in declaration order.
    pub functions: IndexMap<String, usize>,
    /// Declared predicate symbols; `->` and `->*` are implicit and not listed.
    pub predicates: IndexMap<String, usize>,
    pub body: SpecBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum SpecBody {
    Gtrs { replacement_map: ReplacementMap, clauses: Vec<Clause>, rules: Vec<RewriteRule> },
    Eis { rules: Vec<InferenceRule> },
}

impl SpecDocument {
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (f, &n) in &self.functions {
            sig = sig.with_function(f, n);
        }
        for (p, &n) in &self.predicates {
            sig = sig.with_predicate(p, n);
        }
        sig.with_rewriting()
    }

    pub fn gtrs(&self) -> Option<Gtrs> {
        match &self.body {
            SpecBody::Gtrs { replacement_map, clauses, rules } => Some(Gtrs {
                signature: self.signature(),
                replacement_map: replacement_map.clone(),
                clauses: clauses.clone(),
                rules: rules.clone(),
            }),
            SpecBody::Eis { .. } => None,
        }
    }

    /// The inference system described by the document, compiling the GTRS
    /// form when needed.
    pub fn eis(&self) -> Eis {
        match &self.body {
            SpecBody::Gtrs { .. } => compile_gtrs(&self.gtrs().unwrap()),
            SpecBody::Eis { rules } => Eis { signature: self.signature(), rules: rules.clone() },
        }
    }

    /// A document for an in-memory GTRS. `->` and `->*` are dropped from the
    /// predicate list since they are implicit.
    pub fn from_gtrs(name: Option<String>, g: &Gtrs) -> Self {
        let (functions, predicates) = split_signature(&g.signature);
        SpecDocument {
            name,
            functions,
            predicates,
            body: SpecBody::Gtrs {
                replacement_map: g.replacement_map.clone(),
                clauses: g.clauses.clone(),
                rules: g.rules.clone(),
            },
        }
    }

    pub fn from_eis(name: Option<String>, e: &Eis) -> Self {
        let (functions, predicates) = split_signature(&e.signature);
        SpecDocument { name, functions, predicates, body: SpecBody::Eis { rules: e.rules.clone() } }
    }
}

fn split_signature(sig: &Signature) -> (IndexMap<String, usize>, IndexMap<String, usize>) {
    let predicates = sig
        .predicates
        .iter()
        .filter(|(p, _)| !crate::term::is_rewrite_predicate(p))
        .map(|(p, n)| (p.clone(), *n))
        .collect();
    (sig.functions.clone(), predicates)
}
