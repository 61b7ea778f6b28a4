//! Elementary inference systems and generalized term rewriting systems:
//! proof search, Herbrand enumeration, formula classification, finite
//! countermodels and export to first-order provers.

pub mod diagnostic;
pub mod export;
pub mod formula;
pub mod model;
pub mod proof;
pub mod property;
pub mod subst;
pub mod syntax;
pub mod system;
pub mod term;

pub use diagnostic::{Diagnostic, Position};
pub use export::{emit_p9, emit_tptp, read_p9, read_tptp, ExportFormat, ExportJob, GoalMode};
pub use formula::{classify, qe_transform, Formula, FormulaClass};
pub use model::{find_countermodel, FiniteStructure, SuhAxiom, Target};
pub use proof::{prove, solve, Budget, ProofTree, Verdict};
pub use property::{check_property, PropertyQuery, PropertyVerdict};
pub use subst::Substitution;
pub use system::{Clause, Eis, Gtrs, HornSentence, InferenceRule, ReplacementMap, RewriteRule, RuleLabel, Signature};
pub use term::{Atom, Symbol, SymbolKind, Term};
pub use syntax::{parse_formula, parse_spec, ParseError, SpecDocument};
