//! Finite structures, least-fixpoint completion of Horn theories and
//! countermodel search for positive sentences.

mod search;
mod structure;

pub use search::{
    check_surjectivity, find_countermodel, least_predicates, select_route, verify_model, Countermodel,
    CountermodelOutcome, CountermodelSearch, Route, SuhAxiom, Target,
};
pub use structure::{cell_index, FiniteStructure, FnKey, Table};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("symbol `{0}` is not interpreted by the structure")]
    MissingSymbol(String),
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("the formula is not positive")]
    NotPositive,
    #[error("not a sentence: free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("the formula is neither an ECBCA nor conjunctive; a SuH axiom (--suh) is required")]
    MissingSuh,
    #[error("grounded constants {0:?} cannot be used against the ground model")]
    GroundedInGroundTarget(Vec<String>),
    #[error("empty SuH term set")]
    EmptySuh,
    #[error("SuH term {0}")]
    SuhTerm(String),
    #[error("{0}")]
    Formula(String),
}
