//! Proof search, Herbrand enumeration and bounded termination analyses.

mod herbrand;
mod search;
mod termination;
mod tree;

pub use herbrand::{herbrand_enumerate, herbrand_rounds, herbrand_universe, HerbrandModel};
pub use search::{
    check_substitution_stability, prove, solve, Answer, Budget, ProveResult, Search, SearchStats, SolveResult,
    UnknownReason, Verdict,
};
pub use termination::{
    check_cycle_free, check_operational_termination, check_operational_termination_from, CycleReport, LoopKind,
    LoopWitness, TerminationReport,
};
pub use tree::{ProofNode, ProofTree};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("the function signature has no constant, so there are no ground terms")]
    NoConstant,
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{0}` has arity {1}, expected a binary predicate")]
    NotBinary(String, usize),
}

#[cfg(test)]
pub(crate) const EXAMPLE_FOR_TESTS: &str = "\
func 0/0, s/1.
pred geq/2, odd/1, peven/1, zero/1.
mu_bottom.
clause geq(X, 0).
clause geq(s(X), s(Y)) :- geq(X, Y).
clause peven(X) :- X ->* s(s(0)).
clause odd(X) :- X ->* s(0).
clause zero(X) :- X ->* 0.
rule s(s(X)) -> X :- geq(X, s(0)).
";
