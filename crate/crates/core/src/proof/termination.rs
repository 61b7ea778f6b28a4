//! Bounded cycle detection and loop search for operational termination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::herbrand::herbrand_enumerate;
use super::search::{Branch, Budget, Prepared, UnknownReason};
use super::AnalysisError;
use crate::system::Eis;
use crate::term::{Atom, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CycleReport {
    /// `path[0] -> path[1] -> ... -> path[n]` with `path[n] = path[0]`.
    CycleFound { path: Vec<String> },
    NoCycleUpToBound {
        term_depth: usize,
        edges: usize,
        /// The enumeration of the step relation reached its fixpoint.
        saturated: bool,
    },
}

/// Looks for a cycle in the graph of the binary predicate `pred` over the
/// ground facts of depth at most `term_depth`.
pub fn check_cycle_free(e: &Eis, pred: &str, term_depth: usize, budget: &Budget) -> Result<CycleReport, AnalysisError> {
    match e.signature.predicate_arity(pred) {
        None => return Err(AnalysisError::UnknownPredicate(pred.to_string())),
        Some(2) => {}
        Some(n) => return Err(AnalysisError::NotBinary(pred.to_string(), n)),
    }
    let model = herbrand_enumerate(e, term_depth, budget)?;
    let mut graph: BTreeMap<&Term, Vec<&Term>> = BTreeMap::new();
    let mut edges = 0;
    for a in model.facts_of(pred) {
        graph.entry(&a.args[0]).or_default().push(&a.args[1]);
        graph.entry(&a.args[1]).or_default();
        edges += 1;
    }
    match find_cycle(&graph) {
        Some(path) => Ok(CycleReport::CycleFound { path: path.iter().map(|t| t.to_string()).collect() }),
        None => Ok(CycleReport::NoCycleUpToBound { term_depth, edges, saturated: model.saturated }),
    }
}

fn find_cycle<'a>(graph: &BTreeMap<&'a Term, Vec<&'a Term>>) -> Option<Vec<&'a Term>> {
    // 0 unvisited, 1 on the current path, 2 finished
    let mut state: BTreeMap<&Term, u8> = BTreeMap::new();
    for &start in graph.keys() {
        if state.get(start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut path: Vec<&Term> = vec![start];
        let mut next: Vec<usize> = vec![0];
        state.insert(start, 1);
        while let Some(&node) = path.last() {
            let i = next.last_mut().unwrap();
            let succ = &graph[node];
            if *i < succ.len() {
                let m = succ[*i];
                *i += 1;
                match state.get(m).copied().unwrap_or(0) {
                    0 => {
                        state.insert(m, 1);
                        path.push(m);
                        next.push(0);
                    }
                    1 => {
                        let from = path.iter().position(|&t| t == m).unwrap();
                        let mut cycle: Vec<&Term> = path[from..].to_vec();
                        cycle.push(m);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state.insert(node, 2);
                path.pop();
                next.pop();
            }
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopKind {
    /// The goal is a renaming of an ancestor.
    Variant,
    /// The goal is an instance of an ancestor, so the derivation from the
    /// ancestor can be replayed forever.
    Instance,
    /// An ancestor is an instance of the goal. Heuristic: this does not
    /// guarantee an infinite well-formed tree.
    Subsumption,
}

impl LoopKind {
    pub fn is_sound(self) -> bool {
        !matches!(self, LoopKind::Subsumption)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoopWitness {
    pub kind: LoopKind,
    /// The goal the exploration started from, as instantiated at the end.
    #[serde(serialize_with = "atom_text")]
    pub root: Atom,
    /// Goals from the repeated ancestor down to the current goal.
    #[serde(serialize_with = "atoms_text")]
    pub trace: Vec<Atom>,
}

fn atom_text<S: serde::Serializer>(a: &Atom, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(a)
}

fn atoms_text<S: serde::Serializer>(a: &[Atom], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(a.iter().map(|x| x.to_string()))
}

impl fmt::Display for LoopWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let chain: Vec<String> = self.trace.iter().map(|a| a.to_string()).collect();
        write!(f, "{:?} loop from {}: {}", self.kind, self.root, chain.join("  ==>  "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum TerminationReport {
    LoopWitness(LoopWitness),
    /// Not a termination proof.
    NoLoopFoundUpToBudget {
        nodes: u64,
        /// Every well-formed tree from the explored goals was finite and
        /// within the depth bound.
        explored_completely: bool,
        stopped: Option<UnknownReason>,
    },
}

/// Explores well-formed trees for `P(X1, ..., Xn)` for every predicate `P`
/// and reports the first goal that repeats one of its ancestors.
pub fn check_operational_termination(e: &Eis, budget: &Budget, subsumption: bool) -> TerminationReport {
    let roots: Vec<Atom> = e
        .signature
        .predicates
        .iter()
        .map(|(p, &n)| Atom::new(p.clone(), (1..=n).map(|i| Term::var(format!("X{i}"))).collect()))
        .collect();
    check_operational_termination_from(e, &roots, budget, subsumption)
}

pub fn check_operational_termination_from(
    e: &Eis,
    roots: &[Atom],
    budget: &Budget,
    subsumption: bool,
) -> TerminationReport {
    let prepared = Prepared::new(e);
    let mut nodes = 0;
    let mut complete = true;
    let preds: BTreeSet<&str> = e.rules.iter().map(|r| r.conclusion.pred.as_str()).collect();
    for root in roots {
        if !preds.contains(root.pred.as_str()) {
            continue;
        }
        let mut b = Branch::explorer(&prepared, root, budget.max_depth.max(1), budget.max_nodes - nodes, subsumption);
        b.run(None);
        nodes += b.nodes().min(budget.max_nodes - nodes);
        if let Some(w) = b.witness.take() {
            return TerminationReport::LoopWitness(w);
        }
        complete &= !b.was_cut();
        if let Some(reason) = b.halted() {
            return TerminationReport::NoLoopFoundUpToBudget { nodes, explored_completely: false, stopped: Some(reason) };
        }
    }
    let stopped = (!complete).then_some(UnknownReason::DepthBound);
    TerminationReport::NoLoopFoundUpToBudget { nodes, explored_completely: complete, stopped }
}
