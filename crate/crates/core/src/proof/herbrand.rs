//! Bottom-up enumeration of the canonical Herbrand model.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::search::{Budget, UnknownReason};
use super::AnalysisError;
use crate::subst::{match_atom, Substitution};
use crate::system::{Eis, InferenceRule, Signature};
use crate::term::{Atom, Term};

/// Ground atoms derived within a term-depth bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HerbrandModel {
    pub term_depth: usize,
    pub facts: BTreeSet<Atom>,
    /// One more round of rule applications adds nothing.
    pub saturated: bool,
    pub iterations: usize,
    /// Set when the universe or fact count hit `Budget::max_nodes`.
    pub stopped: Option<UnknownReason>,
}

impl HerbrandModel {
    pub fn contains(&self, a: &Atom) -> bool {
        self.facts.contains(a)
    }

    pub fn facts_of<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a Atom> + 'a {
        self.facts.iter().filter(move |a| a.pred == pred)
    }
}

/// Ground terms over the function symbols of `sig` with depth at most
/// `depth`, or `None` if there are more than `cap`.
pub fn herbrand_universe(sig: &Signature, depth: usize, cap: u64) -> Result<Option<BTreeSet<Term>>, AnalysisError> {
    if !sig.has_constant() {
        return Err(AnalysisError::NoConstant);
    }
    let mut terms: BTreeSet<Term> = sig.constants().map(|c| Term::constant(c.clone())).collect();
    for _ in 0..depth {
        let prev: Vec<Term> = terms.iter().cloned().collect();
        for (f, &n) in &sig.functions {
            if n == 0 {
                continue;
            }
            let mut idx = vec![0usize; n];
            loop {
                terms.insert(Term::app(f.clone(), idx.iter().map(|&i| prev[i].clone()).collect()));
                if terms.len() as u64 > cap {
                    return Ok(None);
                }
                if !advance(&mut idx, prev.len()) {
                    break;
                }
            }
        }
    }
    Ok(Some(terms))
}

/// Odometer increment; false once every combination has been produced.
pub(crate) fn advance(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Least fixpoint of the immediate-consequence step restricted to atoms
/// whose arguments have depth at most `term_depth`.
pub fn herbrand_enumerate(e: &Eis, term_depth: usize, budget: &Budget) -> Result<HerbrandModel, AnalysisError> {
    herbrand_rounds(e, term_depth, usize::MAX, budget)
}

/// At most `rounds` applications of the immediate-consequence step.
pub fn herbrand_rounds(e: &Eis, term_depth: usize, rounds: usize, budget: &Budget) -> Result<HerbrandModel, AnalysisError> {
    let stopped_model = |facts, iterations| HerbrandModel {
        term_depth,
        facts,
        saturated: false,
        iterations,
        stopped: Some(UnknownReason::NodeBudget),
    };
    let Some(universe) = herbrand_universe(&e.signature, term_depth, budget.max_nodes)? else {
        return Ok(stopped_model(BTreeSet::new(), 0));
    };
    let universe: Vec<Term> = universe.into_iter().collect();
    let rule_vars: Vec<Vec<String>> = e.rules.iter().map(InferenceRule::vars).collect();
    let mut facts: BTreeSet<Atom> = BTreeSet::new();
    let mut iterations = 0;
    while iterations < rounds {
        let mut index: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
        for f in &facts {
            index.entry(f.pred.as_str()).or_default().push(f);
        }
        let mut new = BTreeSet::new();
        for (rule, vars) in e.rules.iter().zip(&rule_vars) {
            let mut matches = Vec::new();
            join(&rule.premises, &index, Substitution::new(), &mut matches);
            for s in matches {
                let free: Vec<&String> = vars.iter().filter(|v| s.get(v).is_none()).collect();
                let mut idx = vec![0usize; free.len()];
                loop {
                    let mut full = s.clone();
                    for (v, &i) in free.iter().zip(&idx) {
                        full.insert((*v).clone(), universe[i].clone());
                    }
                    let head = full.apply_atom(&rule.conclusion);
                    if head.depth() <= term_depth && !facts.contains(&head) {
                        new.insert(head);
                    }
                    if free.is_empty() || !advance(&mut idx, universe.len()) {
                        break;
                    }
                }
            }
        }
        iterations += 1;
        if new.is_empty() {
            return Ok(HerbrandModel { term_depth, facts, saturated: true, iterations, stopped: None });
        }
        facts.extend(new);
        if facts.len() as u64 > budget.max_nodes {
            return Ok(stopped_model(facts, iterations));
        }
    }
    Ok(HerbrandModel { term_depth, facts, saturated: false, iterations, stopped: None })
}

fn join(premises: &[Atom], index: &BTreeMap<&str, Vec<&Atom>>, s: Substitution, out: &mut Vec<Substitution>) {
    let Some((first, rest)) = premises.split_first() else {
        out.push(s);
        return;
    };
    let pattern = s.apply_atom(first);
    for fact in index.get(pattern.pred.as_str()).into_iter().flatten() {
        if let Some(m) = match_atom(&pattern, fact) {
            let mut next = s.clone();
            for (v, t) in m.iter() {
                next.insert(v.clone(), t.clone());
            }
            join(rest, index, next, out);
        }
    }
}
