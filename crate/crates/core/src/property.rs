//! Checking a sentence against the ground or grounded canonical model:
//! witness search for existential sentences, quantifier elimination for the
//! grounded model, and countermodel search for the rest.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::formula::{classify, qe_transform, Classification, Formula, FormulaClass, QeResult};
use crate::formula::{Direction, QeRule};
use crate::model::{CountermodelOutcome, CountermodelSearch, ModelError, Route, SuhAxiom, Target};
use crate::proof::{Answer, Budget, Search, UnknownReason};
use crate::system::{theory_of, Eis, InferenceRule, RuleLabel};
use crate::term::{Atom, Term};

/// Name of the auxiliary predicate used to pose a conjunction as one goal.
/// It cannot be written in concrete syntax, so it never clashes.
pub const QUERY_PREDICATE: &str = "?query";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Index of the satisfied disjunct of the matrix in disjunctive normal
    /// form.
    pub disjunct: usize,
    #[serde(serialize_with = "atoms_text")]
    pub atoms: Vec<Atom>,
    pub answer: Answer,
}

fn atoms_text<S: Serializer>(a: &[Atom], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(a.iter().map(|x| x.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSearch {
    pub witness: Option<Witness>,
    /// No disjunct has an instance with a closed proof tree.
    pub exhausted: bool,
    pub stopped: Option<UnknownReason>,
    pub nodes: u64,
}

/// Looks for an instance of an existential positive sentence
/// `∃x̄. ∨_i ∧_j A_ij` with closed proof trees for all atoms of one
/// disjunct. Disjuncts are tried in order, sharing the node budget.
pub fn witness_search(e: &Eis, f: &Formula, budget: &Budget, parallel: bool) -> WitnessSearch {
    let c = classify(f);
    let vars = c.existential();
    let disjuncts = crate::formula::normal::dnf(&c.matrix);
    let mut nodes = 0;
    let mut exhausted = true;
    let mut stopped = None;
    for (i, conj) in disjuncts.iter().enumerate() {
        let atoms: Vec<Atom> = conj
            .iter()
            .map(|l| match l {
                Formula::Atom(a) => a.clone(),
                other => panic!("witness search on a non-atomic literal {other}"),
            })
            .collect();
        let mut local: Vec<String> = Vec::new();
        for a in &atoms {
            for v in a.vars() {
                if vars.contains(&v) && !local.contains(&v) {
                    local.push(v);
                }
            }
        }
        let b = Budget { max_nodes: budget.max_nodes - nodes, ..*budget };
        let search = Search { budget: b, parallel };
        let (ext, goal) = with_query(e, &atoms, &local);
        let r = search.solve(&ext, &goal, &local, 1);
        nodes += r.stats.nodes;
        if let Some(mut answer) = r.answers.into_iter().next() {
            if atoms.len() == 1 {
                answer.tree = answer.tree.children()[0].clone();
            }
            let witness = Witness { disjunct: i, atoms, answer };
            return WitnessSearch { witness: Some(witness), exhausted: false, stopped: None, nodes };
        }
        if !r.exhausted {
            exhausted = false;
            stopped = stopped.or(r.stopped);
        }
        if matches!(r.stopped, Some(UnknownReason::NodeBudget | UnknownReason::Deadline)) || nodes >= budget.max_nodes {
            exhausted = false;
            stopped = r.stopped.or(Some(UnknownReason::NodeBudget));
            break;
        }
    }
    WitnessSearch { witness: None, exhausted, stopped, nodes }
}

fn with_query(e: &Eis, atoms: &[Atom], vars: &[String]) -> (Eis, Atom) {
    let mut ext = e.clone();
    let goal = Atom::new(QUERY_PREDICATE, vars.iter().map(Term::var).collect());
    ext.signature.predicates.insert(QUERY_PREDICATE.to_string(), vars.len());
    ext.rules.push(InferenceRule::new(RuleLabel::Named("query".into()), atoms.to_vec(), goal.clone()));
    (ext, goal)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyVerdict {
    Proved,
    Disproved,
    CountermodelFound,
    NoCountermodelUpToBound,
    Unknown,
}

impl PropertyVerdict {
    pub fn name(self) -> &'static str {
        match self {
            PropertyVerdict::Proved => "proved",
            PropertyVerdict::Disproved => "disproved",
            PropertyVerdict::CountermodelFound => "countermodel-found",
            PropertyVerdict::NoCountermodelUpToBound => "no-countermodel-up-to-bound",
            PropertyVerdict::Unknown => "unknown",
        }
    }
}

/// The reasoning step behind a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// Closed proof trees for an instance of the matrix.
    Witness,
    /// A ground witness of an ECBCA holds in the ground model and hence in
    /// the grounded one.
    GroundWitnessTransfer,
    /// Every attempt to prove an instance of the matrix failed finitely.
    ExhaustiveWitnessSearch,
    QuantifierElimination { rule: QeRule, direction: Direction, then: Box<Justification> },
    Countermodel { route: Route, target: Target },
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Witness => write!(f, "witness: closed proof trees for an instance"),
            Justification::GroundWitnessTransfer => {
                write!(f, "ecbca transfer: a ground witness holds in the ground and grounded models")
            }
            Justification::ExhaustiveWitnessSearch => write!(f, "exhaustive witness search: no instance is provable"),
            Justification::QuantifierElimination { rule, direction, then } => {
                write!(f, "quantifier elimination ({rule}, {direction}); {then}")
            }
            Justification::Countermodel { route, target } => {
                write!(f, "certified finite countermodel ({route} route, {target} model)")
            }
        }
    }
}

impl Serialize for Justification {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug)]
pub struct PropertyQuery {
    pub formula: Formula,
    pub target: Target,
    pub suh: Option<SuhAxiom>,
    pub budget: Budget,
    pub max_domain: usize,
    pub max_candidates: u64,
    pub parallel: bool,
}

impl PropertyQuery {
    pub fn new(formula: Formula, target: Target) -> Self {
        PropertyQuery {
            formula,
            target,
            suh: None,
            budget: Budget::default(),
            max_domain: 4,
            max_candidates: 1_000_000,
            parallel: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyOutcome {
    pub verdict: PropertyVerdict,
    pub justification: Option<Justification>,
    pub class: FormulaClass,
    #[serde(serialize_with = "formula_text")]
    pub normalized: Formula,
    pub qe: Option<QeResult>,
    pub witness_search: Option<WitnessSearch>,
    pub countermodel: Option<CountermodelOutcome>,
}

fn formula_text<S: Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PropertyError {
    #[error("not a sentence: free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("unsupported formula: {0}")]
    Unsupported(String),
    #[error("grounded constants {0:?} are not interpreted by the ground model; use the grounded target")]
    GroundedInGroundTarget(Vec<String>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Classifies the sentence and runs, in order: witness search for ECBCAs,
/// quantifier elimination plus witness search for the grounded target, and
/// finite countermodel search.
pub fn check_property(e: &Eis, q: &PropertyQuery) -> Result<PropertyOutcome, PropertyError> {
    let f = &q.formula;
    if !f.is_sentence() {
        return Err(PropertyError::NotASentence(f.free_vars()));
    }
    let c: Classification = classify(f);
    if c.class == FormulaClass::General {
        return Err(PropertyError::Unsupported(c.reason.clone().unwrap_or_else(|| "not positive".into())));
    }
    let k = f.grounded_constants();
    if q.target == Target::Ground && !k.is_empty() {
        return Err(PropertyError::GroundedInGroundTarget(k.into_iter().collect()));
    }
    let mut out = PropertyOutcome {
        verdict: PropertyVerdict::Unknown,
        justification: None,
        class: c.class,
        normalized: c.normalized(),
        qe: None,
        witness_search: None,
        countermodel: None,
    };
    let budget = q.budget;
    if c.class == FormulaClass::Ecbca {
        let w = witness_search(e, f, &budget, q.parallel);
        if let Some(found) = &w.witness {
            let ground = found.answer.substitution.iter().all(|(_, t)| t.is_ground() && t.grounded_constants().is_empty());
            out.verdict = PropertyVerdict::Proved;
            out.justification = Some(if q.target == Target::Grounded && k.is_empty() && ground {
                Justification::GroundWitnessTransfer
            } else {
                Justification::Witness
            });
        } else if w.exhausted {
            out.verdict = PropertyVerdict::Disproved;
            out.justification = Some(Justification::ExhaustiveWitnessSearch);
        }
        out.witness_search = Some(w);
    } else if q.target == Target::Grounded {
        let qe = qe_transform(f).map_err(|e| PropertyError::Unsupported(e.to_string()))?;
        let w = witness_search(e, &qe.target, &budget, q.parallel);
        let step = |then| Justification::QuantifierElimination { rule: qe.rule, direction: qe.direction, then: Box::new(then) };
        if w.witness.is_some() && qe.direction.target_proves_source() {
            out.verdict = PropertyVerdict::Proved;
            out.justification = Some(step(Justification::Witness));
        } else if w.witness.is_none() && w.exhausted && qe.direction.target_refutes_source() {
            out.verdict = PropertyVerdict::Disproved;
            out.justification = Some(step(Justification::ExhaustiveWitnessSearch));
        }
        out.witness_search = Some(w);
        out.qe = Some(qe);
    }
    if out.verdict != PropertyVerdict::Unknown {
        return Ok(out);
    }
    let theory = theory_of(e);
    let search = CountermodelSearch {
        signature: &e.signature,
        theory: &theory,
        max_domain: q.max_domain,
        max_candidates: q.max_candidates,
        parallel: q.parallel,
    };
    let outcome = search.find(f, q.target, q.suh.as_ref())?;
    match &outcome {
        CountermodelOutcome::Found(m) if m.certified => {
            out.verdict = PropertyVerdict::CountermodelFound;
            out.justification = Some(Justification::Countermodel { route: m.route, target: q.target });
        }
        CountermodelOutcome::Found(_) => {}
        _ => out.verdict = PropertyVerdict::NoCountermodelUpToBound,
    }
    out.countermodel = Some(outcome);
    Ok(out)
}
