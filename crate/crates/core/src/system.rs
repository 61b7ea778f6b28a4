//! Elementary inference systems, generalized term rewriting systems, the
//! compilation of the latter into the former, and their Horn theories.

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;
use serde::{Serialize, Serializer};

use crate::diagnostic::Diagnostic;
use crate::formula::Formula;
use crate::term::{is_rewrite_predicate, Atom, Term, REWRITE, REWRITES};

/// Function and predicate symbols with their arities, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub functions: IndexMap<String, usize>,
    pub predicates: IndexMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Self {
        self.functions.insert(name.to_string(), arity);
        self
    }

    pub fn with_predicate(mut self, name: &str, arity: usize) -> Self {
        self.predicates.insert(name.to_string(), arity);
        self
    }

    /// Adds `->` and `->*` in front of the declared predicates if missing.
    pub fn with_rewriting(mut self) -> Self {
        let mut preds = IndexMap::new();
        preds.insert(REWRITE.to_string(), 2);
        preds.insert(REWRITES.to_string(), 2);
        for (p, n) in self.predicates {
            preds.entry(p).or_insert(n);
        }
        self.predicates = preds;
        self
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions.get(name).copied()
    }

    pub fn predicate_arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn constants(&self) -> impl Iterator<Item = &String> {
        self.functions.iter().filter(|(_, n)| **n == 0).map(|(f, _)| f)
    }

    pub fn has_constant(&self) -> bool {
        self.constants().next().is_some()
    }

    pub fn check_term(&self, t: &Term, out: &mut Vec<String>) {
        match t {
            Term::Var(_) | Term::Grounded(_) => {}
            Term::App(f, args) => {
                match self.function_arity(f) {
                    None => out.push(format!("undeclared function symbol `{f}`")),
                    Some(n) if n != args.len() => out.push(format!(
                        "function symbol `{f}` has arity {n} but is applied to {} argument(s)",
                        args.len()
                    )),
                    Some(_) => {}
                }
                args.iter().for_each(|a| self.check_term(a, out));
            }
        }
    }

    /// Messages for undeclared symbols and arity mismatches in `a`.
    pub fn check_atom(&self, a: &Atom) -> Vec<String> {
        let mut out = Vec::new();
        match self.predicate_arity(&a.pred) {
            None => out.push(format!("undeclared predicate symbol `{}`", a.pred)),
            Some(n) if n != a.args.len() => out.push(format!(
                "predicate symbol `{}` has arity {n} but is applied to {} argument(s)",
                a.pred,
                a.args.len()
            )),
            Some(_) => {}
        }
        a.args.iter().for_each(|t| self.check_term(t, &mut out));
        out
    }
}

/// Active argument positions (1-based) per function symbol.
///
/// Symbols without an explicit entry are fully active, or fully frozen when
/// `bottom` is set (`μ⊥`).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReplacementMap {
    pub bottom: bool,
    pub entries: IndexMap<String, BTreeSet<usize>>,
}

impl ReplacementMap {
    pub fn top() -> Self {
        ReplacementMap::default()
    }

    pub fn bottom() -> Self {
        ReplacementMap { bottom: true, entries: IndexMap::new() }
    }

    pub fn with_entry(mut self, f: &str, positions: impl IntoIterator<Item = usize>) -> Self {
        self.entries.insert(f.to_string(), positions.into_iter().collect());
        self
    }

    pub fn active(&self, f: &str, arity: usize) -> Vec<usize> {
        match self.entries.get(f) {
            Some(ps) => ps.iter().copied().collect(),
            None if self.bottom => Vec::new(),
            None => (1..=arity).collect(),
        }
    }
}

/// A Horn clause `head ⇐ body` of the auxiliary set `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

/// A conditional rewrite rule `lhs -> rhs ⇐ conditions`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteRule {
    pub lhs: Term,
    pub rhs: Term,
    pub conditions: Vec<Atom>,
}

impl RewriteRule {
    pub fn as_clause(&self) -> Clause {
        Clause { head: Atom::rewrite(self.lhs.clone(), self.rhs.clone()), body: self.conditions.clone() }
    }
}

/// `(F, Π, μ, H, R)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gtrs {
    pub signature: Signature,
    pub replacement_map: ReplacementMap,
    pub clauses: Vec<Clause>,
    pub rules: Vec<RewriteRule>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleLabel {
    Reflexivity,
    Compatibility,
    Propagation { symbol: String, position: usize },
    /// 1-based index into `H ∪ R`, clauses first.
    HornClause(usize),
    Named(String),
}

impl fmt::Display for RuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleLabel::Reflexivity => write!(f, "(Rf)"),
            RuleLabel::Compatibility => write!(f, "(C)"),
            RuleLabel::Propagation { symbol, position } => write!(f, "(Pr)_{{{symbol},{position}}}"),
            RuleLabel::HornClause(k) => write!(f, "(HC)_{k}"),
            RuleLabel::Named(n) => write!(f, "{n}"),
        }
    }
}

impl RuleLabel {
    /// Identifier form used as a formula name in exported files and as the
    /// label of printed raw rules: `rf`, `c`, `pr_s_1`, `hc_3`.
    pub fn slug(&self) -> String {
        match self {
            RuleLabel::Reflexivity => "rf".into(),
            RuleLabel::Compatibility => "c".into(),
            RuleLabel::Propagation { symbol, position } => format!("pr_{symbol}_{position}"),
            RuleLabel::HornClause(k) => format!("hc_{k}"),
            RuleLabel::Named(n) => n.clone(),
        }
    }
}

impl Serialize for RuleLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// An elementary rule `premises / conclusion`; all components are atoms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InferenceRule {
    pub label: RuleLabel,
    pub premises: Vec<Atom>,
    pub conclusion: Atom,
}

impl InferenceRule {
    pub fn new(label: RuleLabel, premises: Vec<Atom>, conclusion: Atom) -> Self {
        InferenceRule { label, premises, conclusion }
    }

    /// Variables of the premises followed by those only in the conclusion.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.premises.iter().for_each(|p| p.collect_vars(&mut out));
        self.conclusion.collect_vars(&mut out);
        out
    }
}

impl fmt::Display for InferenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.label)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        if !self.premises.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {}", self.conclusion)
    }
}

/// `(F, Π, I)` with `I` kept in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Eis {
    pub signature: Signature,
    pub rules: Vec<InferenceRule>,
}

impl Eis {
    pub fn rule(&self, label: &RuleLabel) -> Option<&InferenceRule> {
        self.rules.iter().find(|r| &r.label == label)
    }
}

/// `(∀x̄) B1 ∧ ... ∧ Bn ⇒ B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HornSentence {
    pub label: RuleLabel,
    pub vars: Vec<String>,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl HornSentence {
    pub fn from_rule(rule: &InferenceRule) -> Self {
        HornSentence {
            label: rule.label.clone(),
            vars: rule.vars(),
            body: rule.premises.clone(),
            head: rule.conclusion.clone(),
        }
    }

    pub fn to_formula(&self) -> Formula {
        let head = Formula::Atom(self.head.clone());
        let matrix = match self.body.len() {
            0 => head,
            1 => Formula::implies(Formula::Atom(self.body[0].clone()), head),
            _ => Formula::implies(Formula::And(self.body.iter().cloned().map(Formula::Atom).collect()), head),
        };
        self.vars.iter().rev().fold(matrix, |f, v| Formula::forall(v, f))
    }

    /// Reads back a sentence of the shape produced by [`HornSentence::to_formula`].
    pub fn from_formula(label: RuleLabel, f: &Formula) -> Option<Self> {
        let mut vars = Vec::new();
        let mut cur = f;
        while let Formula::Forall(v, body) = cur {
            vars.push(v.clone());
            cur = body;
        }
        let (body, head) = match cur {
            Formula::Atom(a) => (Vec::new(), a.clone()),
            Formula::Implies(l, r) => {
                let Formula::Atom(head) = r.as_ref() else { return None };
                let body = match l.as_ref() {
                    Formula::Atom(a) => vec![a.clone()],
                    Formula::And(xs) => xs
                        .iter()
                        .map(|x| match x {
                            Formula::Atom(a) => Some(a.clone()),
                            _ => None,
                        })
                        .collect::<Option<Vec<_>>>()?,
                    _ => return None,
                };
                (body, head.clone())
            }
            _ => return None,
        };
        let sentence = HornSentence { label, vars, body, head };
        let mut occurring = Vec::new();
        sentence.body.iter().for_each(|a| a.collect_vars(&mut occurring));
        sentence.head.collect_vars(&mut occurring);
        occurring.iter().all(|v| sentence.vars.contains(v)).then_some(sentence)
    }
}

impl fmt::Display for HornSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Checks the well-formedness conditions of a GTRS.
pub fn validate_gtrs(g: &Gtrs) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let sig = &g.signature;
    for p in [REWRITE, REWRITES] {
        if sig.predicate_arity(p) != Some(2) {
            out.push(Diagnostic::new(format!("predicate signature must contain binary `{p}`")));
        }
    }
    for (f, positions) in &g.replacement_map.entries {
        match sig.function_arity(f) {
            None => out.push(Diagnostic::new(format!("replacement map entry for undeclared symbol `{f}`"))),
            Some(n) => {
                for &i in positions {
                    if i < 1 || i > n {
                        out.push(Diagnostic::new(format!(
                            "replacement map position {i} for `{f}` is outside 1..{n}"
                        )));
                    }
                }
            }
        }
    }
    for (k, c) in g.clauses.iter().enumerate() {
        let what = format!("clause {}", k + 1);
        if is_rewrite_predicate(&c.head.pred) {
            out.push(Diagnostic::new(format!(
                "{what}: clause head uses reserved predicate `{}`",
                c.head.pred
            )));
        }
        for a in std::iter::once(&c.head).chain(&c.body) {
            check_system_atom(sig, a, &what, &mut out);
        }
    }
    for (k, r) in g.rules.iter().enumerate() {
        let what = format!("rule {}", k + 1);
        if r.lhs.is_var() {
            out.push(Diagnostic::new(format!("{what}: rule left-hand side is a variable")));
        }
        let head = Atom::rewrite(r.lhs.clone(), r.rhs.clone());
        for a in std::iter::once(&head).chain(&r.conditions) {
            check_system_atom(sig, a, &what, &mut out);
        }
    }
    out
}

pub fn validate_eis(e: &Eis) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for r in &e.rules {
        let what = format!("rule {}", r.label);
        for a in r.premises.iter().chain(std::iter::once(&r.conclusion)) {
            check_system_atom(&e.signature, a, &what, &mut out);
        }
    }
    out
}

fn check_system_atom(sig: &Signature, a: &Atom, what: &str, out: &mut Vec<Diagnostic>) {
    for m in sig.check_atom(a) {
        out.push(Diagnostic::new(format!("{what}: {m}")));
    }
    if !a.grounded_constants().is_empty() {
        out.push(Diagnostic::new(format!("{what}: grounded constants are not allowed in system definitions")));
    }
}

/// Builds the EIS of a GTRS: `(Rf)`, `(C)`, one `(Pr)_{f,i}` per active
/// position in declaration order, then one `(HC)_k` per clause and rule.
pub fn compile_gtrs(g: &Gtrs) -> Eis {
    let x = |n: &str| Term::var(n);
    let mut rules = vec![
        InferenceRule::new(RuleLabel::Reflexivity, vec![], Atom::rewrites(x("X"), x("X"))),
        InferenceRule::new(
            RuleLabel::Compatibility,
            vec![Atom::rewrite(x("X"), x("Y")), Atom::rewrites(x("Y"), x("Z"))],
            Atom::rewrites(x("X"), x("Z")),
        ),
    ];
    for (f, &arity) in &g.signature.functions {
        for i in g.replacement_map.active(f, arity) {
            let args: Vec<Term> = (1..=arity).map(|j| x(&format!("X{j}"))).collect();
            let mut stepped = args.clone();
            stepped[i - 1] = x(&format!("Y{i}"));
            rules.push(InferenceRule::new(
                RuleLabel::Propagation { symbol: f.clone(), position: i },
                vec![Atom::rewrite(args[i - 1].clone(), stepped[i - 1].clone())],
                Atom::rewrite(Term::app(f.clone(), args), Term::app(f.clone(), stepped)),
            ));
        }
    }
    let horn = g.clauses.iter().cloned().chain(g.rules.iter().map(RewriteRule::as_clause));
    for (k, c) in horn.enumerate() {
        rules.push(InferenceRule::new(RuleLabel::HornClause(k + 1), c.body, c.head));
    }
    Eis { signature: g.signature.clone(), rules }
}

/// One universally closed sentence per rule, in rule order.
pub fn theory_of(e: &Eis) -> Vec<HornSentence> {
    e.rules.iter().map(HornSentence::from_rule).collect()
}
