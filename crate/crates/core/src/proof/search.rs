//! Depth-first proof search with iterative deepening on tree depth.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::termination::{LoopKind, LoopWitness};
use super::tree::{ProofNode, ProofTree};
use crate::subst::{match_atom, Substitution};
use crate::system::{Eis, InferenceRule};
use crate::term::{Atom, Term};

/// Limits for a proof search. The deadline, when set, makes results depend
/// on machine speed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Maximum proof-tree depth; a lone root has depth 1.
    pub max_depth: usize,
    /// Maximum number of rule applications, summed over all iterations.
    pub max_nodes: u64,
    #[serde(skip)]
    pub deadline: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_depth: 32, max_nodes: 100_000, deadline: None }
    }
}

impl Budget {
    pub fn new(max_depth: usize, max_nodes: u64) -> Self {
        Budget { max_depth, max_nodes, deadline: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnknownReason {
    /// Some branch was cut at the maximum depth.
    DepthBound,
    NodeBudget,
    Deadline,
}

impl std::fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnknownReason::DepthBound => "depth bound reached",
            UnknownReason::NodeBudget => "node budget exhausted",
            UnknownReason::Deadline => "deadline passed",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Rule applications performed.
    pub nodes: u64,
    /// Depth limit of the last deepening iteration.
    pub depth_limit: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proved(ProofTree),
    /// The search space below the goal was explored completely.
    Disproved,
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, Verdict::Proved(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Proved(_) => "proved",
            Verdict::Disproved => "disproved",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProveResult {
    /// The goal after grounding its variables.
    pub goal: Atom,
    pub verdict: Verdict,
    pub stats: SearchStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Answer {
    /// Bindings of the query variables.
    #[serde(serialize_with = "serialize_subst")]
    pub substitution: Substitution,
    pub tree: ProofTree,
}

fn serialize_subst<S: serde::Serializer>(s: &Substitution, ser: S) -> Result<S::Ok, S::Error> {
    let m: BTreeMap<&String, String> = s.iter().map(|(v, t)| (v, t.to_string())).collect();
    m.serialize(ser)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    /// The query after grounding its non-query variables.
    pub query: Atom,
    pub answers: Vec<Answer>,
    /// The whole search space was explored, so `answers` is complete.
    pub exhausted: bool,
    /// Why the search stopped early, if it did before finding enough answers.
    pub stopped: Option<UnknownReason>,
    pub stats: SearchStats,
}

/// Search configuration shared by `prove` and `solve`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Search {
    pub budget: Budget,
    /// Fan out the alternatives at the root over the current rayon pool.
    /// Results do not depend on this flag.
    pub parallel: bool,
}

/// `⊢ A`: grounds the variables of `goal` and searches for a closed tree.
pub fn prove(e: &Eis, goal: &Atom, budget: &Budget) -> ProveResult {
    Search { budget: *budget, parallel: false }.prove(e, goal)
}

/// Enumerates answers for `query`, treating `query_vars` as unknowns and
/// grounding every other variable.
pub fn solve(e: &Eis, query: &Atom, query_vars: &[String], budget: &Budget, max_answers: usize) -> SolveResult {
    Search { budget: *budget, parallel: false }.solve(e, query, query_vars, max_answers)
}

/// `prove(σ(A))`, for use as a stability check when `A` is provable.
pub fn check_substitution_stability(e: &Eis, atom: &Atom, subst: &Substitution, budget: &Budget) -> bool {
    prove(e, &subst.apply_atom(atom), budget).verdict.is_proved()
}

impl Search {
    pub fn new(budget: Budget) -> Self {
        Search { budget, parallel: false }
    }

    pub fn prove(&self, e: &Eis, goal: &Atom) -> ProveResult {
        let r = self.solve(e, &goal.ground_down(), &[], 1);
        let verdict = match (r.answers.into_iter().next(), r.exhausted, r.stopped) {
            (Some(a), _, _) => Verdict::Proved(a.tree),
            (None, true, _) => Verdict::Disproved,
            (None, false, reason) => Verdict::Unknown(reason.unwrap_or(UnknownReason::DepthBound)),
        };
        ProveResult { goal: r.query, verdict, stats: r.stats }
    }

    pub fn solve(&self, e: &Eis, query: &Atom, query_vars: &[String], max_answers: usize) -> SolveResult {
        let max_answers = max_answers.max(1);
        let keep: BTreeSet<String> = query_vars.iter().cloned().collect();
        let ground: BTreeSet<String> = query.vars().into_iter().filter(|v| !keep.contains(v)).collect();
        let query = query.ground_some(&ground);
        let vars: Vec<String> = query.vars();
        let prepared = Prepared::new(e);
        let deadline = self.budget.deadline.map(|d| Instant::now() + d);
        let roots: Vec<usize> = e
            .rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.conclusion.pred == query.pred && r.conclusion.args.len() == query.args.len())
            .map(|(i, _)| i)
            .collect();

        let mut answers: Vec<Answer> = Vec::new();
        let mut seen: BTreeSet<Vec<Term>> = BTreeSet::new();
        let mut nodes: u64 = 0;
        let mut stats = SearchStats::default();
        let max_depth = self.budget.max_depth.max(1);
        for limit in 1..=max_depth {
            stats.depth_limit = limit;
            let remaining = self.budget.max_nodes - nodes;
            let want = max_answers + seen.len();
            let run = |root: &usize| {
                let mut b = Branch::new(&prepared, &query, &vars, limit, remaining, want, deadline);
                b.run(Some(*root));
                b.finish()
            };
            let results: Box<dyn Iterator<Item = BranchResult>> = if self.parallel && roots.len() > 1 {
                Box::new(roots.par_iter().map(run).collect::<Vec<_>>().into_iter())
            } else {
                Box::new(roots.iter().map(run))
            };
            let mut used: u64 = 0;
            let mut cut = false;
            let mut stop: Option<Option<UnknownReason>> = None;
            'branches: for r in results {
                for (key, answer, at) in r.answers {
                    if used + at > remaining {
                        stop = Some(Some(UnknownReason::NodeBudget));
                        break 'branches;
                    }
                    if seen.insert(key) {
                        answers.push(answer);
                        if answers.len() >= max_answers {
                            used += at;
                            stop = Some(None);
                            break 'branches;
                        }
                    }
                }
                if let Some(reason) = r.halted {
                    used += r.nodes.min(remaining - used);
                    stop = Some(Some(reason));
                    break;
                }
                if used + r.nodes > remaining {
                    used = remaining;
                    stop = Some(Some(UnknownReason::NodeBudget));
                    break;
                }
                used += r.nodes;
                cut |= r.cut;
            }
            nodes += used;
            stats.nodes = nodes;
            match stop {
                Some(None) => return SolveResult { query, answers, exhausted: false, stopped: None, stats },
                Some(Some(reason)) => return SolveResult { query, answers, exhausted: false, stopped: Some(reason), stats },
                None if !cut => return SolveResult { query, answers, exhausted: true, stopped: None, stats },
                None => {}
            }
        }
        SolveResult { query, answers, exhausted: false, stopped: Some(UnknownReason::DepthBound), stats }
    }
}

/// Rules with their variables listed once, shared by all branches.
pub(crate) struct Prepared<'a> {
    pub rules: &'a [InferenceRule],
    pub vars: Vec<Vec<String>>,
}

impl<'a> Prepared<'a> {
    pub fn new(e: &'a Eis) -> Self {
        Prepared { rules: &e.rules, vars: e.rules.iter().map(InferenceRule::vars).collect() }
    }
}

struct Step {
    goal: usize,
    rule: usize,
    renaming: Substitution,
    children: Vec<usize>,
}

/// Triangular bindings with an undo trail: variables are bound at most
/// once, images are resolved on demand, and backtracking pops the trail.
#[derive(Default)]
struct Bindings {
    map: HashMap<String, Term>,
    trail: Vec<String>,
}

impl Bindings {
    fn walk<'t>(&'t self, mut t: &'t Term) -> &'t Term {
        while let Term::Var(v) = t {
            match self.map.get(v) {
                Some(u) => t = u,
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.resolve(a)).collect()),
            u => u.clone(),
        }
    }

    fn resolve_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.resolve(t)).collect() }
    }

    fn occurs(&self, x: &str, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(v) => v == x,
            Term::App(_, args) => args.iter().any(|a| self.occurs(x, a)),
            Term::Grounded(_) => false,
        }
    }

    fn bind(&mut self, x: String, t: Term) -> bool {
        if self.occurs(&x, &t) {
            return false;
        }
        self.trail.push(x.clone());
        self.map.insert(x, t);
        true
    }

    fn unify(&mut self, a: &Term, b: &Term) -> bool {
        let (a, b) = (self.walk(a), self.walk(b));
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                let (x, t) = (x.clone(), t.clone());
                self.bind(x, t)
            }
            (Term::Grounded(x), Term::Grounded(y)) => x == y,
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                let pairs: Vec<(Term, Term)> = xs.iter().cloned().zip(ys.iter().cloned()).collect();
                pairs.iter().all(|(x, y)| self.unify(x, y))
            }
            _ => false,
        }
    }

    fn unify_atoms(&mut self, a: &Atom, b: &Atom) -> bool {
        a.pred == b.pred && a.args.len() == b.args.len() && a.args.iter().zip(&b.args).all(|(x, y)| self.unify(x, y))
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail entry");
            self.map.remove(&v);
        }
    }
}

struct Frame {
    goal: usize,
    depth: usize,
    next_rule: usize,
    /// Length of the binding trail when the goal was selected.
    trail: usize,
    mark: usize,
    goals_len: usize,
    active: bool,
}

pub(crate) struct BranchResult {
    answers: Vec<(Vec<Term>, Answer, u64)>,
    nodes: u64,
    cut: bool,
    halted: Option<UnknownReason>,
}

/// One independent depth-first search. Fresh variables are numbered per
/// branch, so a branch explores the same space whichever thread runs it.
pub(crate) struct Branch<'a> {
    p: &'a Prepared<'a>,
    query_vars: &'a [String],
    limit: usize,
    cap: u64,
    want: usize,
    deadline: Option<Instant>,
    nodes: u64,
    counter: usize,
    cut: bool,
    halted: Option<UnknownReason>,
    /// Goal atoms as created, before the current substitution is applied,
    /// with the goal that introduced them.
    arena: Vec<(Atom, Option<usize>)>,
    steps: Vec<Step>,
    goals: Vec<(usize, usize)>,
    bindings: Bindings,
    answers: Vec<(Vec<Term>, Answer, u64)>,
    local_seen: BTreeSet<Vec<Term>>,
    /// When set, solutions are not recorded and every selected goal is
    /// compared with its ancestors; the flag enables the subsumption check.
    loop_check: Option<bool>,
    pub witness: Option<LoopWitness>,
}

enum Found {
    Applied,
    Exhausted,
    Halt,
}

impl<'a> Branch<'a> {
    pub(crate) fn new(
        p: &'a Prepared<'a>,
        root: &Atom,
        query_vars: &'a [String],
        limit: usize,
        cap: u64,
        want: usize,
        deadline: Option<Instant>,
    ) -> Self {
        Branch {
            p,
            query_vars,
            limit,
            cap,
            want,
            deadline,
            nodes: 0,
            counter: 0,
            cut: false,
            halted: None,
            arena: vec![(root.clone(), None)],
            steps: Vec::new(),
            goals: vec![(0, 1)],
            bindings: Bindings::default(),
            answers: Vec::new(),
            local_seen: BTreeSet::new(),
            loop_check: None,
            witness: None,
        }
    }

    /// A branch that explores every well-formed tree for loops instead of
    /// collecting answers.
    pub(crate) fn explorer(p: &'a Prepared<'a>, root: &Atom, limit: usize, cap: u64, subsumption: bool) -> Self {
        let mut b = Branch::new(p, root, &[], limit, cap, usize::MAX, None);
        b.loop_check = Some(subsumption);
        b
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes
    }

    pub(crate) fn was_cut(&self) -> bool {
        self.cut
    }

    pub(crate) fn halted(&self) -> Option<UnknownReason> {
        self.halted
    }

    fn finish(self) -> BranchResult {
        BranchResult { answers: self.answers, nodes: self.nodes, cut: self.cut, halted: self.halted }
    }

    /// Runs to completion, to the answer target, or to a budget halt.
    pub(crate) fn run(&mut self, root_rule: Option<usize>) {
        let mut frames: Vec<Frame> = Vec::new();
        'select: loop {
            // Select the leftmost open goal, or record an answer.
            match self.goals.pop() {
                None => {
                    if self.record() {
                        return;
                    }
                }
                Some((g, d)) if d > self.limit => {
                    self.cut = true;
                    self.goals.push((g, d));
                }
                Some((g, d)) => {
                    if let Some(subsumption) = self.loop_check {
                        if let Some(w) = self.find_loop(g, subsumption) {
                            self.witness = Some(w);
                            return;
                        }
                    }
                    frames.push(Frame {
                        goal: g,
                        depth: d,
                        next_rule: 0,
                        trail: self.bindings.trail.len(),
                        mark: self.arena.len(),
                        goals_len: self.goals.len(),
                        active: false,
                    });
                }
            }
            // Advance the innermost choice point, backtracking as needed.
            loop {
                let Some(frame) = frames.last_mut() else { return };
                if frame.active {
                    self.steps.pop();
                    self.bindings.undo(frame.trail);
                    self.arena.truncate(frame.mark);
                    self.goals.truncate(frame.goals_len);
                    frame.active = false;
                }
                let only = if frame.goal == 0 { root_rule } else { None };
                match self.try_rules(frame, only) {
                    Found::Applied => continue 'select,
                    Found::Halt => return,
                    Found::Exhausted => {
                        let f = frames.pop().unwrap();
                        self.goals.push((f.goal, f.depth));
                    }
                }
            }
        }
    }

    fn try_rules(&mut self, frame: &mut Frame, only: Option<usize>) -> Found {
        let goal = self.arena[frame.goal].0.clone();
        let n = self.p.rules.len();
        while frame.next_rule < n {
            let ri = frame.next_rule;
            frame.next_rule += 1;
            if only.is_some_and(|o| o != ri) {
                continue;
            }
            let rule = &self.p.rules[ri];
            if rule.conclusion.pred != goal.pred || rule.conclusion.args.len() != goal.args.len() {
                continue;
            }
            self.counter += 1;
            let renaming: Substitution = self.p.vars[ri]
                .iter()
                .map(|v| (v.clone(), Term::Var(format!("_{v}_{}", self.counter))))
                .collect();
            let concl = renaming.apply_atom(&rule.conclusion);
            if !self.bindings.unify_atoms(&goal, &concl) {
                self.bindings.undo(frame.trail);
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.cap {
                self.halted = Some(UnknownReason::NodeBudget);
                return Found::Halt;
            }
            if self.nodes % 256 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
                self.halted = Some(UnknownReason::Deadline);
                return Found::Halt;
            }
            let mut children = Vec::with_capacity(rule.premises.len());
            for prem in &rule.premises {
                children.push(self.arena.len());
                self.arena.push((renaming.apply_atom(prem), Some(frame.goal)));
            }
            for &c in children.iter().rev() {
                self.goals.push((c, frame.depth + 1));
            }
            self.steps.push(Step { goal: frame.goal, rule: ri, renaming, children });
            frame.active = true;
            return Found::Applied;
        }
        Found::Exhausted
    }

    /// Compares goal `g` with each of its ancestors, nearest first, under
    /// the current substitution.
    fn find_loop(&self, g: usize, subsumption: bool) -> Option<LoopWitness> {
        let goal = self.bindings.resolve_atom(&self.arena[g].0);
        let mut chain = vec![goal.clone()];
        let mut cur = self.arena[g].1;
        while let Some(a) = cur {
            let anc = self.bindings.resolve_atom(&self.arena[a].0);
            chain.push(anc.clone());
            let inst = match_atom(&anc, &goal).is_some();
            let gen = match_atom(&goal, &anc).is_some();
            let kind = match (inst, gen) {
                (true, true) => Some(LoopKind::Variant),
                (true, false) => Some(LoopKind::Instance),
                (false, true) if subsumption => Some(LoopKind::Subsumption),
                _ => None,
            };
            if let Some(kind) = kind {
                chain.reverse();
                let root = self.bindings.resolve_atom(&self.arena[0].0);
                return Some(LoopWitness { kind, root, trace: chain });
            }
            cur = self.arena[a].1;
        }
        None
    }

    /// Stores the current solution; true when the branch has enough.
    fn record(&mut self) -> bool {
        if self.loop_check.is_some() {
            return false;
        }
        let key: Vec<Term> = self.query_vars.iter().map(|v| self.bindings.resolve(&Term::var(v.clone()))).collect();
        if self.local_seen.insert(key.clone()) {
            let substitution: Substitution =
                self.query_vars.iter().cloned().zip(key.iter().cloned()).collect();
            let tree = self.tree(0);
            self.answers.push((key, Answer { substitution, tree }, self.nodes));
        }
        self.local_seen.len() >= self.want
    }

    fn tree(&self, goal: usize) -> ProofTree {
        let atom = self.bindings.resolve_atom(&self.arena[goal].0);
        let Some(step) = self.steps.iter().find(|s| s.goal == goal) else {
            return ProofTree::open(atom);
        };
        let substitution: Substitution =
            step.renaming.iter().map(|(v, fresh)| (v.clone(), self.bindings.resolve(fresh))).collect();
        ProofTree {
            goal: atom,
            node: ProofNode::Derivation {
                rule: self.p.rules[step.rule].label.clone(),
                substitution,
                children: step.children.iter().map(|&c| self.tree(c)).collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_atom, parse_spec};

    pub(crate) const EXAMPLE: &str = "\
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

    fn eis() -> Eis {
        parse_spec(EXAMPLE).unwrap().eis()
    }

    fn verdict(goal: &str) -> Verdict {
        let e = eis();
        let r = prove(&e, &parse_atom(goal).unwrap(), &Budget::default());
        if let Verdict::Proved(t) = &r.verdict {
            assert!(t.is_closed());
            t.replay(&e).unwrap();
        }
        r.verdict
    }

    #[test]
    fn zero_of_zero_uses_reflexivity() {
        let Verdict::Proved(t) = verdict("zero(0)") else { panic!() };
        assert_eq!(t.to_string(), "zero(0)    [(HC)_5]\n  0 ->* 0    [(Rf)]\n");
    }

    #[test]
    fn odd_three() {
        let Verdict::Proved(t) = verdict("odd(s(s(s(0))))") else { panic!() };
        // one rewrite step s(s(s(0))) -> s(0) followed by reflexivity
        let c = &t.children()[0];
        assert_eq!(c.goal.to_string(), "s(s(s(0))) ->* s(0)");
        assert_eq!(c.children()[0].goal.to_string(), "s(s(s(0))) -> s(0)");
        assert_eq!(c.children()[1].goal.to_string(), "s(0) ->* s(0)");
    }

    #[test]
    fn zero_of_two_is_disproved() {
        assert_eq!(verdict("zero(s(s(0)))"), Verdict::Disproved);
        assert_eq!(verdict("odd(0)"), Verdict::Disproved);
    }

    #[test]
    fn variables_are_grounded_before_search() {
        let e = eis();
        let r = prove(&e, &parse_atom("geq(X, 0)").unwrap(), &Budget::default());
        assert_eq!(r.goal.to_string(), "geq(%X, 0)");
        assert!(r.verdict.is_proved());
        assert_eq!(verdict("odd(X)"), Verdict::Disproved);
    }

    #[test]
    fn solve_finds_reduct() {
        let e = eis();
        let q = parse_atom("s(s(s(%x))) -> Z").unwrap();
        let r = solve(&e, &q, &["Z".to_string()], &Budget::default(), 5);
        assert!(r.exhausted);
        assert_eq!(r.answers.len(), 1);
        assert_eq!(r.answers[0].substitution.get("Z").unwrap().to_string(), "s(%x)");
        r.answers[0].tree.replay(&e).unwrap();

        let none = solve(&e, &parse_atom("0 -> Z").unwrap(), &["Z".to_string()], &Budget::default(), 5);
        assert!(none.answers.is_empty() && none.exhausted);
    }

    #[test]
    fn budgets_give_unknown() {
        let e = eis();
        let goal = parse_atom("odd(s(s(s(s(s(0))))))").unwrap();
        let r = prove(&e, &goal, &Budget::new(3, 1000));
        assert_eq!(r.verdict, Verdict::Unknown(UnknownReason::DepthBound));
        let r = prove(&e, &goal, &Budget::new(32, 3));
        assert_eq!(r.verdict, Verdict::Unknown(UnknownReason::NodeBudget));
        assert!(r.stats.nodes <= 3);
    }

    #[test]
    fn parallel_matches_sequential() {
        let e = eis();
        for g in ["odd(s(s(s(s(s(0))))))", "peven(s(s(s(s(0)))))", "zero(s(0))", "X ->* s(0)"] {
            let a = parse_atom(g).unwrap();
            for budget in [Budget::default(), Budget::new(6, 40), Budget::new(32, 25)] {
                let seq = Search { budget, parallel: false }.prove(&e, &a);
                let par = Search { budget, parallel: true }.prove(&e, &a);
                assert_eq!(seq, par, "{g}");
            }
        }
    }
}
