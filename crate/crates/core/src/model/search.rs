use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use super::structure::{FiniteStructure, FnKey, Table};
use super::ModelError;
use crate::formula::{classify, partial_ground, Formula, FormulaClass};
use crate::syntax::parse_term;
use crate::system::{HornSentence, Signature};
use crate::term::Term;

/// Least predicate tables over the function tables of `a` closed under every
/// instance of `theory` on the domain. Predicates of `predicates` that no
/// sentence derives come out empty.
pub fn least_predicates(
    a: &FiniteStructure,
    theory: &[HornSentence],
    predicates: &IndexMap<String, usize>,
) -> Result<BTreeMap<String, Table<bool>>, ModelError> {
    let mut work = FiniteStructure {
        size: a.size,
        functions: a.functions.clone(),
        grounded: a.grounded.clone(),
        predicates: BTreeMap::new(),
    };
    let mut arities: BTreeMap<&str, usize> = predicates.iter().map(|(p, &n)| (p.as_str(), n)).collect();
    for h in theory {
        for atom in h.body.iter().chain(std::iter::once(&h.head)) {
            arities.entry(atom.pred.as_str()).or_insert(atom.args.len());
        }
    }
    for (p, n) in arities {
        work.predicates.insert(p.to_string(), Table { arity: n, cells: vec![false; a.size.pow(n as u32)] });
    }
    if a.size == 0 {
        return Ok(work.predicates);
    }
    loop {
        let mut changed = false;
        for h in theory {
            let mut env: Vec<(String, usize)> = h.vars.iter().map(|v| (v.clone(), 0)).collect();
            loop {
                let mut fire = true;
                for b in &h.body {
                    if !work.holds(b, &env)? {
                        fire = false;
                        break;
                    }
                }
                if fire {
                    let mut idx = 0;
                    for t in &h.head.args {
                        idx = idx * a.size + work.eval_term(t, &env)?;
                    }
                    let cell = &mut work.predicates.get_mut(&h.head.pred).expect("registered").cells[idx];
                    if !*cell {
                        *cell = true;
                        changed = true;
                    }
                }
                if !next_assignment(&mut env, a.size) {
                    break;
                }
            }
        }
        if !changed {
            return Ok(work.predicates);
        }
    }
}

fn next_assignment(env: &mut [(String, usize)], size: usize) -> bool {
    for (_, d) in env.iter_mut().rev() {
        *d += 1;
        if *d < size {
            return true;
        }
        *d = 0;
    }
    false
}

/// `(∀x) ∨_{t ∈ T} x = t` for a non-empty set `T` of ground terms, which may
/// contain grounded constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuhAxiom {
    #[serde(serialize_with = "terms_text")]
    pub terms: Vec<Term>,
}

fn terms_text<S: serde::Serializer>(t: &[Term], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(t.iter().map(|x| x.to_string()))
}

impl SuhAxiom {
    pub fn new(terms: Vec<Term>) -> Result<Self, ModelError> {
        if terms.is_empty() {
            return Err(ModelError::EmptySuh);
        }
        if let Some(t) = terms.iter().find(|t| !t.is_ground()) {
            return Err(ModelError::SuhTerm(format!("`{t}` is not ground")));
        }
        Ok(SuhAxiom { terms })
    }

    /// Comma-separated terms, e.g. `0, %x`.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut terms = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        let mut pieces = Vec::new();
        for (i, c) in text.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    pieces.push(&text[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        pieces.push(&text[start..]);
        for p in pieces {
            if p.trim().is_empty() {
                continue;
            }
            let t = parse_term(p.trim()).map_err(|e| ModelError::SuhTerm(format!("`{}`: {e}", p.trim())))?;
            terms.push(t);
        }
        SuhAxiom::new(terms)
    }

    pub fn to_formula(&self) -> Formula {
        let x = Term::var("X");
        Formula::forall("X", Formula::or(self.terms.iter().map(|t| Formula::Equal(x.clone(), t.clone())).collect()))
    }

    pub fn grounded_constants(&self) -> BTreeSet<String> {
        self.terms.iter().flat_map(Term::grounded_constants).collect()
    }

    /// Every term is built from declared function symbols with the right
    /// arities.
    pub fn check(&self, sig: &Signature) -> Result<(), ModelError> {
        for t in &self.terms {
            let mut errs = Vec::new();
            sig.check_term(t, &mut errs);
            if let Some(e) = errs.into_iter().next() {
                return Err(ModelError::SuhTerm(format!("`{t}`: {e}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for SuhAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Every element of the domain is the value of some term of `suh`.
pub fn check_surjectivity(a: &FiniteStructure, suh: &SuhAxiom) -> bool {
    let mut covered = vec![false; a.size];
    for t in &suh.terms {
        if let Ok(d) = a.eval_term(t, &[]) {
            covered[d] = true;
        }
    }
    covered.iter().all(|&c| c)
}

/// Every sentence holds in `a`.
pub fn verify_model(a: &FiniteStructure, sentences: &[Formula]) -> bool {
    sentences.iter().all(|f| a.satisfies(f) == Ok(true))
}

/// Which canonical model a countermodel is about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// The least Herbrand model over ground terms.
    Ground,
    /// The grounded model, where variables are read as constants `c_x`.
    Grounded,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Ground => "ground",
            Target::Grounded => "grounded",
        })
    }
}

/// The condition under which a model of the theory falsifying the
/// (possibly transformed) formula refutes it in the target model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// The formula is existentially closed.
    Ecbca,
    /// The interpretation homomorphism is surjective, enforced by a SuH
    /// axiom.
    Surjectivity,
    /// Conjunctive positive formula with its universal variables grounded.
    PartialGrounding,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Ecbca => "ecbca",
            Route::Surjectivity => "surjectivity",
            Route::PartialGrounding => "partial-grounding",
        })
    }
}

/// Picks the route for a positive sentence of class `class`: ECBCA first,
/// then surjectivity when a SuH axiom is supplied, then partial grounding
/// for conjunctive formulas against the grounded model.
pub fn select_route(class: FormulaClass, target: Target, suh: bool) -> Result<Route, ModelError> {
    match class {
        FormulaClass::General => Err(ModelError::NotPositive),
        FormulaClass::Ecbca => Ok(Route::Ecbca),
        _ if suh => Ok(Route::Surjectivity),
        FormulaClass::AndPositive if target == Target::Grounded => Ok(Route::PartialGrounding),
        _ => Err(ModelError::MissingSuh),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Countermodel {
    pub target: Target,
    pub route: Route,
    /// The sentence the structure falsifies: the input, or its partial
    /// grounding on the partial-grounding route.
    #[serde(serialize_with = "formula_text")]
    pub refuted: Formula,
    pub structure: FiniteStructure,
    /// `verify_model` on theory and SuH, and the refuted sentence is false.
    pub certified: bool,
    pub candidates: u64,
}

fn formula_text<S: serde::Serializer>(f: &Formula, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CountermodelOutcome {
    Found(Countermodel),
    /// No countermodel with at most `max_domain` elements.
    Exhausted { max_domain: usize, candidates: u64 },
    /// The candidate budget ran out while searching domains of size
    /// `domain_size`.
    BudgetExceeded { domain_size: usize, candidates: u64 },
}

/// Search over function tables of `F ∪ K` for domains of size
/// `1..=max_domain`, completing each candidate with its least predicate
/// tables. Candidates are visited in a fixed canonical order and the first
/// hit in that order is returned, also when run in parallel.
#[derive(Clone, Debug)]
pub struct CountermodelSearch<'a> {
    pub signature: &'a Signature,
    pub theory: &'a [HornSentence],
    pub max_domain: usize,
    pub max_candidates: u64,
    pub parallel: bool,
}

impl<'a> CountermodelSearch<'a> {
    pub fn new(signature: &'a Signature, theory: &'a [HornSentence], max_domain: usize) -> Self {
        CountermodelSearch { signature, theory, max_domain, max_candidates: 1_000_000, parallel: false }
    }

    pub fn find(&self, f: &Formula, target: Target, suh: Option<&SuhAxiom>) -> Result<CountermodelOutcome, ModelError> {
        if !f.is_sentence() {
            return Err(ModelError::NotASentence(f.free_vars()));
        }
        let c = classify(f);
        let route = select_route(c.class, target, suh.is_some())?;
        let suh = if route == Route::Surjectivity { suh } else { None };
        let refuted = if route == Route::PartialGrounding {
            let universal: BTreeSet<String> = c.universal().into_iter().collect();
            partial_ground(&c.normalized(), &universal).map_err(|e| ModelError::Formula(e.to_string()))?
        } else {
            f.clone()
        };
        let mut k = refuted.grounded_constants();
        if let Some(s) = suh {
            s.check(self.signature)?;
            k.extend(s.grounded_constants());
        }
        if target == Target::Ground && !k.is_empty() {
            return Err(ModelError::GroundedInGroundTarget(k.into_iter().collect()));
        }
        self.check_symbols(&refuted)?;
        let space = Space::new(self.signature, &k);
        let mut sentences: Vec<Formula> = self.theory.iter().map(HornSentence::to_formula).collect();
        if let Some(s) = suh {
            sentences.push(s.to_formula());
        }
        let mut checked = 0u64;
        for n in 1..=self.max_domain {
            let total = space.count(n);
            let available = self.max_candidates - checked;
            let limit = match total {
                Some(t) if t <= available => t,
                _ => available,
            };
            let test = |i: u64| {
                let a = space.decode(n, i);
                if suh.is_some_and(|s| !check_surjectivity(&a, s)) {
                    return false;
                }
                self.complete(a).satisfies(&refuted) == Ok(false)
            };
            let hit = if self.parallel {
                (0..limit).into_par_iter().find_first(|&i| test(i))
            } else {
                (0..limit).find(|&i| test(i))
            };
            if let Some(i) = hit {
                let structure = self.complete(space.decode(n, i));
                let certified = verify_model(&structure, &sentences) && structure.satisfies(&refuted) == Ok(false);
                return Ok(CountermodelOutcome::Found(Countermodel {
                    target,
                    route,
                    refuted,
                    structure,
                    certified,
                    candidates: checked + i + 1,
                }));
            }
            checked += limit;
            if Some(limit) != total {
                return Ok(CountermodelOutcome::BudgetExceeded { domain_size: n, candidates: checked });
            }
        }
        Ok(CountermodelOutcome::Exhausted { max_domain: self.max_domain, candidates: checked })
    }

    fn check_symbols(&self, f: &Formula) -> Result<(), ModelError> {
        for (name, n) in f.functions() {
            if self.signature.function_arity(&name) != Some(n) {
                return Err(ModelError::MissingSymbol(format!("{name}/{n}")));
            }
        }
        for a in f.atoms() {
            if self.signature.predicate_arity(&a.pred) != Some(a.args.len()) {
                return Err(ModelError::MissingSymbol(format!("{}/{}", a.pred, a.args.len())));
            }
        }
        Ok(())
    }

    fn complete(&self, mut a: FiniteStructure) -> FiniteStructure {
        a.predicates = least_predicates(&a, self.theory, &self.signature.predicates).expect("symbols were checked");
        a
    }
}

/// Runs [`CountermodelSearch`] with default settings.
pub fn find_countermodel(
    signature: &Signature,
    theory: &[HornSentence],
    f: &Formula,
    target: Target,
    suh: Option<&SuhAxiom>,
    max_domain: usize,
) -> Result<CountermodelOutcome, ModelError> {
    CountermodelSearch::new(signature, theory, max_domain).find(f, target, suh)
}

/// The function tables of all candidates, as a mixed-radix number whose
/// digits are the table cells in `FnKey` order, first cell most
/// significant. The first declared constant is pinned to element 0.
struct Space {
    keys: Vec<(FnKey, usize)>,
    pinned: Option<String>,
}

impl Space {
    fn new(sig: &Signature, k: &BTreeSet<String>) -> Self {
        let mut keys: Vec<(FnKey, usize)> =
            sig.functions.iter().map(|(f, &n)| (FnKey::Function(f.clone()), n)).collect();
        keys.sort();
        keys.extend(k.iter().map(|v| (FnKey::Grounded(v.clone()), 0)));
        Space { keys, pinned: sig.constants().next().cloned() }
    }

    fn is_pinned(&self, key: &FnKey) -> bool {
        matches!((key, &self.pinned), (FnKey::Function(f), Some(p)) if f == p)
    }

    fn free_cells(&self, n: usize) -> Option<u32> {
        let mut cells: u32 = 0;
        for (key, arity) in &self.keys {
            if !self.is_pinned(key) {
                cells = cells.checked_add(u32::try_from(n.checked_pow(*arity as u32)?).ok()?)?;
            }
        }
        Some(cells)
    }

    /// `None` when the count does not fit in 64 bits.
    fn count(&self, n: usize) -> Option<u64> {
        (n as u64).checked_pow(self.free_cells(n)?)
    }

    fn decode(&self, n: usize, mut index: u64) -> FiniteStructure {
        let mut tables: Vec<Vec<usize>> = Vec::with_capacity(self.keys.len());
        for (key, arity) in &self.keys {
            let len = n.pow(*arity as u32);
            tables.push(vec![0; if self.is_pinned(key) { 1 } else { len }]);
        }
        for (t, (key, _)) in tables.iter_mut().zip(&self.keys).rev() {
            if self.is_pinned(key) {
                continue;
            }
            for cell in t.iter_mut().rev() {
                *cell = (index % n as u64) as usize;
                index /= n as u64;
            }
        }
        let mut a = FiniteStructure::new(n);
        for ((key, arity), cells) in self.keys.iter().zip(tables) {
            match key {
                FnKey::Function(f) => {
                    a.functions.insert(f.clone(), Table { arity: *arity, cells });
                }
                FnKey::Grounded(v) => {
                    a.grounded.insert(v.clone(), cells[0]);
                }
            }
        }
        a
    }
}
