use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use eiskit_core::diagnostic::Position;
use eiskit_core::export::{ExportFormat, ExportJob, GoalMode};
use eiskit_core::formula::qe_transform;
use eiskit_core::model::{CountermodelOutcome, ModelError, SuhAxiom, Target};
use eiskit_core::proof::{
    check_cycle_free, check_operational_termination, herbrand_enumerate, Budget, CycleReport, Search,
    TerminationReport, Verdict,
};
use eiskit_core::property::{check_property, PropertyError, PropertyOutcome, PropertyQuery, PropertyVerdict};
use eiskit_core::syntax::{check_formula, parse_atom, parse_formula, parse_formula_file, parse_spec, ParseError, SpecDocument};
use eiskit_core::system::{theory_of, Eis, Signature};
use eiskit_core::term::Atom;
use eiskit_core::Formula;

use crate::args::*;
use crate::report::Outcome;
use crate::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(Failure::NO_INPUT, format!("{}: {e}", path.display())))
}

fn located(path: &Path, e: &ParseError) -> Failure {
    let lines: Vec<String> = e.diagnostics.iter().map(|d| format!("{}:{d}", path.display())).collect();
    Failure::new(Failure::DATA, lines.join("\n"))
}

fn load_spec(path: &Path) -> Result<SpecDocument, Failure> {
    parse_spec(&read(path)?).map_err(|e| located(path, &e))
}

/// The single sentence of a formula file, checked against `sig`.
fn load_formula(path: &Path, sig: &Signature) -> Result<Formula, Failure> {
    let text = read(path)?;
    let mut fs = parse_formula_file(&text).map_err(|e| located(path, &e))?;
    if fs.len() != 1 {
        return Err(Failure::new(
            Failure::DATA,
            format!("{}: expected exactly one formula, found {}", path.display(), fs.len()),
        ));
    }
    let (line, f) = fs.pop().unwrap();
    check_formula(&f, sig, Some(Position { line, column: 1 })).map_err(|e| located(path, &e))?;
    Ok(f)
}

fn cli_atom(text: &str, sig: &Signature) -> Result<Atom, Failure> {
    let a = parse_atom(text).map_err(|e| Failure::new(Failure::USAGE, format!("malformed atom `{text}`: {e}")))?;
    let problems = sig.check_atom(&a);
    if !problems.is_empty() {
        return Err(Failure::new(Failure::USAGE, format!("malformed atom `{text}`: {}", problems.join("; "))));
    }
    Ok(a)
}

fn cli_suh(text: &Option<String>, sig: &Signature) -> Result<Option<SuhAxiom>, Failure> {
    let Some(text) = text else { return Ok(None) };
    let usage = |e: ModelError| Failure::new(Failure::USAGE, format!("--suh: {e}"));
    let suh = SuhAxiom::parse(text).map_err(usage)?;
    suh.check(sig).map_err(usage)?;
    Ok(Some(suh))
}

fn search_budget(b: SearchBudget) -> Budget {
    Budget::new(b.depth, b.nodes)
}

pub fn prove(a: &ProveArgs, parallel: bool) -> Result<Outcome, Failure> {
    let e = load_spec(&a.spec)?.eis();
    let goal = cli_atom(&a.atom, &e.signature)?;
    let r = Search { budget: search_budget(a.budget), parallel }.prove(&e, &goal);
    let out = Outcome::new(Some(r.verdict.name()), "")
        .budget("depth", a.budget.depth)
        .budget("nodes", a.budget.nodes)
        .consumed("nodes", r.stats.nodes)
        .consumed("depth_limit", r.stats.depth_limit)
        .artifact("goal", r.goal.to_string());
    Ok(match r.verdict {
        Verdict::Proved(tree) => Outcome {
            justification: "closed proof tree".into(),
            text: format!("proved\n{tree}"),
            ..out.artifact("tree", &tree)
        },
        Verdict::Disproved => Outcome {
            justification: "every proof attempt fails finitely".into(),
            text: format!("disproved: {} has no closed proof tree\n", r.goal),
            ..out
        },
        Verdict::Unknown(reason) => Outcome { justification: reason.to_string(), text: format!("unknown: {reason}\n"), ..out },
    })
}

pub fn solve(a: &SolveArgs, parallel: bool) -> Result<Outcome, Failure> {
    let e = load_spec(&a.spec)?.eis();
    let query = cli_atom(&a.atom, &e.signature)?;
    let vars = query.vars();
    let r = Search { budget: search_budget(a.budget), parallel }.solve(&e, &query, &vars, a.max_answers);
    let (verdict, justification) = if !r.answers.is_empty() {
        ("proved", "closed proof trees for the listed instances".to_string())
    } else if r.exhausted {
        ("disproved", "every proof attempt fails finitely".to_string())
    } else {
        ("unknown", r.stopped.map_or_else(|| "search stopped".to_string(), |s| s.to_string()))
    };
    let mut text = String::new();
    for ans in &r.answers {
        let binds: Vec<String> = ans.substitution.iter().map(|(v, t)| format!("{v} = {t}")).collect();
        writeln!(text, "{}", if binds.is_empty() { "yes".to_string() } else { binds.join(", ") }).unwrap();
    }
    if r.answers.is_empty() {
        writeln!(text, "{verdict}: {justification}").unwrap();
    } else if r.exhausted {
        writeln!(text, "(complete)").unwrap();
    }
    Ok(Outcome::new(Some(verdict), justification)
        .budget("depth", a.budget.depth)
        .budget("nodes", a.budget.nodes)
        .budget("max_answers", a.max_answers)
        .consumed("nodes", r.stats.nodes)
        .consumed("depth_limit", r.stats.depth_limit)
        .artifact("query", r.query.to_string())
        .artifact("answers", &r.answers)
        .artifact("exhausted", r.exhausted)
        .text(text))
}

fn property_failure(e: PropertyError) -> Failure {
    let code = match e {
        PropertyError::Model(ModelError::MissingSuh) => Failure::USAGE,
        _ => Failure::DATA,
    };
    Failure::new(code, e.to_string())
}

pub fn check(a: &CheckArgs, parallel: bool) -> Result<Outcome, Failure> {
    let doc = load_spec(&a.spec)?;
    let e = doc.eis();
    let formula = load_formula(&a.formula, &e.signature)?;
    let target = match a.target {
        TargetArg::Ground => Target::Ground,
        TargetArg::Grounded => Target::Grounded,
    };
    let mut q = PropertyQuery::new(formula.clone(), target);
    q.suh = cli_suh(&a.suh, &e.signature)?;
    q.budget = search_budget(a.budget);
    q.max_domain = a.max_domain;
    q.max_candidates = a.max_candidates;
    q.parallel = parallel;
    let r = check_property(&e, &q).map_err(property_failure)?;
    let justification = match &r.justification {
        Some(j) => j.to_string(),
        None => unknown_reason(&r),
    };
    let mut out = Outcome::new(Some(r.verdict.name()), justification)
        .budget("depth", a.budget.depth)
        .budget("nodes", a.budget.nodes)
        .budget("max_domain", a.max_domain)
        .budget("max_candidates", a.max_candidates)
        .consumed("nodes", r.witness_search.as_ref().map_or(0, |w| w.nodes))
        .consumed("candidates", r.countermodel.as_ref().map_or(0, candidates))
        .artifact("formula", formula.to_string())
        .artifact("class", r.class)
        .artifact("normalized", r.normalized.to_string());
    if let Some(qe) = &r.qe {
        out = out.artifact(
            "qe",
            serde_json::json!({
                "rule": qe.rule,
                "direction": qe.direction,
                "target": qe.target.to_string(),
            }),
        );
    }
    if let Some(w) = &r.witness_search {
        out = out.artifact("witness_search", w);
    }
    if let Some(m) = &r.countermodel {
        out = out.artifact("countermodel", m);
    }
    let text = check_text(&r, &out.justification);
    Ok(out.text(text))
}

fn candidates(m: &CountermodelOutcome) -> u64 {
    match m {
        CountermodelOutcome::Found(c) => c.candidates,
        CountermodelOutcome::Exhausted { candidates, .. } | CountermodelOutcome::BudgetExceeded { candidates, .. } => {
            *candidates
        }
    }
}

fn unknown_reason(r: &PropertyOutcome) -> String {
    match (&r.countermodel, &r.witness_search) {
        (Some(CountermodelOutcome::Exhausted { max_domain, .. }), _) => {
            format!("no countermodel with at most {max_domain} elements")
        }
        (Some(CountermodelOutcome::BudgetExceeded { domain_size, candidates }), _) => {
            format!("candidate budget exhausted after {candidates} structures at domain size {domain_size}")
        }
        (Some(CountermodelOutcome::Found(_)), _) => "countermodel found but not certified".into(),
        (None, Some(w)) => w.stopped.map_or_else(|| "witness search inconclusive".into(), |s| s.to_string()),
        (None, None) => "no applicable method".into(),
    }
}

fn check_text(r: &PropertyOutcome, justification: &str) -> String {
    let mut t = format!("{}\n{justification}\nclass: {}\n", r.verdict.name(), r.class);
    if let Some(qe) = &r.qe {
        writeln!(t, "grounded form: {}", qe.target).unwrap();
    }
    if let Some(w) = r.witness_search.as_ref().and_then(|w| w.witness.as_ref()) {
        let binds: Vec<String> = w.answer.substitution.iter().map(|(v, t)| format!("{v} = {t}")).collect();
        writeln!(t, "witness: {}", binds.join(", ")).unwrap();
        write!(t, "{}", w.answer.tree).unwrap();
    }
    if let Some(CountermodelOutcome::Found(m)) = &r.countermodel {
        if r.verdict == PropertyVerdict::CountermodelFound {
            writeln!(t, "refuted: {}", m.refuted).unwrap();
            write!(t, "{}", m.structure.to_mace4()).unwrap();
        }
    }
    t
}

pub fn enumerate(a: &EnumerateArgs) -> Result<Outcome, Failure> {
    let e = load_spec(&a.spec)?.eis();
    let m = herbrand_enumerate(&e, a.term_depth, &Budget::new(0, a.nodes))
        .map_err(|err| Failure::new(Failure::DATA, err.to_string()))?;
    let facts: Vec<String> = m.facts.iter().map(ToString::to_string).collect();
    let mut text = facts.join("\n");
    text.push('\n');
    if let Some(s) = m.stopped {
        writeln!(text, "(stopped: {s})").unwrap();
    }
    let justification = if m.saturated {
        format!("least fixpoint over ground terms of depth at most {}", a.term_depth)
    } else {
        format!("partial fixpoint over ground terms of depth at most {}", a.term_depth)
    };
    Ok(Outcome::new(None, justification)
        .budget("term_depth", a.term_depth)
        .budget("nodes", a.nodes)
        .consumed("iterations", m.iterations)
        .consumed("facts", m.facts.len())
        .artifact("facts", facts)
        .artifact("saturated", m.saturated)
        .artifact("stopped", m.stopped)
        .text(text))
}

pub fn cycles(a: &CyclesArgs) -> Result<Outcome, Failure> {
    let e = load_spec(&a.spec)?.eis();
    let r = check_cycle_free(&e, &a.pred, a.term_depth, &Budget::new(0, a.nodes))
        .map_err(|err| Failure::new(Failure::USAGE, err.to_string()))?;
    let (verdict, justification, consumed) = match &r {
        CycleReport::CycleFound { path } => ("disproved", format!("cycle: {}", path.join(" => ")), 0),
        CycleReport::NoCycleUpToBound { term_depth, edges, saturated } => (
            "unknown",
            format!(
                "no cycle among {edges} edges over ground terms of depth at most {term_depth}{}",
                if *saturated { "" } else { " (enumeration not saturated)" }
            ),
            *edges,
        ),
    };
    Ok(Outcome::new(Some(verdict), justification.clone())
        .budget("term_depth", a.term_depth)
        .budget("nodes", a.nodes)
        .consumed("edges", consumed)
        .artifact("cycles", &r)
        .text(format!("{verdict}: {justification}\n")))
}

pub fn termination(a: &TerminationArgs) -> Result<Outcome, Failure> {
    let e = load_spec(&a.spec)?.eis();
    let r = check_operational_termination(&e, &search_budget(a.budget), a.subsumption);
    let (verdict, justification, nodes) = match &r {
        TerminationReport::LoopWitness(w) if w.kind.is_sound() => {
            ("disproved", format!("infinite well-formed proof tree: {w}"), None)
        }
        TerminationReport::LoopWitness(w) => ("unknown", format!("heuristic only: {w}"), None),
        TerminationReport::NoLoopFoundUpToBudget { nodes, explored_completely, stopped } => (
            "unknown",
            match stopped {
                Some(s) if !explored_completely => format!("no loop found ({s})"),
                _ => "no loop found".into(),
            },
            Some(*nodes),
        ),
    };
    Ok(Outcome::new(Some(verdict), justification.clone())
        .budget("depth", a.budget.depth)
        .budget("nodes", a.budget.nodes)
        .consumed("nodes", nodes)
        .artifact("termination", &r)
        .text(format!("{verdict}: {justification}\n")))
}

pub fn export(a: &ExportArgs) -> Result<Outcome, Failure> {
    let e: Eis = load_spec(&a.spec)?.eis();
    let mut job = ExportJob::theory(theory_of(&e));
    if let Some(s) = cli_suh(&a.suh, &e.signature)? {
        job = job.with_suh(s);
    }
    let mode = match a.mode {
        ModeArg::Prove => GoalMode::Prove,
        ModeArg::Countermodel => GoalMode::Countermodel,
    };
    if let Some(p) = &a.formula {
        job = job.with_goal(load_formula(p, &e.signature)?, mode);
    }
    let format = match a.format {
        FormatArg::Tptp => ExportFormat::Tptp,
        FormatArg::P9 => ExportFormat::P9,
    };
    let problem = job.emit(format).map_err(|err| Failure::new(Failure::DATA, err.to_string()))?;
    let out = Outcome::new(None, "theory of the system, one sentence per inference rule")
        .artifact("format", format)
        .artifact("mode", a.formula.as_ref().map(|_| mode))
        .artifact("sentences", job.theory.len());
    match &a.output {
        Some(path) => {
            fs::write(path, &problem)
                .map_err(|err| Failure::new(Failure::CANT_CREATE, format!("{}: {err}", path.display())))?;
            Ok(out.artifact("path", path).text(format!("wrote {}\n", path.display())))
        }
        None => Ok(out.artifact("problem", &problem).text(problem)),
    }
}

pub fn qe(a: &QeArgs) -> Result<Outcome, Failure> {
    let f = parse_formula(&a.formula).map_err(|e| Failure::new(Failure::USAGE, format!("malformed formula: {e}")))?;
    let r = qe_transform(&f).map_err(|e| Failure::new(Failure::DATA, e.to_string()))?;
    let justification = format!("quantifier elimination ({}, {})", r.rule, r.direction);
    Ok(Outcome::new(None, justification.clone())
        .artifact("rule", r.rule)
        .artifact("direction", r.direction)
        .artifact("source", r.source.to_string())
        .artifact("target", r.target.to_string())
        .artifact("universal", &r.universal)
        .artifact("existential", &r.existential)
        .text(format!("{}\n{}, {}\n", r.target, r.rule, r.direction)))
}

pub fn theory(a: &TheoryArgs) -> Result<Outcome, Failure> {
    let e = load_spec(&a.spec)?.eis();
    let th = theory_of(&e);
    let mut text = String::new();
    let mut sentences = Vec::new();
    for h in &th {
        writeln!(text, "{} {h}", h.label).unwrap();
        sentences.push(serde_json::json!({ "label": h.label, "formula": h.to_string() }));
    }
    Ok(Outcome::new(None, "one universally closed sentence per inference rule")
        .artifact("sentences", sentences)
        .text(text))
}
