//! Acceptance run: one PASS or FAIL line per criterion, nonzero exit if any
//! criterion fails.

#[macro_use]
#[path = "../../core/tests/common/mod.rs"]
mod common;
#[path = "../../core/tests/golden.rs"]
mod golden;
#[path = "../../core/tests/properties/models.rs"]
mod models;
#[path = "../../core/tests/properties/proof.rs"]
mod proof;
#[path = "../../core/tests/properties/terms.rs"]
mod terms;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use clap::Parser;
use eiskit_cli::args::Cli;
use eiskit_core::model::{verify_model, CountermodelOutcome};
use eiskit_core::proof::{check_cycle_free, herbrand_enumerate, CycleReport};
use eiskit_core::syntax::{parse_atom, parse_formula_file, parse_term};
use eiskit_core::system::theory_of;
use eiskit_core::{find_countermodel, prove, Atom, Budget, Eis, Formula, SuhAxiom, Target, Term};
use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name)).unwrap()
}

fn example() -> Eis {
    eiskit_core::parse_spec(&read("example1.eis")).unwrap().eis()
}

fn goal(name: &str) -> Formula {
    parse_formula_file(&read(name)).unwrap().remove(0).1
}

fn numeral(n: usize) -> Term {
    Term::iterate("s", n, Term::constant("0"))
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_ms: u128) -> Result<(), String> {
    ensure(elapsed.as_millis() < limit_ms, || format!("took {} ms, limit {limit_ms} ms", elapsed.as_millis()))
}

fn trichotomy() -> Check {
    let e = example();
    let budget = Budget::new(50, 1_000_000);
    let start = Instant::now();
    let mut verdicts = Vec::new();
    for n in 0..=20 {
        let proved: Vec<&str> = ["zero", "odd", "peven"]
            .into_iter()
            .filter(|p| prove(&e, &Atom::new(*p, vec![numeral(n)]), &budget).verdict.is_proved())
            .collect();
        verdicts.push((n, proved));
    }
    let elapsed = start.elapsed();
    let herbrand = herbrand_enumerate(&e, 22, &Budget::default()).map_err(|x| x.to_string())?;
    ensure(herbrand.stopped.is_none(), || "herbrand enumeration stopped early".into())?;
    for (n, proved) in &verdicts {
        let expected = if *n == 0 { "zero" } else if n % 2 == 1 { "odd" } else { "peven" };
        ensure(proved == &vec![expected], || format!("s^{n}(0): proved {proved:?}, expected [{expected}]"))?;
        for p in ["zero", "odd", "peven"] {
            let a = Atom::new(p, vec![numeral(*n)]);
            ensure(herbrand.contains(&a) == proved.contains(&p), || format!("{a}: herbrand model disagrees"))?;
        }
    }
    within(elapsed, 2000)?;
    Ok(format!("21 numerals, one predicate each, {} ms", elapsed.as_millis()))
}

fn countermodel() -> Check {
    let e = example();
    let theory = theory_of(&e);
    let f = goal("trichotomy.fof");
    let suh = SuhAxiom::parse("0,%x").unwrap();
    let start = Instant::now();
    let out = find_countermodel(&e.signature, &theory, &f, Target::Grounded, Some(&suh), 2).map_err(|x| x.to_string())?;
    let elapsed = start.elapsed();
    let CountermodelOutcome::Found(m) = out else {
        return Err(format!("no countermodel: {out:?}"));
    };
    let a = &m.structure;
    ensure(m.certified, || "not certified".into())?;
    ensure(a.size <= 2, || format!("domain size {}", a.size))?;
    let mut sentences: Vec<Formula> = theory.iter().map(|h| h.to_formula()).collect();
    sentences.push(suh.to_formula());
    ensure(verify_model(a, &sentences), || "theory or SuH fails in the structure".into())?;
    let negated = Formula::not(f.clone());
    ensure(a.eval(&negated, &mut Vec::new()) == Ok(true), || "the negated goal does not hold".into())?;
    ensure(a.satisfies(&Formula::not(m.refuted.clone())) == Ok(true), || "the refuted sentence holds".into())?;
    within(elapsed, 5000)?;
    Ok(format!("{} elements via {}, {} ms", a.size, m.route, elapsed.as_millis()))
}

/// Runs the CLI in-process with a large stack.
fn run_cli(args: &[&str]) -> Result<(Value, Duration), String> {
    let mut argv = vec!["eiskit", "--json"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    std::thread::Builder::new()
        .stack_size(64 << 20)
        .spawn(move || {
            let start = Instant::now();
            let r = eiskit_cli::run(&cli, false);
            let elapsed = start.elapsed();
            r.map(|(_, report)| (serde_json::to_value(report).unwrap(), elapsed)).map_err(|f| f.message)
        })
        .unwrap()
        .join()
        .unwrap()
}

/// Checks every node of a tree in report form against the rules of `e`.
fn replay(e: &Eis, node: &Value) -> Result<(), String> {
    let goal = parse_atom(node["goal"].as_str().unwrap()).map_err(|x| x.to_string())?;
    let label = node["rule"].as_str().ok_or("open leaf")?;
    let rule = e.rules.iter().find(|r| r.label.to_string() == label).ok_or_else(|| format!("no rule {label}"))?;
    let mut s = eiskit_core::Substitution::new();
    for (v, t) in node["substitution"].as_object().unwrap() {
        s.insert(v.clone(), parse_term(t.as_str().unwrap()).map_err(|x| x.to_string())?);
    }
    ensure(s.apply_atom(&rule.conclusion) == goal, || format!("{label} does not conclude {goal}"))?;
    let children = node["children"].as_array().unwrap();
    ensure(children.len() == rule.premises.len(), || format!("{goal}: premise count"))?;
    for (p, c) in rule.premises.iter().zip(children) {
        let expected = s.apply_atom(p);
        ensure(c["goal"].as_str() == Some(expected.to_string().as_str()), || format!("{goal}: child is not {expected}"))?;
        replay(e, c)?;
    }
    Ok(())
}

fn reducibility() -> Check {
    let path = fixtures().join("example1.eis");
    let formula = fixtures().join("reducible.fof");
    let (v, elapsed) = run_cli(&["check", path.to_str().unwrap(), formula.to_str().unwrap(), "--target", "grounded"])?;
    ensure(v["verdict"] == "proved", || format!("verdict {}", v["verdict"]))?;
    ensure(v["artifacts"]["qe"]["rule"] == "disjoint-existential-conjunction", || "unexpected QE rule".into())?;
    let answer = &v["artifacts"]["witness_search"]["witness"]["answer"];
    ensure(answer["substitution"]["Z"] == "s(%X)", || format!("witness {}", answer["substitution"]))?;
    replay(&example(), &answer["tree"])?;
    within(elapsed, 1000)?;
    Ok(format!("Z = s(%X), tree replays, {} ms", elapsed.as_millis()))
}

fn acyclicity() -> Check {
    let e = example();
    let start = Instant::now();
    let r = check_cycle_free(&e, "->", 12, &Budget::default()).map_err(|x| x.to_string())?;
    let elapsed = start.elapsed();
    let CycleReport::NoCycleUpToBound { edges, .. } = r else {
        return Err(format!("{r:?}"));
    };
    // every step shrinks the term, so no cycle can exist
    let m = herbrand_enumerate(&e, 12, &Budget::default()).map_err(|x| x.to_string())?;
    let steps: Vec<&Atom> = m.facts.iter().filter(|a| a.pred == "->").collect();
    ensure(steps.len() == edges, || format!("{} steps, {edges} edges", steps.len()))?;
    ensure(steps.iter().all(|a| a.args[0].size() > a.args[1].size()), || "a step does not shrink".into())?;
    within(elapsed, 2000)?;
    Ok(format!("{edges} edges at depth 12, {} ms", elapsed.as_millis()))
}

fn run_suites(suites: &[(&str, &[(&str, fn())])]) -> Check {
    let start = Instant::now();
    let mut failed = Vec::new();
    let mut total = 0;
    for (suite, props) in suites {
        for (name, f) in props.iter() {
            total += 1;
            if catch_unwind(AssertUnwindSafe(f)).is_err() {
                failed.push(format!("{suite}::{name}"));
            }
        }
    }
    ensure(failed.is_empty(), || format!("failed: {}", failed.join(", ")))?;
    Ok(format!("{total} checks, {} ms", start.elapsed().as_millis()))
}

fn properties() -> Check {
    run_suites(&[("terms", terms::SUITE), ("proof", proof::SUITE), ("models", models::SUITE)])
        .map(|s| format!("{s}, 256 cases each"))
}

fn goldens() -> Check {
    run_suites(&[("golden", golden::SUITE)])
}

/// Exit code, report with timing removed, and standard error.
fn binary(dir: &Path, threads: &str, args: &[&str]) -> Result<(i32, Value, String), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_eiskit"))
        .args(["--json", "--threads", threads])
        .args(args)
        .current_dir(dir)
        .env_remove("EISKIT_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    let mut v: Value = if o.stdout.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&o.stdout).map_err(|e| format!("{args:?}: {e}"))?
    };
    if let Some(m) = v.as_object_mut() {
        m.remove("timing");
    }
    Ok((o.status.code().unwrap_or(-1), v, String::from_utf8_lossy(&o.stderr).into_owned()))
}

fn determinism() -> Check {
    let dir = fixtures();
    let runs: &[&[&str]] = &[
        &["prove", "example1.eis", "zero(0)"],
        &["prove", "example1.eis", "odd(s(s(s(s(s(0))))))"],
        &["prove", "example1.eis", "peven(s(s(s(s(s(s(0)))))))"],
        &["prove", "example1.eis", "peven(s(s(s(0))))"],
        &["prove", "example1.eis", "geq(s(s(s(0))), s(0))"],
        &["prove", "example1.eis", "s(s(s(s(s(0))))) ->* s(0)"],
        &["prove", "example1.eis", "--depth", "3", "odd(s(s(s(s(s(0))))))"],
        &["prove", "loop.eis", "p(s(0))"],
        &["prove", "selfloop.eis", "a ->* b"],
        &["check", "example1.eis", "reducible.fof", "--target", "grounded"],
        &["check", "example1.eis", "reducible.fof", "--suh", "0,s(0)", "--max-domain", "2"],
        &["check", "example1.eis", "reducible.fof"],
        &["check", "example1.eis", "trichotomy.fof", "--suh", "0", "--max-domain", "2"],
        &["check", "example1.eis", "trichotomy.fof", "--target", "grounded", "--suh", "0,%x"],
        &["check", "example1.eis", "geq-zero.fof"],
        &["check", "example1.eis", "geq-zero.fof", "--target", "grounded"],
        &["check", "example1.eis", "cycle.fof", "--max-domain", "2"],
        &["check", "example1.eis", "cycle.fof", "--target", "grounded", "--max-domain", "2"],
    ];
    for args in runs {
        let one = binary(&dir, "1", args)?;
        let eight = binary(&dir, "8", args)?;
        ensure(one == eight, || format!("{args:?} differs:\n{one:?}\n{eight:?}"))?;
    }
    Ok(format!("{} runs with identical exit code, report and errors", runs.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("1 trichotomy on ground terms", trichotomy),
        ("2 grounded-model refutation", countermodel),
        ("3 reducibility", reducibility),
        ("4 bounded acyclicity", acyclicity),
        ("5 property suites", properties),
        ("6 golden files", goldens),
        ("7 determinism under parallelism", determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let result = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
