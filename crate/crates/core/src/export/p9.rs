use std::collections::{BTreeMap, BTreeSet};

use super::{ExportError, ExportJob, GoalMode, ReadError, Syntax};
use crate::formula::Formula;
use crate::system::HornSentence;
use crate::term::{Atom, Term, REWRITE, REWRITES};

/// Prover9 syntax for one sentence. Variables are lower-cased; a clash with
/// another variable or a function symbol adds a numeric suffix.
struct P9 {
    vars: BTreeMap<String, String>,
}

impl P9 {
    fn for_formula(f: &Formula) -> Self {
        let mut taken: BTreeSet<String> = f.functions().into_iter().map(|(n, _)| n).collect();
        let mut order = Vec::new();
        f.visit(&mut |g| {
            if let Formula::Forall(v, _) | Formula::Exists(v, _) = g {
                if !order.contains(v) {
                    order.push(v.clone());
                }
            }
        });
        let mut vars = BTreeMap::new();
        for v in order {
            let base = v.to_lowercase();
            let mut name = base.clone();
            let mut n = 1;
            while taken.contains(&name) {
                name = format!("{base}_{n}");
                n += 1;
            }
            taken.insert(name.clone());
            vars.insert(v, name);
        }
        P9 { vars }
    }
}

impl Syntax for P9 {
    const NOT: &'static str = "-";
    const AND: &'static str = "&";
    const OR: &'static str = "|";
    const IMPLIES: &'static str = "->";
    const TRUE: &'static str = "$T";
    const FALSE: &'static str = "$F";

    fn var(&self, v: &str) -> String {
        self.vars.get(v).cloned().unwrap_or_else(|| v.to_lowercase())
    }

    fn function(&self, f: &str) -> String {
        f.to_string()
    }

    fn predicate(&self, p: &str) -> String {
        p.to_string()
    }

    fn quantifier(&self, universal: bool, vars: &[String], body: &Formula) -> String {
        let q = if universal { "all" } else { "exists" };
        let prefix: Vec<String> = vars.iter().map(|v| format!("{q} {v}")).collect();
        format!("{} ({})", prefix.join(" "), self.formula(body))
    }
}

/// Prover9 takes a free name starting with `u` to `z` for a variable.
fn check_constants(job: &ExportJob) -> Result<(), ExportError> {
    let mut formulas: Vec<Formula> = job.theory.iter().map(HornSentence::to_formula).collect();
    formulas.extend(job.suh.iter().map(|s| s.to_formula()));
    formulas.extend(job.goal.iter().map(|(g, _)| g.clone()));
    for f in &formulas {
        for (name, arity) in f.functions() {
            if arity == 0 && name.starts_with(|c: char| ('u'..='z').contains(&c)) {
                return Err(ExportError::ReadAsVariable(name));
            }
        }
    }
    Ok(())
}

fn sentence(f: &Formula) -> String {
    format!("{}.\n", P9::for_formula(f).formula(f))
}

/// `formulas(assumptions)` with the theory, the SuH axiom and, for
/// countermodel jobs, the negated goal; `formulas(goals)` for prove jobs.
pub fn emit_p9(job: &ExportJob) -> Result<String, ExportError> {
    job.check_names()?;
    check_constants(job)?;
    let mut out = String::from("formulas(assumptions).\n");
    for h in &job.theory {
        out.push_str(&sentence(&HornSentence::to_formula(h)));
    }
    if let Some(s) = &job.suh {
        out.push_str(&sentence(&s.to_formula()));
    }
    if let Some((g, GoalMode::Countermodel)) = &job.goal {
        out.push_str(&sentence(&Formula::not(g.clone())));
    }
    out.push_str("end_of_list.\n");
    if let Some((g, GoalMode::Prove)) = &job.goal {
        out.push_str("\nformulas(goals).\n");
        out.push_str(&sentence(g));
        out.push_str("end_of_list.\n");
    }
    Ok(out)
}

/// The two lists of a Prover9 input file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct P9Problem {
    pub assumptions: Vec<Formula>,
    pub goals: Vec<Formula>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(&'static str),
}

const PUNCT: [&str; 9] = ["->", "-", "&", "|", "(", ")", ",", ".", "="];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ReadError> {
    let mut out = Vec::new();
    let mut line = 1;
    let b = text.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '%' {
            while i < b.len() && b[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
            let start = i;
            i += 1;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Word(text[start..i].to_string()), line));
        } else if let Some(p) = PUNCT.iter().find(|p| text[i..].starts_with(**p)) {
            out.push((Tok::Punct(p), line));
            i += p.len();
        } else {
            return Err(ReadError { line, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// Variables bound by enclosing quantifiers, innermost last.
    scope: Vec<String>,
}

impl Reader {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ReadError> {
        let line = self.toks.get(self.pos).or(self.toks.last()).map_or(1, |(_, l)| *l);
        Err(ReadError { line, message: message.into() })
    }

    fn eat(&mut self, p: &'static str) -> bool {
        if self.peek() == Some(&Tok::Punct(p)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &'static str) -> Result<(), ReadError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.fail(format!("expected `{p}`"))
        }
    }

    fn word(&mut self) -> Result<String, ReadError> {
        match self.toks.get(self.pos) {
            Some((Tok::Word(w), _)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.fail("expected a name"),
        }
    }

    fn formula(&mut self) -> Result<Formula, ReadError> {
        let first = self.unitary()?;
        for (op, conj) in [("&", true), ("|", false)] {
            if self.peek() == Some(&Tok::Punct(op)) {
                let mut xs = vec![first];
                while self.eat(op) {
                    xs.push(self.unitary()?);
                }
                return Ok(if conj { Formula::And(xs) } else { Formula::Or(xs) });
            }
        }
        if self.eat("->") {
            return Ok(Formula::implies(first, self.unitary()?));
        }
        Ok(first)
    }

    fn unitary(&mut self) -> Result<Formula, ReadError> {
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("-") {
            return Ok(Formula::not(self.unitary()?));
        }
        let head = self.word()?;
        match head.as_str() {
            "$T" => return Ok(Formula::top()),
            "$F" => return Ok(Formula::bottom()),
            "all" | "exists" => {
                let v = self.word()?;
                self.scope.push(v.clone());
                let body = self.unitary();
                self.scope.pop();
                let var = variable_name(&v);
                return Ok(if head == "all" { Formula::forall(var, body?) } else { Formula::exists(var, body?) });
            }
            _ => {}
        }
        let l = self.application(head)?;
        if self.eat("=") {
            let w = self.word()?;
            return Ok(Formula::Equal(l, self.application(w)?));
        }
        match l {
            Term::App(p, args) => {
                let pred = match (p.as_str(), args.len()) {
                    ("rew", 2) => REWRITE.to_string(),
                    ("rews", 2) => REWRITES.to_string(),
                    _ => p,
                };
                Ok(Formula::Atom(Atom::new(pred, args)))
            }
            _ => self.fail("expected an atom"),
        }
    }

    fn application(&mut self, name: String) -> Result<Term, ReadError> {
        let mut args = Vec::new();
        if self.eat("(") {
            loop {
                let w = self.word()?;
                args.push(self.application(w)?);
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        if args.is_empty() {
            if self.scope.contains(&name) {
                return Ok(Term::var(variable_name(&name)));
            }
            if let Some(v) = name.strip_prefix("c_").filter(|v| !v.is_empty()) {
                return Ok(Term::grounded(v));
            }
        }
        Ok(Term::app(name, args))
    }
}

/// `x` becomes `X` and `z_1` becomes `Z_1`.
fn variable_name(v: &str) -> String {
    let mut cs = v.chars();
    cs.next().map(|c| c.to_ascii_uppercase().to_string() + cs.as_str()).unwrap_or_default()
}

/// Reads the `formulas(assumptions)` and `formulas(goals)` lists in the
/// subset produced by [`emit_p9`]. Variables come back upper-cased, so
/// formulas agree with the originals up to renaming of bound variables.
pub fn read_p9(text: &str) -> Result<P9Problem, ReadError> {
    let mut r = Reader { toks: lex(text)?, pos: 0, scope: Vec::new() };
    let mut out = P9Problem::default();
    while r.peek().is_some() {
        if r.word()? != "formulas" {
            return r.fail("expected `formulas`");
        }
        r.expect("(")?;
        let list = r.word()?;
        r.expect(")")?;
        r.expect(".")?;
        let mut items = Vec::new();
        while r.peek() != Some(&Tok::Word("end_of_list".into())) {
            items.push(r.formula()?);
            r.expect(".")?;
        }
        r.pos += 1;
        r.expect(".")?;
        match list.as_str() {
            "assumptions" => out.assumptions.extend(items),
            "goals" => out.goals.extend(items),
            _ => return r.fail(format!("unsupported list `{list}`")),
        }
    }
    Ok(out)
}
