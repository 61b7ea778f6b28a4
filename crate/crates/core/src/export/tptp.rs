use std::fmt::Write;

use super::{is_lower_word, ExportError, ExportJob, GoalMode, ReadError, Syntax};
use crate::formula::Formula;
use crate::system::HornSentence;
use crate::term::{Atom, Term, REWRITE, REWRITES};

struct Tptp;

fn quote(name: &str) -> String {
    if is_lower_word(name) {
        name.to_string()
    } else {
        format!("'{name}'")
    }
}

impl Syntax for Tptp {
    const NOT: &'static str = "~";
    const AND: &'static str = "&";
    const OR: &'static str = "|";
    const IMPLIES: &'static str = "=>";
    const TRUE: &'static str = "$true";
    const FALSE: &'static str = "$false";

    fn var(&self, v: &str) -> String {
        v.to_string()
    }

    fn function(&self, f: &str) -> String {
        quote(f)
    }

    fn predicate(&self, p: &str) -> String {
        quote(p)
    }

    fn quantifier(&self, universal: bool, vars: &[String], body: &Formula) -> String {
        let body = match body {
            Formula::Forall(..) | Formula::Exists(..) => self.formula(body),
            _ => self.unit(body),
        };
        format!("{}[{}]: {body}", if universal { "!" } else { "?" }, vars.join(","))
    }
}

/// One `fof` line per sentence: the theory and SuH axiom as axioms, the
/// goal as a conjecture, or its negation as an axiom for countermodel jobs.
pub fn emit_tptp(job: &ExportJob) -> Result<String, ExportError> {
    job.check_names()?;
    let mut out = String::new();
    let mut line = |name: &str, role: &str, f: &Formula| {
        writeln!(out, "fof({}, {role}, {}).", quote(name), Tptp.formula(f)).unwrap();
    };
    for h in &job.theory {
        line(&h.label.slug(), "axiom", &HornSentence::to_formula(h));
    }
    if let Some(s) = &job.suh {
        line("suh", "axiom", &s.to_formula());
    }
    match &job.goal {
        Some((g, GoalMode::Prove)) => line("goal", "conjecture", g),
        Some((g, GoalMode::Countermodel)) => line("negated_goal", "axiom", &Formula::not(g.clone())),
        None => {}
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TptpFormula {
    pub name: String,
    pub role: String,
    pub formula: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Quoted(String),
    Dollar(String),
    Punct(&'static str),
}

const PUNCT: [&str; 15] = ["<=>", "=>", "!=", "(", ")", "[", "]", ",", ":", ".", "!", "?", "~", "&", "|"];

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ReadError> {
    let mut out = Vec::new();
    let mut line = 1;
    let b = text.as_bytes();
    let mut i = 0;
    let err = |line, message: String| ReadError { line, message };
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
        } else if c == '\'' {
            let start = i + 1;
            i = start;
            while i < b.len() && b[i] != b'\'' {
                i += 1;
            }
            if i == b.len() {
                return Err(err(line, "unterminated quoted name".into()));
            }
            out.push((Tok::Quoted(text[start..i].to_string()), line));
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
            let start = i;
            i += 1;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            let word = text[start..i].to_string();
            let tok = if c == '$' {
                Tok::Dollar(word)
            } else if c.is_ascii_uppercase() {
                Tok::Upper(word)
            } else {
                Tok::Lower(word)
            };
            out.push((tok, line));
        } else if c == '=' && !text[i..].starts_with("=>") {
            out.push((Tok::Punct("="), line));
            i += 1;
        } else if let Some(p) = PUNCT.iter().find(|p| text[i..].starts_with(**p)) {
            out.push((Tok::Punct(p), line));
            i += p.len();
        } else {
            return Err(err(line, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Reader {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |(_, l)| *l)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ReadError> {
        Err(ReadError { line: self.line(), message: message.into() })
    }

    fn next(&mut self) -> Result<Tok, ReadError> {
        match self.toks.get(self.pos) {
            Some((t, _)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.fail("unexpected end of input"),
        }
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

    fn name(&mut self) -> Result<String, ReadError> {
        match self.next()? {
            Tok::Lower(s) | Tok::Quoted(s) => Ok(s),
            t => self.fail(format!("expected a name, found {t:?}")),
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
        if self.eat("=>") {
            return Ok(Formula::implies(first, self.unitary()?));
        }
        if self.peek() == Some(&Tok::Punct("<=>")) {
            return self.fail("`<=>` is outside the supported subset");
        }
        Ok(first)
    }

    fn unitary(&mut self) -> Result<Formula, ReadError> {
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("~") {
            return Ok(Formula::not(self.unitary()?));
        }
        for (q, universal) in [("!", true), ("?", false)] {
            if self.eat(q) {
                self.expect("[")?;
                let mut vars = Vec::new();
                loop {
                    match self.next()? {
                        Tok::Upper(v) => vars.push(v),
                        t => return self.fail(format!("expected a variable, found {t:?}")),
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
                self.expect("]")?;
                self.expect(":")?;
                let body = self.unitary()?;
                return Ok(vars.into_iter().rev().fold(body, |b, v| {
                    if universal {
                        Formula::forall(v, b)
                    } else {
                        Formula::exists(v, b)
                    }
                }));
            }
        }
        if let Some(Tok::Dollar(d)) = self.peek().cloned() {
            self.pos += 1;
            return match d.as_str() {
                "$true" => Ok(Formula::top()),
                "$false" => Ok(Formula::bottom()),
                _ => self.fail(format!("unsupported `{d}`")),
            };
        }
        let (head, quoted, args) = self.application()?;
        if self.eat("=") || self.peek() == Some(&Tok::Punct("!=")) {
            let negated = self.eat("!=");
            let l = to_term(head, quoted, args);
            let (h2, q2, a2) = self.application()?;
            let eq = Formula::Equal(l, to_term(h2, q2, a2));
            return Ok(if negated { Formula::not(eq) } else { eq });
        }
        let pred = match (head.as_str(), quoted, args.len()) {
            ("rew", false, 2) => REWRITE.to_string(),
            ("rews", false, 2) => REWRITES.to_string(),
            _ => head,
        };
        Ok(Formula::Atom(Atom::new(pred, args)))
    }

    /// A name or variable with optional arguments; the bool marks quoting.
    fn application(&mut self) -> Result<(String, bool, Vec<Term>), ReadError> {
        let (name, quoted) = match self.next()? {
            Tok::Lower(s) => (s, false),
            Tok::Quoted(s) => (s, true),
            Tok::Upper(v) => return Ok((v, false, Vec::new())),
            t => return self.fail(format!("expected a term, found {t:?}")),
        };
        let mut args = Vec::new();
        if self.eat("(") {
            loop {
                let (h, q, a) = self.application()?;
                args.push(to_term(h, q, a));
                if !self.eat(",") {
                    break;
                }
            }
            self.expect(")")?;
        }
        Ok((name, quoted, args))
    }
}

fn to_term(name: String, quoted: bool, args: Vec<Term>) -> Term {
    if name.starts_with(|c: char| c.is_ascii_uppercase()) && !quoted {
        return Term::var(name);
    }
    match name.strip_prefix("c_") {
        Some(v) if !quoted && args.is_empty() && !v.is_empty() => Term::grounded(v),
        _ => Term::app(name, args),
    }
}

/// Reads `fof(name, role, formula).` statements in the subset produced by
/// [`emit_tptp`], undoing its name mapping.
pub fn read_tptp(text: &str) -> Result<Vec<TptpFormula>, ReadError> {
    let mut r = Reader { toks: lex(text)?, pos: 0 };
    let mut out = Vec::new();
    while r.peek().is_some() {
        match r.next()? {
            Tok::Lower(k) if k == "fof" => {}
            t => return r.fail(format!("expected `fof`, found {t:?}")),
        }
        r.expect("(")?;
        let name = match r.next()? {
            Tok::Lower(s) | Tok::Quoted(s) | Tok::Upper(s) => s,
            t => return r.fail(format!("expected a formula name, found {t:?}")),
        };
        r.expect(",")?;
        let role = r.name()?;
        r.expect(",")?;
        let formula = r.formula()?;
        r.expect(")")?;
        r.expect(".")?;
        out.push(TptpFormula { name, role, formula });
    }
    Ok(out)
}
