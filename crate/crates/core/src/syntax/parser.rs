use std::collections::BTreeSet;

use indexmap::IndexMap;

use super::lexer::{lex, Tok, Token};
use super::{ParseError, SpecBody, SpecDocument, RESERVED_NAMES};
use crate::diagnostic::{Diagnostic, Position};
use crate::formula::Formula;
use crate::system::{Clause, InferenceRule, ReplacementMap, RewriteRule, RuleLabel, Signature};
use crate::term::{is_rewrite_predicate, Atom, Term, REWRITE, REWRITES};

type PResult<T> = Result<T, Diagnostic>;

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

#[derive(Clone, Debug)]
struct Spanned<T> {
    value: T,
    pos: Position,
}

enum Statement {
    System(String),
    Func(Vec<(Spanned<String>, usize)>),
    Pred(Vec<(Spanned<String>, usize)>),
    MuBottom,
    Mu(Spanned<String>, Vec<usize>),
    Clause(Spanned<Atom>, Vec<Spanned<Atom>>),
    Rule(Spanned<Term>, Term, Vec<Spanned<Atom>>),
    Infer(Spanned<String>, Spanned<Atom>, Vec<Spanned<Atom>>),
}

impl Statement {
    fn is_gtrs(&self) -> bool {
        matches!(self, Statement::MuBottom | Statement::Mu(..) | Statement::Clause(..) | Statement::Rule(..))
    }
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, at: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.at].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.at + 1).min(self.tokens.len() - 1)].tok
    }

    fn pos(&self) -> Position {
        self.tokens[self.at].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.at].tok.clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{tok}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        Diagnostic::at(self.pos(), format!("syntax error: expected {wanted}, found {}", self.peek()))
    }

    fn name(&mut self, what: &str) -> PResult<Spanned<String>> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Name(n) => {
                self.bump();
                Ok(Spanned { value: n, pos })
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn number(&mut self, what: &str) -> PResult<usize> {
        match self.peek().clone() {
            Tok::Name(n) if n.chars().all(|c| c.is_ascii_digit()) => {
                let pos = self.pos();
                self.bump();
                n.parse().map_err(|_| Diagnostic::at(pos, format!("number `{n}` is too large")))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Grounded(v) => {
                self.bump();
                Ok(Term::Grounded(v))
            }
            Tok::Name(f) => {
                self.bump();
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        args.push(self.term()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                Ok(Term::App(f, args))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// `p(t1, ..., tn)`, `s -> t` or `s ->* t`; with `allow_eq`, `s = t`
    /// yields an equation instead.
    fn atomic(&mut self, allow_eq: bool) -> PResult<Spanned<Formula>> {
        let pos = self.pos();
        let lhs = self.term()?;
        let pred = match self.peek() {
            Tok::Arrow => Some(REWRITE),
            Tok::ArrowStar => Some(REWRITES),
            Tok::Eq if allow_eq => {
                self.bump();
                let rhs = self.term()?;
                return Ok(Spanned { value: Formula::Equal(lhs, rhs), pos });
            }
            _ => None,
        };
        let value = match (pred, lhs) {
            (Some(p), lhs) => {
                self.bump();
                let rhs = self.term()?;
                Formula::Atom(Atom::new(p, vec![lhs, rhs]))
            }
            (None, Term::App(p, args)) => Formula::Atom(Atom::new(p, args)),
            (None, t) => return Err(Diagnostic::at(pos, format!("syntax error: expected an atom, found term `{t}`"))),
        };
        Ok(Spanned { value, pos })
    }

    fn atom(&mut self) -> PResult<Spanned<Atom>> {
        let Spanned { value, pos } = self.atomic(false)?;
        match value {
            Formula::Atom(a) => Ok(Spanned { value: a, pos }),
            _ => unreachable!(),
        }
    }

    fn conditions(&mut self) -> PResult<Vec<Spanned<Atom>>> {
        let mut out = Vec::new();
        if self.eat(&Tok::If) {
            loop {
                out.push(self.atom()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        Ok(out)
    }

    fn decls(&mut self) -> PResult<Vec<(Spanned<String>, usize)>> {
        let mut out = Vec::new();
        loop {
            let n = self.name("a symbol name")?;
            self.expect(Tok::Slash)?;
            let k = self.number("an arity")?;
            out.push((n, k));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn statement(&mut self) -> PResult<Spanned<Statement>> {
        let pos = self.pos();
        let kw = match self.peek().clone() {
            Tok::Name(k) => k,
            _ => return Err(self.unexpected("a statement keyword")),
        };
        self.bump();
        let st = match kw.as_str() {
            "system" => Statement::System(self.name("a system name")?.value),
            "func" => Statement::Func(self.decls()?),
            "pred" => Statement::Pred(self.decls()?),
            "mu_bottom" => Statement::MuBottom,
            "mu" => {
                let f = self.name("a function symbol")?;
                self.expect(Tok::Colon)?;
                self.expect(Tok::LBrace)?;
                let mut ps = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        ps.push(self.number("an argument position")?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RBrace)?;
                }
                Statement::Mu(f, ps)
            }
            "clause" => {
                let head = self.atom()?;
                Statement::Clause(head, self.conditions()?)
            }
            "rule" => {
                let lpos = self.pos();
                let lhs = self.term()?;
                self.expect(Tok::Arrow)?;
                let rhs = self.term()?;
                Statement::Rule(Spanned { value: lhs, pos: lpos }, rhs, self.conditions()?)
            }
            "infer" => {
                let label = self.name("a rule label")?;
                self.expect(Tok::Colon)?;
                let concl = self.atom()?;
                Statement::Infer(label, concl, self.conditions()?)
            }
            other => {
                return Err(Diagnostic::at(pos, format!("syntax error: unknown statement keyword `{other}`")));
            }
        };
        self.expect(Tok::Dot)?;
        Ok(Spanned { value: st, pos })
    }

    fn recover(&mut self) {
        loop {
            match self.bump() {
                Tok::Dot | Tok::Eof => break,
                _ => {}
            }
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if let Tok::Name(k) = self.peek() {
            if k == "forall" || k == "exists" {
                let universal = k == "forall";
                self.bump();
                let mut vars = Vec::new();
                while let Tok::Var(v) = self.peek().clone() {
                    self.bump();
                    vars.push(v);
                }
                if vars.is_empty() {
                    return Err(self.unexpected("a variable"));
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                return Ok(vars.into_iter().rev().fold(body, |b, v| {
                    if universal {
                        Formula::forall(v, b)
                    } else {
                        Formula::exists(v, b)
                    }
                }));
            }
        }
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut xs = vec![self.conjunction()?];
        while self.eat(&Tok::Or) {
            xs.push(self.conjunction()?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Formula::Or(xs) })
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut xs = vec![self.unary()?];
        while self.eat(&Tok::And) {
            xs.push(self.unary()?);
        }
        Ok(if xs.len() == 1 { xs.pop().unwrap() } else { Formula::And(xs) })
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Name(k) if (k == "forall" || k == "exists") => self.formula(),
            Tok::Name(k) if (k == "true" || k == "false") && self.peek2() != &Tok::LParen => {
                self.bump();
                Ok(if k == "true" { Formula::top() } else { Formula::bottom() })
            }
            _ => Ok(self.atomic(true)?.value),
        }
    }
}

fn sorted(mut ds: Vec<Diagnostic>) -> ParseError {
    ds.sort_by(|a, b| match (a.position, b.position) {
        (Some(x), Some(y)) => x.cmp(&y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    ParseError { diagnostics: ds }
}

/// Parses and validates an `.eis` document.
pub fn parse_spec(text: &str) -> Result<SpecDocument, ParseError> {
    let (tokens, mut errors) = lex(text, 1);
    let mut p = Parser::new(tokens);
    let mut statements = Vec::new();
    while p.peek() != &Tok::Eof {
        match p.statement() {
            Ok(s) => statements.push(s),
            Err(d) => {
                errors.push(d);
                p.recover();
            }
        }
    }
    if statements.is_empty() && errors.is_empty() {
        errors.push(Diagnostic::at(Position { line: 1, column: 1 }, "empty document: no statements"));
    }
    let doc = build(statements, &mut errors);
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(sorted(errors))
    }
}

fn build(statements: Vec<Spanned<Statement>>, errors: &mut Vec<Diagnostic>) -> SpecDocument {
    let mut name = None;
    let mut functions = IndexMap::new();
    let mut predicates = IndexMap::new();
    let declare = |table: &mut IndexMap<String, usize>, n: &Spanned<String>, k: usize, errors: &mut Vec<Diagnostic>| {
        if RESERVED_NAMES.contains(&n.value.as_str()) {
            errors.push(Diagnostic::at(n.pos, format!("`{}` is reserved and cannot be declared", n.value)));
        } else if table.contains_key(&n.value) {
            errors.push(Diagnostic::at(n.pos, format!("symbol `{}` is declared twice", n.value)));
        } else {
            table.insert(n.value.clone(), k);
        }
    };
    let gtrs_at = statements.iter().find(|s| s.value.is_gtrs()).map(|s| s.pos);
    let eis_at = statements.iter().find(|s| matches!(s.value, Statement::Infer(..))).map(|s| s.pos);
    if let (Some(g), Some(e)) = (gtrs_at, eis_at) {
        errors.push(Diagnostic::at(
            g.max(e),
            "document mixes GTRS statements (clause, rule, mu) with raw `infer` rules",
        ));
    }
    for s in &statements {
        match &s.value {
            Statement::System(n) => {
                if name.is_some() {
                    errors.push(Diagnostic::at(s.pos, "more than one `system` statement"));
                }
                name = Some(n.clone());
            }
            Statement::Func(ds) => ds.iter().for_each(|(n, k)| declare(&mut functions, n, *k, errors)),
            Statement::Pred(ds) => ds.iter().for_each(|(n, k)| declare(&mut predicates, n, *k, errors)),
            _ => {}
        }
    }
    let mut sig = Signature::new();
    for (f, &n) in &functions {
        sig = sig.with_function(f, n);
    }
    for (p, &n) in &predicates {
        sig = sig.with_predicate(p, n);
    }
    let sig = sig.with_rewriting();
    let check = |a: &Spanned<Atom>, errors: &mut Vec<Diagnostic>| {
        for m in sig.check_atom(&a.value) {
            errors.push(Diagnostic::at(a.pos, m));
        }
        if !a.value.grounded_constants().is_empty() {
            errors.push(Diagnostic::at(a.pos, "grounded constants are not allowed in system definitions"));
        }
    };

    let mut mu = ReplacementMap::top();
    let mut clauses = Vec::new();
    let mut rules = Vec::new();
    let mut raw = Vec::new();
    let mut labels = BTreeSet::new();
    for s in statements {
        match s.value {
            Statement::MuBottom => mu.bottom = true,
            Statement::Mu(f, ps) => match sig.function_arity(&f.value) {
                None => errors.push(Diagnostic::at(f.pos, format!("replacement map for undeclared symbol `{}`", f.value))),
                Some(n) => {
                    for &i in &ps {
                        if i < 1 || i > n {
                            errors.push(Diagnostic::at(
                                f.pos,
                                format!("replacement map position {i} for `{}` is outside 1..{n}", f.value),
                            ));
                        }
                    }
                    if mu.entries.contains_key(&f.value) {
                        errors.push(Diagnostic::at(f.pos, format!("replacement map for `{}` given twice", f.value)));
                    }
                    mu.entries.insert(f.value, ps.into_iter().collect());
                }
            },
            Statement::Clause(head, body) => {
                if is_rewrite_predicate(&head.value.pred) {
                    errors.push(Diagnostic::at(
                        head.pos,
                        format!("clause head uses reserved predicate `{}`", head.value.pred),
                    ));
                }
                check(&head, errors);
                body.iter().for_each(|a| check(a, errors));
                clauses.push(Clause { head: head.value, body: body.into_iter().map(|a| a.value).collect() });
            }
            Statement::Rule(lhs, rhs, conds) => {
                if lhs.value.is_var() {
                    errors.push(Diagnostic::at(lhs.pos, "rule left-hand side is a variable"));
                }
                let head = Spanned { value: Atom::rewrite(lhs.value.clone(), rhs.clone()), pos: lhs.pos };
                check(&head, errors);
                conds.iter().for_each(|a| check(a, errors));
                rules.push(RewriteRule {
                    lhs: lhs.value,
                    rhs,
                    conditions: conds.into_iter().map(|a| a.value).collect(),
                });
            }
            Statement::Infer(label, concl, prems) => {
                if !labels.insert(label.value.clone()) {
                    errors.push(Diagnostic::at(label.pos, format!("rule label `{}` is used twice", label.value)));
                }
                check(&concl, errors);
                prems.iter().for_each(|a| check(a, errors));
                raw.push(InferenceRule::new(
                    RuleLabel::Named(label.value),
                    prems.into_iter().map(|a| a.value).collect(),
                    concl.value,
                ));
            }
            Statement::System(_) | Statement::Func(_) | Statement::Pred(_) => {}
        }
    }
    let body = if eis_at.is_some() && gtrs_at.is_none() {
        SpecBody::Eis { rules: raw }
    } else {
        SpecBody::Gtrs { replacement_map: mu, clauses, rules }
    };
    SpecDocument { name, functions, predicates, body }
}

fn parse_whole<T>(text: &str, first_line: usize, f: impl FnOnce(&mut Parser) -> PResult<T>) -> Result<T, ParseError> {
    let (tokens, errors) = lex(text, first_line);
    if !errors.is_empty() {
        return Err(sorted(errors));
    }
    let mut p = Parser::new(tokens);
    if p.peek() == &Tok::Eof {
        return Err(ParseError { diagnostics: vec![Diagnostic::at(p.pos(), "empty input")] });
    }
    let out = f(&mut p).map_err(|d| ParseError { diagnostics: vec![d] })?;
    if p.peek() != &Tok::Eof {
        return Err(ParseError { diagnostics: vec![p.unexpected("end of input")] });
    }
    Ok(out)
}

/// Parses a formula without checking it against a signature.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_whole(text, 1, |p| p.formula())
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_whole(text, 1, |p| p.term())
}

pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    parse_whole(text, 1, |p| p.atom().map(|a| a.value))
}

/// Parses a formula and checks its symbols against `sig`.
pub fn parse_formula_checked(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let f = parse_formula(text)?;
    check_formula(&f, sig, None)?;
    Ok(f)
}

/// Checks the symbols of `f` against `sig`, reporting problems at `pos`.
pub fn check_formula(f: &Formula, sig: &Signature, pos: Option<Position>) -> Result<(), ParseError> {
    let mut msgs = Vec::new();
    f.visit(&mut |g| match g {
        Formula::Atom(a) => msgs.extend(sig.check_atom(a)),
        Formula::Equal(l, r) => {
            sig.check_term(l, &mut msgs);
            sig.check_term(r, &mut msgs);
        }
        _ => {}
    });
    if msgs.is_empty() {
        return Ok(());
    }
    Err(ParseError {
        diagnostics: msgs
            .into_iter()
            .map(|m| Diagnostic { position: pos, message: m })
            .collect(),
    })
}

/// Parses a `.fof` file: one formula per line, `#` comments, blank lines
/// ignored. Returns each formula with its 1-based line number.
pub fn parse_formula_file(text: &str) -> Result<Vec<(usize, Formula)>, ParseError> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let code = line.split('#').next().unwrap_or("");
        if code.trim().is_empty() {
            continue;
        }
        match parse_whole(line, i + 1, |p| p.formula()) {
            Ok(f) => out.push((i + 1, f)),
            Err(e) => errors.extend(e.diagnostics),
        }
    }
    if errors.is_empty() && out.is_empty() {
        errors.push(Diagnostic::at(Position { line: 1, column: 1 }, "no formulas in file"));
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(sorted(errors))
    }
}
