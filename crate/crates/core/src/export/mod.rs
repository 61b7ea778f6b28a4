//! TPTP FOF and Prover9/Mace4 renderings of Horn theories, SuH axioms and
//! goals.
//!
//! Name mapping, shared by both formats:
//!
//! | source     | exported            |
//! |------------|---------------------|
//! | `->`       | `rew`               |
//! | `->*`      | `rews`              |
//! | `%v`       | `c_v`               |
//! | `X`        | `X` (TPTP), `x` (Prover9) |
//!
//! Other symbols keep their names. In TPTP a function or predicate name
//! that is not a lower-case word is single-quoted (`'0'`).

mod p9;
mod tptp;

use serde::Serialize;

use crate::formula::Formula;
use crate::model::SuhAxiom;
use crate::system::HornSentence;
use crate::term::{is_rewrite_predicate, Atom, Term};

pub use p9::{emit_p9, read_p9, P9Problem};
pub use tptp::{emit_tptp, read_tptp, TptpFormula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    Tptp,
    P9,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GoalMode {
    /// The goal is a conjecture to prove.
    Prove,
    /// The negated goal joins the assumptions, for a model finder.
    Countermodel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExportJob {
    pub theory: Vec<HornSentence>,
    pub suh: Option<SuhAxiom>,
    pub goal: Option<(Formula, GoalMode)>,
}

impl ExportJob {
    pub fn theory(theory: Vec<HornSentence>) -> Self {
        ExportJob { theory, suh: None, goal: None }
    }

    pub fn with_suh(mut self, suh: SuhAxiom) -> Self {
        self.suh = Some(suh);
        self
    }

    pub fn with_goal(mut self, goal: Formula, mode: GoalMode) -> Self {
        self.goal = Some((goal, mode));
        self
    }

    pub fn emit(&self, format: ExportFormat) -> Result<String, ExportError> {
        match format {
            ExportFormat::Tptp => emit_tptp(self),
            ExportFormat::P9 => emit_p9(self),
        }
    }

    fn check_names(&self) -> Result<(), ExportError> {
        let mut formulas: Vec<Formula> = self.theory.iter().map(HornSentence::to_formula).collect();
        if let Some(s) = &self.suh {
            formulas.push(s.to_formula());
        }
        if let Some((g, _)) = &self.goal {
            formulas.push(g.clone());
        }
        for f in &formulas {
            for (name, _) in f.functions() {
                if name.starts_with("c_") {
                    return Err(ExportError::Reserved(name));
                }
                if !is_symbol_name(&name) {
                    return Err(ExportError::Unrepresentable(name));
                }
            }
            for a in f.atoms() {
                if !is_rewrite_predicate(&a.pred) && (a.pred == "rew" || a.pred == "rews") {
                    return Err(ExportError::Reserved(a.pred.clone()));
                }
                if !is_rewrite_predicate(&a.pred) && !is_symbol_name(&a.pred) {
                    return Err(ExportError::Unrepresentable(a.pred.clone()));
                }
            }
            let mut bad = None;
            f.visit(&mut |g| {
                if let Formula::Forall(v, _) | Formula::Exists(v, _) = g {
                    if !is_var_name(v) {
                        bad.get_or_insert_with(|| v.clone());
                    }
                }
            });
            if let Some(v) = bad {
                return Err(ExportError::Unrepresentable(v));
            }
            for v in f.grounded_constants() {
                if !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(ExportError::Unrepresentable(format!("%{v}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExportError {
    #[error("symbol `{0}` cannot be written in the target format")]
    Unrepresentable(String),
    #[error("symbol `{0}` clashes with a name reserved by the export mapping")]
    Reserved(String),
    #[error("constant `{0}` would be read as a variable by Prover9")]
    ReadAsVariable(String),
}

/// Failure of the subset readers, with the 1-based line.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}: {message}")]
pub struct ReadError {
    pub line: usize,
    pub message: String,
}

fn is_symbol_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_var_name(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase()) && is_symbol_name(s)
}

pub(crate) fn is_lower_word(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase()) && is_symbol_name(s)
}

/// Exported name of a predicate, without quoting.
pub fn predicate_name(p: &str) -> String {
    match p {
        crate::term::REWRITE => "rew".into(),
        crate::term::REWRITES => "rews".into(),
        _ => p.to_string(),
    }
}

/// Exported name of the grounded constant `%v`.
pub fn grounded_name(v: &str) -> String {
    format!("c_{v}")
}

/// Shared formula traversal for both formats. `Syntax` supplies the
/// concrete tokens; operands of binary connectives are parenthesised unless
/// atomic, so no precedence rules of the target format are relied on.
pub(crate) trait Syntax {
    fn var(&self, v: &str) -> String;
    fn function(&self, f: &str) -> String;
    fn predicate(&self, p: &str) -> String;
    fn quantifier(&self, universal: bool, vars: &[String], body: &Formula) -> String;
    const NOT: &'static str;
    const AND: &'static str;
    const OR: &'static str;
    const IMPLIES: &'static str;
    const TRUE: &'static str;
    const FALSE: &'static str;

    fn term(&self, t: &Term) -> String {
        match t {
            Term::Var(v) => self.var(v),
            Term::Grounded(v) => grounded_name(v),
            Term::App(f, args) if args.is_empty() => self.function(f),
            Term::App(f, args) => {
                let a: Vec<String> = args.iter().map(|x| self.term(x)).collect();
                format!("{}({})", self.function(f), a.join(","))
            }
        }
    }

    fn atom(&self, a: &Atom) -> String {
        let p = self.predicate(&predicate_name(&a.pred));
        if a.args.is_empty() {
            p
        } else {
            let args: Vec<String> = a.args.iter().map(|x| self.term(x)).collect();
            format!("{p}({})", args.join(","))
        }
    }

    /// A formula at the top of a sentence or a quantifier body.
    fn formula(&self, f: &Formula) -> String {
        match f {
            Formula::And(xs) if xs.len() >= 2 => self.join(xs, Self::AND),
            Formula::Or(xs) if xs.len() >= 2 => self.join(xs, Self::OR),
            Formula::Implies(l, r) => format!("{} {} {}", self.unit(l), Self::IMPLIES, self.unit(r)),
            Formula::Forall(..) | Formula::Exists(..) => {
                let universal = matches!(f, Formula::Forall(..));
                let mut vars = Vec::new();
                let mut body = f;
                loop {
                    match (body, universal) {
                        (Formula::Forall(v, b), true) | (Formula::Exists(v, b), false) => {
                            vars.push(self.var(v));
                            body = b;
                        }
                        _ => break,
                    }
                }
                self.quantifier(universal, &vars, body)
            }
            _ => self.unit(f),
        }
    }

    fn join(&self, xs: &[Formula], op: &str) -> String {
        let parts: Vec<String> = xs.iter().map(|x| self.unit(x)).collect();
        parts.join(&format!(" {op} "))
    }

    /// A formula in operand position.
    fn unit(&self, f: &Formula) -> String {
        match f {
            Formula::Atom(a) => self.atom(a),
            Formula::Equal(l, r) => format!("{} = {}", self.term(l), self.term(r)),
            Formula::And(xs) if xs.is_empty() => Self::TRUE.to_string(),
            Formula::Or(xs) if xs.is_empty() => Self::FALSE.to_string(),
            Formula::And(xs) | Formula::Or(xs) if xs.len() == 1 => self.unit(&xs[0]),
            Formula::Not(x) => match x.as_ref() {
                Formula::Atom(_) | Formula::Not(_) => format!("{}{}", Self::NOT, self.unit(x)),
                Formula::And(xs) | Formula::Or(xs) if xs.is_empty() => format!("{}{}", Self::NOT, self.unit(x)),
                _ => format!("{}({})", Self::NOT, self.formula(x)),
            },
            _ => format!("({})", self.formula(f)),
        }
    }
}
