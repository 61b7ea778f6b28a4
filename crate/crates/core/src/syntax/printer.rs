use std::fmt::Write;

use super::{SpecBody, SpecDocument};
use crate::formula::Formula;
use crate::term::Atom;

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

fn join(atoms: &[Atom]) -> String {
    atoms.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn decl_line(out: &mut String, kw: &str, table: &indexmap::IndexMap<String, usize>) {
    if !table.is_empty() {
        let items: Vec<String> = table.iter().map(|(n, k)| format!("{n}/{k}")).collect();
        writeln!(out, "{kw} {}.", items.join(", ")).unwrap();
    }
}

fn conditions(out: &mut String, body: &[Atom]) {
    if !body.is_empty() {
        write!(out, " :- {}", join(body)).unwrap();
    }
    out.push_str(".\n");
}

/// Canonical text of a document; `parse_spec` reads it back unchanged.
pub fn print_spec(doc: &SpecDocument) -> String {
    let mut out = String::new();
    if let Some(n) = &doc.name {
        writeln!(out, "system {n}.").unwrap();
    }
    decl_line(&mut out, "func", &doc.functions);
    decl_line(&mut out, "pred", &doc.predicates);
    match &doc.body {
        SpecBody::Gtrs { replacement_map, clauses, rules } => {
            if replacement_map.bottom {
                out.push_str("mu_bottom.\n");
            }
            for (f, ps) in &replacement_map.entries {
                let ps: Vec<String> = ps.iter().map(ToString::to_string).collect();
                writeln!(out, "mu {f}: {{{}}}.", ps.join(", ")).unwrap();
            }
            for c in clauses {
                write!(out, "clause {}", c.head).unwrap();
                conditions(&mut out, &c.body);
            }
            for r in rules {
                write!(out, "rule {} -> {}", r.lhs, r.rhs).unwrap();
                conditions(&mut out, &r.conditions);
            }
        }
        SpecBody::Eis { rules } => {
            for r in rules {
                write!(out, "infer {}: {}", r.label.slug(), r.conclusion).unwrap();
                conditions(&mut out, &r.premises);
            }
        }
    }
    out
}
