//! Inputs shared by the benchmarks.

use std::path::PathBuf;

use eiskit_core::syntax::parse_formula_file;
use eiskit_core::{parse_spec, Atom, Eis, Formula, Term};

pub fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// The parity system of `fixtures/example1.eis`.
pub fn example() -> Eis {
    parse_spec(&fixture("example1.eis")).expect("fixture parses").eis()
}

/// The single formula of a `.fof` fixture.
pub fn goal(name: &str) -> Formula {
    parse_formula_file(&fixture(name)).expect("fixture parses").remove(0).1
}

pub fn numeral(n: usize) -> Term {
    Term::iterate("s", n, Term::constant("0"))
}

/// `pred(s^n(0))`.
pub fn unary(pred: &str, n: usize) -> Atom {
    Atom::new(pred, vec![numeral(n)])
}
