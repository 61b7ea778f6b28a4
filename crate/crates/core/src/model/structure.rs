use std::collections::BTreeMap;
use std::fmt::{self, Write};

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::ModelError;
use crate::formula::Formula;
use crate::term::{Atom, Term};

/// Key of a function table: a symbol of `F` or a grounded constant of `K`.
/// The derived order (all of `F` by name, then `K` by name) is the order in
/// which countermodel search enumerates tables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FnKey {
    Function(String),
    Grounded(String),
}

impl fmt::Display for FnKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnKey::Function(n) => write!(f, "{n}"),
            FnKey::Grounded(v) => write!(f, "%{v}"),
        }
    }
}

/// A total table over `D^arity`, indexed with the first argument most
/// significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table<T> {
    pub arity: usize,
    pub cells: Vec<T>,
}

pub fn cell_index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// A structure with domain `{0, ..., size-1}` over `F ∪ K`. Equality is
/// identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    pub size: usize,
    pub functions: BTreeMap<String, Table<usize>>,
    /// Values of the grounded constants `c_v`, keyed by `v`.
    pub grounded: BTreeMap<String, usize>,
    pub predicates: BTreeMap<String, Table<bool>>,
}

impl FiniteStructure {
    pub fn new(size: usize) -> Self {
        FiniteStructure { size, functions: BTreeMap::new(), grounded: BTreeMap::new(), predicates: BTreeMap::new() }
    }

    /// The arity is inferred from the number of cells, which is ambiguous on
    /// a one-element domain: there the table is read as a constant.
    pub fn with_function(mut self, name: &str, cells: Vec<usize>) -> Self {
        let arity = arity_of(self.size, cells.len());
        self.functions.insert(name.to_string(), Table { arity, cells });
        self
    }

    pub fn with_grounded(mut self, var: &str, value: usize) -> Self {
        self.grounded.insert(var.to_string(), value);
        self
    }

    /// Function tables in enumeration order.
    pub fn function_keys(&self) -> Vec<(FnKey, usize)> {
        let f = self.functions.iter().map(|(n, t)| (FnKey::Function(n.clone()), t.arity));
        f.chain(self.grounded.keys().map(|v| (FnKey::Grounded(v.clone()), 0))).collect()
    }

    /// Sets predicate `p` to hold exactly on `tuples`.
    pub fn with_predicate(mut self, p: &str, arity: usize, tuples: &[Vec<usize>]) -> Self {
        let mut cells = vec![false; self.size.pow(arity as u32)];
        for t in tuples {
            cells[cell_index(self.size, t)] = true;
        }
        self.predicates.insert(p.to_string(), Table { arity, cells });
        self
    }

    pub fn eval_term(&self, t: &Term, env: &[(String, usize)]) -> Result<usize, ModelError> {
        match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(w, _)| w == v)
                .map(|(_, d)| *d)
                .ok_or_else(|| ModelError::UnboundVariable(v.clone())),
            Term::Grounded(v) => self.grounded.get(v).copied().ok_or_else(|| ModelError::MissingSymbol(format!("%{v}"))),
            Term::App(f, args) => {
                let t = self.functions.get(f).ok_or_else(|| ModelError::MissingSymbol(f.clone()))?;
                if t.arity != args.len() {
                    return Err(ModelError::MissingSymbol(format!("{f}/{}", args.len())));
                }
                Ok(t.cells[self.index_of(args, env)?])
            }
        }
    }

    fn index_of(&self, args: &[Term], env: &[(String, usize)]) -> Result<usize, ModelError> {
        let mut i = 0;
        for a in args {
            i = i * self.size + self.eval_term(a, env)?;
        }
        Ok(i)
    }

    pub fn holds(&self, a: &Atom, env: &[(String, usize)]) -> Result<bool, ModelError> {
        let t = self.predicates.get(&a.pred).ok_or_else(|| ModelError::MissingSymbol(a.pred.clone()))?;
        if t.arity != a.args.len() {
            return Err(ModelError::MissingSymbol(format!("{}/{}", a.pred, a.args.len())));
        }
        Ok(t.cells[self.index_of(&a.args, env)?])
    }

    /// Tarskian truth of `f` under `env`; later bindings shadow earlier ones.
    pub fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<bool, ModelError> {
        Ok(match f {
            Formula::Atom(a) => self.holds(a, env)?,
            Formula::Equal(l, r) => self.eval_term(l, env)? == self.eval_term(r, env)?,
            Formula::Not(x) => !self.eval(x, env)?,
            Formula::And(xs) => {
                for x in xs {
                    if !self.eval(x, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(xs) => {
                for x in xs {
                    if self.eval(x, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(l, r) => !self.eval(l, env)? || self.eval(r, env)?,
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                let universal = matches!(f, Formula::Forall(..));
                for d in 0..self.size {
                    env.push((v.clone(), d));
                    let r = self.eval(b, env);
                    env.pop();
                    if r? != universal {
                        return Ok(!universal);
                    }
                }
                universal
            }
        })
    }

    /// Truth of a sentence.
    pub fn satisfies(&self, f: &Formula) -> Result<bool, ModelError> {
        self.eval(f, &mut Vec::new())
    }

    /// Mace4-style listing with the exported symbol names.
    pub fn to_mace4(&self) -> String {
        let mut out = format!("interpretation( {}, [], [\n", self.size);
        let mut items = Vec::new();
        for (f, t) in &self.functions {
            items.push(format!("    function({}, [{}])", shape(f, t.arity), join(&t.cells)));
        }
        for (v, d) in &self.grounded {
            items.push(format!("    function({}, [{d}])", crate::export::grounded_name(v)));
        }
        for (p, t) in &self.predicates {
            let cells: Vec<u8> = t.cells.iter().map(|&b| b as u8).collect();
            let name = crate::export::predicate_name(p);
            items.push(format!("    relation({}, [{}])", shape(&name, t.arity), join(&cells)));
        }
        out.push_str(&items.join(",\n"));
        out.push_str("\n]).\n");
        out
    }
}

fn arity_of(size: usize, cells: usize) -> usize {
    let mut arity = 0;
    let mut n = 1;
    while n < cells {
        n *= size.max(2);
        arity += 1;
    }
    arity
}

fn shape(name: &str, arity: usize) -> String {
    if arity == 0 {
        name.to_string()
    } else {
        format!("{name}({})", vec!["_"; arity].join(","))
    }
}

fn join<T: fmt::Display>(xs: &[T]) -> String {
    let mut s = String::new();
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write!(s, "{x}").unwrap();
    }
    s
}

fn tuples(size: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = size.pow(arity as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0; arity];
        for d in t.iter_mut().rev() {
            *d = i % size;
            i /= size;
        }
        t
    })
}

struct Tables<'a>(&'a FiniteStructure);

impl Serialize for Tables<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(self.0.functions.len() + self.0.grounded.len()))?;
        for (f, t) in &self.0.functions {
            let rows: Vec<(Vec<usize>, usize)> = tuples(self.0.size, t.arity).zip(t.cells.iter().copied()).collect();
            m.serialize_entry(f, &rows)?;
        }
        for (v, &d) in &self.0.grounded {
            m.serialize_entry(&format!("%{v}"), &[(Vec::<usize>::new(), d)])?;
        }
        m.end()
    }
}

struct Relations<'a>(&'a FiniteStructure);

impl Serialize for Relations<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(self.0.predicates.len()))?;
        for (p, t) in &self.0.predicates {
            let holds: Vec<Vec<usize>> =
                tuples(self.0.size, t.arity).zip(&t.cells).filter(|(_, &b)| b).map(|(x, _)| x).collect();
            m.serialize_entry(p, &holds)?;
        }
        m.end()
    }
}

/// `{"domain_size", "functions": {name: [[args, value]...]}, "predicates":
/// {name: [true tuples]}}`.
impl Serialize for FiniteStructure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(3))?;
        m.serialize_entry("domain_size", &self.size)?;
        m.serialize_entry("functions", &Tables(self))?;
        m.serialize_entry("predicates", &Relations(self))?;
        m.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn quantifiers_range_over_the_domain() {
        let a = FiniteStructure::new(2).with_predicate("p", 1, &[vec![0]]);
        assert!(a.satisfies(&parse_formula("exists X. p(X)").unwrap()).unwrap());
        assert!(!a.satisfies(&parse_formula("forall X. p(X)").unwrap()).unwrap());
        assert!(a.satisfies(&parse_formula("forall X. X = X").unwrap()).unwrap());
        assert!(!a.satisfies(&parse_formula("forall X Y. X = Y").unwrap()).unwrap());
    }

    #[test]
    fn missing_symbols_are_errors() {
        let a = FiniteStructure::new(1);
        assert_eq!(a.satisfies(&parse_formula("q").unwrap()), Err(ModelError::MissingSymbol("q".into())));
        assert!(a.satisfies(&parse_formula("exists X. X = c").unwrap()).is_err());
    }

    #[test]
    fn tables_index_first_argument_most_significant() {
        let a = FiniteStructure::new(3).with_function("f", (0..9).collect());
        assert_eq!(a.functions["f"].arity, 2);
        let t = crate::syntax::parse_term("f(a, %b)").unwrap();
        let a = a.with_function("a", vec![1]).with_grounded("b", 2);
        assert_eq!(a.eval_term(&t, &[]).unwrap(), 5);
    }
}
