use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "eiskit", version, about = "Inference systems, rewriting systems and their semantic properties")]
pub struct Cli {
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long, global = true, env = "EISKIT_THREADS")]
    pub threads: Option<usize>,

    /// Print a JSON run report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Search for a closed proof tree of an atom.
    Prove(ProveArgs),
    /// Enumerate instances of an atom with closed proof trees.
    Solve(SolveArgs),
    /// Check a sentence against the ground or grounded canonical model.
    Check(CheckArgs),
    /// List the ground facts of the canonical model up to a term depth.
    Enumerate(EnumerateArgs),
    /// Look for a cycle in a binary relation over ground terms.
    Cycles(CyclesArgs),
    /// Look for a repeating goal in well-formed proof trees.
    Termination(TerminationArgs),
    /// Write the theory, and optionally a goal, as TPTP or Prover9 input.
    Export(ExportArgs),
    /// Ground the universal variables of a positive sentence.
    Qe(QeArgs),
    /// Print the Horn theory of a system.
    Theory(TheoryArgs),
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct SearchBudget {
    /// Maximum proof-tree depth.
    #[arg(long, default_value_t = 32)]
    pub depth: usize,
    /// Maximum number of rule applications.
    #[arg(long, default_value_t = 100_000)]
    pub nodes: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ProveArgs {
    pub spec: PathBuf,
    pub atom: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: SearchBudget,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    pub spec: PathBuf,
    pub atom: String,
    /// Stop after this many answers.
    #[arg(long, default_value_t = 10)]
    pub max_answers: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: SearchBudget,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetArg {
    Ground,
    Grounded,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    pub spec: PathBuf,
    /// File holding exactly one sentence.
    pub formula: PathBuf,
    #[arg(long, value_enum, default_value_t = TargetArg::Ground)]
    pub target: TargetArg,
    /// Largest domain tried by the countermodel search.
    #[arg(long, default_value_t = 4)]
    pub max_domain: usize,
    /// Cap on structures tried by the countermodel search.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_candidates: u64,
    /// Ground terms for the surjectivity axiom, e.g. "0, %x".
    #[arg(long)]
    pub suh: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: SearchBudget,
}

#[derive(Args, Debug, Serialize)]
pub struct EnumerateArgs {
    pub spec: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub term_depth: usize,
    /// Cap on universe size and derived facts.
    #[arg(long, default_value_t = 100_000)]
    pub nodes: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct CyclesArgs {
    pub spec: PathBuf,
    /// Binary predicate whose graph is searched.
    #[arg(long, default_value = "->")]
    pub pred: String,
    #[arg(long, default_value_t = 12)]
    pub term_depth: usize,
    #[arg(long, default_value_t = 100_000)]
    pub nodes: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct TerminationArgs {
    pub spec: PathBuf,
    /// Also report goals subsumed by an ancestor. Such loops are not
    /// evidence of non-termination.
    #[arg(long)]
    pub subsumption: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub budget: SearchBudget,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Tptp,
    P9,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Prove,
    Countermodel,
}

#[derive(Args, Debug, Serialize)]
pub struct ExportArgs {
    pub spec: PathBuf,
    /// File holding exactly one sentence to use as the goal.
    #[arg(long)]
    pub formula: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: FormatArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Prove)]
    pub mode: ModeArg,
    #[arg(long)]
    pub suh: Option<String>,
    /// Write the problem here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct QeArgs {
    pub formula: String,
}

#[derive(Args, Debug, Serialize)]
pub struct TheoryArgs {
    pub spec: PathBuf,
}
