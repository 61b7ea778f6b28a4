use serde::Serialize;
use serde_json::{Map, Value};

/// Machine-readable outcome of one command. Apart from `timing`, the report
/// depends only on the inputs and the budgets.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    /// The subcommand and its arguments, defaults filled in.
    pub command: Value,
    pub verdict: Option<String>,
    pub justification: String,
    pub budget: Map<String, Value>,
    pub consumed: Map<String, Value>,
    pub artifacts: Map<String, Value>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timing {
    pub elapsed_ms: u64,
}

/// What a command hands back before timing is attached.
#[derive(Debug, Default)]
pub struct Outcome {
    pub verdict: Option<&'static str>,
    pub justification: String,
    pub budget: Map<String, Value>,
    pub consumed: Map<String, Value>,
    pub artifacts: Map<String, Value>,
    /// Human-readable rendering for the text mode.
    pub text: String,
}

impl Outcome {
    pub fn new(verdict: Option<&'static str>, justification: impl Into<String>) -> Self {
        Outcome { verdict, justification: justification.into(), ..Outcome::default() }
    }

    pub fn budget(mut self, key: &str, v: impl Serialize) -> Self {
        self.budget.insert(key.into(), to_value(v));
        self
    }

    pub fn consumed(mut self, key: &str, v: impl Serialize) -> Self {
        self.consumed.insert(key.into(), to_value(v));
        self
    }

    pub fn artifact(mut self, key: &str, v: impl Serialize) -> Self {
        self.artifacts.insert(key.into(), to_value(v));
        self
    }

    pub fn text(mut self, text: impl Into<String>) -> Self {
        self.text = text.into();
        self
    }

    /// 0 proved, 1 disproved or refuted by a countermodel, 2 otherwise;
    /// commands without a verdict succeed with 0.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            None | Some("proved") => 0,
            Some("disproved" | "countermodel-found") => 1,
            Some(_) => 2,
        }
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}
