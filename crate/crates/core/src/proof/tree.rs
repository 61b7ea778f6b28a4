use std::fmt;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::subst::Substitution;
use crate::system::{Eis, RuleLabel};
use crate::term::Atom;

/// A finite proof tree. Each derivation node records the rule used and the
/// substitution mapping the rule's own variables to terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub goal: Atom,
    pub node: ProofNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofNode {
    Open,
    Derivation { rule: RuleLabel, substitution: Substitution, children: Vec<ProofTree> },
}

impl ProofTree {
    pub fn open(goal: Atom) -> Self {
        ProofTree { goal, node: ProofNode::Open }
    }

    pub fn children(&self) -> &[ProofTree] {
        match &self.node {
            ProofNode::Open => &[],
            ProofNode::Derivation { children, .. } => children,
        }
    }

    /// No open goal occurs in the tree.
    pub fn is_closed(&self) -> bool {
        match &self.node {
            ProofNode::Open => false,
            ProofNode::Derivation { children, .. } => children.iter().all(ProofTree::is_closed),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(ProofTree::size).sum::<usize>()
    }

    /// The root alone has depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(ProofTree::depth).max().unwrap_or(0)
    }

    /// Checks that every derivation node is an instance of its rule:
    /// `σ(conclusion) = goal` and the children's goals are `σ(premises)`.
    pub fn replay(&self, e: &Eis) -> Result<(), String> {
        let ProofNode::Derivation { rule, substitution, children } = &self.node else {
            return Ok(());
        };
        let r = e.rule(rule).ok_or_else(|| format!("unknown rule {rule}"))?;
        if substitution.apply_atom(&r.conclusion) != self.goal {
            return Err(format!("{rule} with {substitution} does not conclude {}", self.goal));
        }
        if children.len() != r.premises.len() {
            return Err(format!("{rule} at {} has {} children, expected {}", self.goal, children.len(), r.premises.len()));
        }
        for (c, p) in children.iter().zip(&r.premises) {
            let expected = substitution.apply_atom(p);
            if c.goal != expected {
                return Err(format!("child {} of {} should be {expected}", c.goal, self.goal));
            }
            c.replay(e)?;
        }
        Ok(())
    }

    fn fmt_indented(&self, f: &mut fmt::Formatter<'_>, indent: usize) -> fmt::Result {
        let pad = "  ".repeat(indent);
        match &self.node {
            ProofNode::Open => writeln!(f, "{pad}{}    [open]", self.goal),
            ProofNode::Derivation { rule, children, .. } => {
                writeln!(f, "{pad}{}    [{rule}]", self.goal)?;
                for c in children {
                    c.fmt_indented(f, indent + 1)?;
                }
                Ok(())
            }
        }
    }
}

/// Indented text, one goal per line with the rule that closes it; the
/// premises of a node follow it one level deeper.
impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_indented(f, 0)
    }
}

struct SubstJson<'a>(&'a Substitution);

impl Serialize for SubstJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(self.0.len()))?;
        for (v, t) in self.0.iter() {
            m.serialize_entry(v, &t.to_string())?;
        }
        m.end()
    }
}

/// `{"goal", "rule", "substitution", "children"}` with atoms and terms in
/// concrete syntax. Open goals have a null rule.
impl Serialize for ProofTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ProofTree", 4)?;
        s.serialize_field("goal", &self.goal.to_string())?;
        match &self.node {
            ProofNode::Open => {
                s.serialize_field("rule", &None::<String>)?;
                s.serialize_field("substitution", &SubstJson(&Substitution::new()))?;
                s.serialize_field("children", &Vec::<ProofTree>::new())?;
            }
            ProofNode::Derivation { rule, substitution, children } => {
                s.serialize_field("rule", &Some(rule.to_string()))?;
                s.serialize_field("substitution", &SubstJson(substitution))?;
                s.serialize_field("children", children)?;
            }
        }
        s.end()
    }
}
