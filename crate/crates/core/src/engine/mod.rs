//! The two execution disciplines.
//!
//! * Sequential: a list of `⟨address, tree term⟩` instructions run in order,
//!   steered by the reserved frame child `ip`.
//! * Rewrite: a list of `⟨pattern, template⟩` formulas applied to whatever
//!   data in the frame matches them, until no formula applies.

mod pattern;
mod rewrite;
mod sequential;

use std::fmt;

use crate::error::{Error, Result};
use crate::tree::{Node, Path};

pub use pattern::{match_pattern, substitute, Abstraction, Binding};

/// Frame children that hold code rather than data.
pub(crate) const CODE_SLOTS: [&str; 2] = ["body", "rules"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Rewrite,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequential => "sequential",
            Mode::Rewrite => "rewrite",
        })
    }
}

/// Emitted before every transition an engine performs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    /// Machine-wide transition counter, from 0.
    pub step: u64,
    pub mode: Mode,
    /// 0-based index of the instruction or formula that fired.
    pub index: usize,
    /// Absolute path of the node about to be replaced.
    pub target: Path,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.mode {
            Mode::Sequential => "instruction",
            Mode::Rewrite => "formula",
        };
        write!(
            f,
            "step {} {} {} {} at {}",
            self.step,
            self.mode,
            what,
            self.index + 1,
            if self.target.is_identity() {
                ".".to_string()
            } else {
                self.target.to_string()
            }
        )
    }
}

/// `at = [path]` paired with the tree term whose value is written there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instruction<N> {
    pub at: Path,
    pub to: Node<N>,
}

impl<N: Clone> Instruction<N> {
    pub fn new(at: Path, to: Node<N>) -> Self {
        Self { at, to }
    }

    /// Reads `{ at = [path] to ... }`.
    pub fn from_node(node: &Node<N>) -> Result<Self> {
        let set = node
            .as_set()
            .filter(|s| s.op.is_none() && s.len() == 2)
            .ok_or_else(|| Error::InvalidInstruction("expected `{ at = [path] to ... }`".into()))?;
        let at = match set.named("at") {
            Some(Node::Ref(p)) => p.clone(),
            _ => return Err(Error::InvalidInstruction("`at` must be a reference".into())),
        };
        let to = set
            .named("to")
            .ok_or_else(|| Error::InvalidInstruction("missing `to`".into()))?
            .clone();
        Ok(Self { at, to })
    }

    /// Reads an ordered instruction list (the children of a `body`).
    pub fn list_from_node(node: &Node<N>) -> Result<Vec<Self>> {
        let set = node
            .as_set()
            .ok_or_else(|| Error::InvalidInstruction("instruction list must be a set".into()))?;
        set.nodes()
            .enumerate()
            .map(|(index, n)| {
                Self::from_node(n).map_err(|e| Error::Instruction {
                    index,
                    source: Box::new(e),
                })
            })
            .collect()
    }
}

/// A rewrite formula `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula<N> {
    lhs: Node<N>,
    rhs: Node<N>,
}

impl<N: Clone> Formula<N> {
    /// Checks that function variables are applied to distinct first-order
    /// variables bound elsewhere in the pattern, and that the template uses
    /// only variables of the pattern.
    pub fn new(lhs: Node<N>, rhs: Node<N>) -> Result<Self> {
        pattern::validate(&lhs, &rhs)?;
        Ok(Self { lhs, rhs })
    }

    pub fn lhs(&self) -> &Node<N> {
        &self.lhs
    }

    pub fn rhs(&self) -> &Node<N> {
        &self.rhs
    }

    /// Reads `{ lhs ... rhs ... }`.
    pub fn from_node(node: &Node<N>) -> Result<Self> {
        let set = node
            .as_set()
            .filter(|s| s.op.is_none() && s.len() == 2)
            .ok_or_else(|| Error::InvalidFormula("expected `{ lhs ... rhs ... }`".into()))?;
        match (set.named("lhs"), set.named("rhs")) {
            (Some(l), Some(r)) => Self::new(l.clone(), r.clone()),
            _ => Err(Error::InvalidFormula("expected `lhs` and `rhs`".into())),
        }
    }

    pub fn list_from_node(node: &Node<N>) -> Result<Vec<Self>> {
        let set = node
            .as_set()
            .ok_or_else(|| Error::InvalidFormula("formula list must be a set".into()))?;
        set.nodes().map(Self::from_node).collect()
    }
}
