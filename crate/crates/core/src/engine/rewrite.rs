use super::pattern::{match_pattern, substitute, Binding};
use super::{Formula, Mode, TraceEvent, CODE_SLOTS};
use crate::algebra::Builtin;
use crate::error::Result;
use crate::eval::{child_loc, Loc, Machine};
use crate::scalar::Natural;
use crate::tree::{Node, Op, Path};

/// A term that step one of the rewrite loop may evaluate: a reference, or
/// a built-in whose operands contain no variables and no user operations.
fn ready<N>(n: &Node<N>) -> bool {
    match n {
        Node::Ref(_) => true,
        Node::Set(s) => match &s.op {
            Some(Op::Name(l)) => match Builtin::lookup(l.as_str()) {
                Some(Builtin::Select) => s.children.first().is_some_and(|c| ground(&c.node)),
                Some(_) => s.nodes().all(ground),
                None => false,
            },
            _ => false,
        },
        _ => false,
    }
}

fn ground<N>(n: &Node<N>) -> bool {
    match n {
        Node::Leaf(_) | Node::Ref(_) => true,
        Node::Var(_) => false,
        Node::Set(s) if s.op.is_none() => s.nodes().all(ground),
        Node::Set(_) => ready(n),
    }
}

impl<N: Natural> Machine<N> {
    /// Rewrites the data in the set at `frame` with `rules` until no rule
    /// matches. Each round first evaluates every ready built-in term, then
    /// takes the first rule with at least one match and replaces all of its
    /// outermost, non-overlapping matches (found in preorder).
    pub fn run_rewrite(&mut self, frame: &Path, rules: &[Formula<N>]) -> Result<()> {
        let loc = self.locate(frame)?;
        self.run_rewrite_at(&loc, rules)
    }

    pub(crate) fn run_rewrite_at(&mut self, frame: &[usize], rules: &[Formula<N>]) -> Result<()> {
        loop {
            self.evaluate_ready(frame)?;
            let mut fired = false;
            for (index, rule) in rules.iter().enumerate() {
                let matches = self.find_matches(frame, rule);
                if matches.is_empty() {
                    continue;
                }
                for (loc, binding) in matches {
                    let target = self.path_of(&loc);
                    self.trace(TraceEvent {
                        step: 0,
                        mode: Mode::Rewrite,
                        index,
                        target,
                    });
                    let replacement = substitute(rule.rhs(), &binding)?;
                    self.put(&loc, replacement)?;
                }
                fired = true;
                break;
            }
            if !fired {
                return Ok(());
            }
        }
    }

    /// Locations of the frame's data children, skipping code slots.
    fn data_children(&self, frame: &[usize]) -> Vec<Loc> {
        let Some(set) = self.node(frame).as_set() else {
            return Vec::new();
        };
        set.children
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                !c.key
                    .name()
                    .is_some_and(|l| CODE_SLOTS.contains(&l.as_str()))
            })
            .map(|(i, _)| child_loc(frame, i))
            .collect()
    }

    fn evaluate_ready(&mut self, frame: &[usize]) -> Result<()> {
        let mut stack: Vec<Loc> = self.data_children(frame);
        stack.reverse();
        while let Some(loc) = stack.pop() {
            let node = self.node(&loc);
            if ready(node) {
                self.eval_at(&loc)?;
            } else if let Some(set) = node.as_set() {
                stack.extend((0..set.len()).rev().map(|i| child_loc(&loc, i)));
            }
        }
        Ok(())
    }

    fn find_matches(&self, frame: &[usize], rule: &Formula<N>) -> Vec<(Loc, Binding<N>)> {
        let mut out = Vec::new();
        let mut stack: Vec<Loc> = self.data_children(frame);
        stack.reverse();
        while let Some(loc) = stack.pop() {
            let node = self.node(&loc);
            if let Some(b) = match_pattern(rule.lhs(), node) {
                out.push((loc, b));
            } else if let Some(set) = node.as_set() {
                stack.extend((0..set.len()).rev().map(|i| child_loc(&loc, i)));
            }
        }
        out
    }
}
