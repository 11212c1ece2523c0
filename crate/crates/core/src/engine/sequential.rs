use super::{Instruction, Mode, TraceEvent};
use crate::error::{Error, Result};
use crate::eval::Machine;
use crate::scalar::Natural;
use crate::tree::{self, compose, Label, Node, Path, Segment};

fn ip_path() -> Path {
    Path::new(vec![Segment::Name(Label::new("ip").expect("label"))])
}

impl<N: Natural> Machine<N> {
    /// Runs `body` against the set at `frame`. The frame's `ip` child is
    /// reset to 0 and advanced after each instruction unless the
    /// instruction wrote `ip` itself; the run halts once `ip` is past the
    /// last instruction.
    pub fn run_sequential(&mut self, frame: &Path, body: &[Instruction<N>]) -> Result<()> {
        let loc = self.locate(frame)?;
        self.run_sequential_at(&loc, body)
    }

    pub(crate) fn run_sequential_at(
        &mut self,
        frame: &[usize],
        body: &[Instruction<N>],
    ) -> Result<()> {
        if self.node(frame).as_set().is_none() {
            return Err(Error::NotASet(self.path_of(frame)));
        }
        let ip = ip_path();
        let frame_node = tree::at_loc_mut(&mut self.tree.root, frame).expect("valid frame");
        tree::replace_in(frame_node, &ip, Node::Leaf(N::zero()))?;
        loop {
            let index = match self.node(frame).child(&ip.segments()[0]) {
                Some(Node::Leaf(n)) => n.to_usize().unwrap_or(usize::MAX),
                _ => return Err(Error::InvalidInstruction("`ip` must be a leaf".into())),
            };
            let Some(instr) = body.get(index) else {
                return Ok(());
            };
            let target = if self.devices.is_output(&instr.at) {
                instr.at.clone()
            } else {
                compose(&self.path_of(frame), &instr.at)
            };
            self.trace(TraceEvent {
                step: 0,
                mode: Mode::Sequential,
                index,
                target,
            });
            self.step(frame, instr).map_err(|e| Error::Instruction {
                index,
                source: Box::new(e),
            })?;
            if instr.at != ip {
                let next = N::from_usize(index + 1).ok_or(Error::Overflow)?;
                let frame_node = tree::at_loc_mut(&mut self.tree.root, frame).expect("valid frame");
                tree::replace_in(frame_node, &ip, Node::Leaf(next))?;
            }
        }
    }

    fn step(&mut self, frame: &[usize], instr: &Instruction<N>) -> Result<()> {
        let value = self.evaluate_shallow_in(frame, instr.to.clone())?;
        if self.devices.is_output(&instr.at) {
            self.spend()?;
            return self.devices.write(&instr.at, &value);
        }
        self.write_rel(frame, &instr.at, value).map(|_| ())
    }
}
