//! Function templates, type templates and appliances.
//!
//! A function template is a set with `args`, `mode` (0 sequential,
//! 1 rewrite), `body` or `rules`, and a `result` slot. A call copies the
//! template, fills the argument slots, runs the copy as a frame, and
//! replaces the copy with whatever ended up in `result`. Because a body may
//! copy any template it can see (including its own), recursion needs no
//! extra machinery.
//!
//! The heap appliance keeps an implicit binary heap in the positional
//! children of its `data` set, ordered by its `compare` function (or by
//! `lt` on leaves when it has none).

use crate::algebra::{nat_compare, CmpOp};
use crate::engine::{Formula, Instruction};
use crate::error::{Error, Result};
use crate::eval::{assign_argument, child_loc, is_template, Loc, Machine};
use crate::scalar::Natural;
use crate::tree::{Child, Key, Label, Node, Path, Segment};

/// The standard library: `gcd`, `fact`, `div`, `Date` with `weekday`, and
/// `heap`.
pub const STDLIB: &str = include_str!("../stdlib.evo");

fn is_placeholder<N>(n: &Node<N>) -> bool {
    matches!(n, Node::Set(s) if s.op.is_none() && s.is_empty())
}

impl<N: Natural> Machine<N> {
    /// A deep copy of the set at `template`.
    pub fn instantiate(&self, template: &Path) -> Result<Node<N>> {
        match self.resolve(template) {
            None => Err(Error::PathUnresolvable(template.clone())),
            Some(n @ Node::Set(_)) => Ok(n.clone()),
            Some(_) => Err(Error::NotASet(template.clone())),
        }
    }

    /// Copies `template` to `dest` (inserting or replacing).
    pub fn instantiate_at(&mut self, template: &Path, dest: &Path) -> Result<()> {
        let copy = self.instantiate(template)?;
        self.replace_subtree(dest, copy)
    }

    /// Fills argument slots of the function instance at `instance`.
    pub fn assign_args(
        &mut self,
        instance: &Path,
        args: impl IntoIterator<Item = (Label, Node<N>)>,
    ) -> Result<()> {
        let loc = self.locate(instance)?;
        let node = self.node_mut(&loc);
        for (i, (label, value)) in args.into_iter().enumerate() {
            assign_argument(node, &Key::Named(label), i, value)?;
        }
        Ok(())
    }

    /// Runs the populated function instance at `instance` and replaces it
    /// with its result, which is also returned.
    pub fn call(&mut self, instance: &Path) -> Result<Node<N>> {
        let loc = self.locate(instance)?;
        self.call_at(&loc)
    }

    pub(crate) fn call_at(&mut self, loc: &[usize]) -> Result<Node<N>> {
        let node = self.node(loc);
        if !is_template(node) {
            return Err(Error::NotATemplate(self.path_of(loc)));
        }
        let set = node.as_set().expect("template is a set");
        if let Some(Node::Set(args)) = set.named("args") {
            for (i, c) in args.children.iter().enumerate() {
                if is_placeholder(&c.node) {
                    let slot = c
                        .key
                        .name()
                        .map_or_else(|| format!("#{i}"), |l| l.to_string());
                    return Err(Error::MissingArgument(slot));
                }
            }
        }
        let mode = set
            .named("mode")
            .and_then(Node::as_leaf)
            .and_then(|m| m.to_u8());
        let result = Segment::Name(Label::new("result").expect("label"));
        match mode {
            Some(0) => {
                let body = Instruction::list_from_node(set.named("body").ok_or_else(|| {
                    Error::InvalidInstruction("sequential template without `body`".into())
                })?)?;
                self.run_sequential_at(loc, &body)?;
                if let Some(i) = self.node(loc).as_set().and_then(|s| s.position(&result)) {
                    self.eval_at(&child_loc(loc, i))?;
                }
            }
            Some(1) => {
                let rules = Formula::list_from_node(set.named("rules").ok_or_else(|| {
                    Error::InvalidFormula("rewrite template without `rules`".into())
                })?)?;
                self.run_rewrite_at(loc, &rules)?;
            }
            _ => return Err(Error::InvalidInstruction("`mode` must be 0 or 1".into())),
        }
        let value = self
            .node(loc)
            .child(&result)
            .cloned()
            .ok_or_else(|| Error::PathUnresolvable(self.path_of(loc).child(result)))?;
        self.put(loc, value.clone())?;
        Ok(value)
    }

    fn heap_data(&self, heap: &Path) -> Result<(Loc, Loc)> {
        let h = self.locate(heap)?;
        let data_seg = Segment::Name(Label::new("data").expect("label"));
        let i = self
            .node(&h)
            .as_set()
            .and_then(|s| s.position(&data_seg))
            .ok_or_else(|| Error::PathUnresolvable(heap.child(data_seg.clone())))?;
        let d = child_loc(&h, i);
        if self.node(&d).as_set().is_none() {
            return Err(Error::NotASet(heap.child(data_seg)));
        }
        Ok((h, d))
    }

    fn heap_less(&mut self, heap: &Loc, a: &Node<N>, b: &Node<N>) -> Result<bool> {
        let compare = self
            .node(heap)
            .as_set()
            .and_then(|s| s.named("compare"))
            .filter(|c| is_template(*c))
            .cloned();
        let outcome = match compare {
            None => nat_compare(CmpOp::Lt, a, b),
            Some(mut instance) => assign_argument(&mut instance, &Key::Positional, 0, a.clone())
                .and_then(|_| assign_argument(&mut instance, &Key::Positional, 1, b.clone()))
                .and_then(|_| self.with_scratch(heap, instance, |m, loc| m.call_at(loc))),
        };
        outcome
            .and_then(|v| {
                v.as_leaf()
                    .and_then(N::as_bool)
                    .ok_or(Error::NotBoolean { op: "compare" })
            })
            .map_err(|e| Error::CompareFailed(Box::new(e)))
    }

    fn heap_item(&self, data: &Loc, i: usize) -> Node<N> {
        self.node(data).as_set().expect("heap data")[i].clone()
    }

    fn heap_swap(&mut self, data: &Loc, i: usize, j: usize) {
        self.node_mut(data)
            .as_set_mut()
            .expect("heap data")
            .children
            .swap(i, j);
    }

    /// Inserts `item` into the heap appliance at `heap`.
    pub fn heap_put(&mut self, heap: &Path, item: Node<N>) -> Result<()> {
        let (h, data) = self.heap_data(heap)?;
        self.spend()?;
        let set = self.node_mut(&data).as_set_mut().expect("heap data");
        set.children.push(Child {
            key: Key::Positional,
            node: item,
        });
        let mut i = set.len() - 1;
        while i > 0 {
            let parent = (i - 1) / 2;
            let (x, p) = (self.heap_item(&data, i), self.heap_item(&data, parent));
            if !self.heap_less(&h, &x, &p)? {
                break;
            }
            self.heap_swap(&data, i, parent);
            i = parent;
        }
        Ok(())
    }

    /// Removes and returns the least item of the heap appliance at `heap`.
    pub fn heap_get(&mut self, heap: &Path) -> Result<Node<N>> {
        let (h, data) = self.heap_data(heap)?;
        let len = self.node(&data).as_set().expect("heap data").len();
        if len == 0 {
            return Err(Error::EmptyHeap);
        }
        self.spend()?;
        self.heap_swap(&data, 0, len - 1);
        let top = self
            .node_mut(&data)
            .as_set_mut()
            .expect("heap data")
            .children
            .pop()
            .expect("nonempty")
            .node;
        let len = len - 1;
        let mut i = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut least = i;
            for c in [l, r] {
                if c < len {
                    let (x, y) = (self.heap_item(&data, c), self.heap_item(&data, least));
                    if self.heap_less(&h, &x, &y)? {
                        least = c;
                    }
                }
            }
            if least == i {
                return Ok(top);
            }
            self.heap_swap(&data, i, least);
            i = least;
        }
    }
}
