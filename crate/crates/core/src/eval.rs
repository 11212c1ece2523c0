//! Term evaluation by in-place subtree replacement.
//!
//! A term is a set node carrying an operation identifier, or a reference
//! `[path]`. Accessing a term evaluates it and replaces it in the tree with
//! its value, so a second access costs nothing. Operands are evaluated
//! innermost first; `if` evaluates its condition and then only the selected
//! branch. An operation identifier that is not built in names a function
//! template, found by searching outward from the term toward the root.
//!
//! Every replacement spends one unit of fuel; running out is an error.

use crate::algebra::{self, Builtin};
use crate::devices::DeviceTable;
use crate::engine::TraceEvent;
use crate::error::{Error, Result};
use crate::scalar::Natural;
use crate::tree::{self, Child, Key, Node, Op, Path, Segment, StateTree};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// Index path from the machine root.
pub(crate) type Loc = Vec<usize>;

pub(crate) fn child_loc(loc: &[usize], i: usize) -> Loc {
    let mut l = loc.to_vec();
    l.push(i);
    l
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Operations applied (built-ins and template calls).
    pub firings: u64,
    /// Subtree replacements, each of which costs one unit of fuel.
    pub replacements: u64,
}

type Tracer = Box<dyn FnMut(&TraceEvent) + Send>;

/// A state tree together with everything needed to run it.
pub struct Machine<N> {
    pub(crate) tree: StateTree<N>,
    pub(crate) devices: DeviceTable,
    fuel: u64,
    stats: Stats,
    in_progress: Vec<Loc>,
    tracer: Option<Tracer>,
    pub(crate) steps: u64,
}

impl<N: std::fmt::Debug> std::fmt::Debug for Machine<N> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Machine")
            .field("tree", &self.tree)
            .field("fuel", &self.fuel)
            .field("stats", &self.stats)
            .finish_non_exhaustive()
    }
}

impl<N: Natural> Machine<N> {
    pub fn new(tree: StateTree<N>) -> Self {
        Self {
            tree,
            devices: DeviceTable::empty(),
            fuel: DEFAULT_FUEL,
            stats: Stats::default(),
            in_progress: Vec::new(),
            tracer: None,
            steps: 0,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn with_devices(mut self, devices: DeviceTable) -> Self {
        self.devices = devices;
        self
    }

    pub fn with_tracer(mut self, tracer: impl FnMut(&TraceEvent) + Send + 'static) -> Self {
        self.tracer = Some(Box::new(tracer));
        self
    }

    pub fn tree(&self) -> &StateTree<N> {
        &self.tree
    }

    pub fn into_tree(self) -> StateTree<N> {
        self.tree
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    pub fn set_fuel(&mut self, fuel: u64) {
        self.fuel = fuel;
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn devices(&self) -> &DeviceTable {
        &self.devices
    }

    pub fn resolve(&self, path: &Path) -> Option<&Node<N>> {
        self.tree.resolve(path)
    }

    /// Raw transition: no evaluation, no devices.
    pub fn replace_subtree(&mut self, at: &Path, new: Node<N>) -> Result<()> {
        self.spend()?;
        self.tree.replace_subtree(at, new)
    }

    /// Contents of the node at `path`, evaluating it first if it is a term.
    /// The evaluated value stays in the tree. Input device mounts are read
    /// afresh on every call.
    pub fn data_of(&mut self, path: &Path) -> Result<Node<N>> {
        if self.devices.is_input(path) {
            return self.devices.read(path);
        }
        let loc = self.locate(path)?;
        self.eval_at(&loc)?;
        Ok(self.node(&loc).clone())
    }

    /// A copy of the contents at `path` (resolved from the root).
    pub fn deref(&mut self, path: &Path) -> Result<Node<N>> {
        self.data_of(path)
    }

    /// Evaluates a node that is not part of the tree. References inside it
    /// resolve from the root.
    pub fn evaluate(&mut self, node: Node<N>) -> Result<Node<N>> {
        self.evaluate_in(&[], node)
    }

    pub fn read_device(&mut self, mount: &Path) -> Result<Node<N>> {
        self.devices.read(mount)
    }

    pub fn write_device(&mut self, mount: &Path, value: &Node<N>) -> Result<()> {
        self.devices.write(mount, value)
    }

    // ---- internals -------------------------------------------------------

    pub(crate) fn spend(&mut self) -> Result<()> {
        if self.fuel == 0 {
            return Err(Error::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub(crate) fn trace(&mut self, mut event: TraceEvent) {
        event.step = self.steps;
        self.steps += 1;
        if let Some(t) = self.tracer.as_mut() {
            t(&event);
        }
    }

    pub(crate) fn locate(&self, path: &Path) -> Result<Loc> {
        tree::locate(&self.tree.root, path).ok_or_else(|| Error::PathUnresolvable(path.clone()))
    }

    pub(crate) fn node(&self, loc: &[usize]) -> &Node<N> {
        tree::at_loc(&self.tree.root, loc).expect("valid location")
    }

    pub(crate) fn node_mut(&mut self, loc: &[usize]) -> &mut Node<N> {
        tree::at_loc_mut(&mut self.tree.root, loc).expect("valid location")
    }

    pub(crate) fn path_of(&self, loc: &[usize]) -> Path {
        tree::loc_to_path(&self.tree.root, loc)
    }

    /// Replaces the node at `loc`, spending fuel.
    pub(crate) fn put(&mut self, loc: &[usize], node: Node<N>) -> Result<()> {
        self.spend()?;
        self.stats.replacements += 1;
        *self.node_mut(loc) = node;
        Ok(())
    }

    /// Writes `node` at `path` relative to the set at `frame`, inserting a
    /// missing final segment.
    pub(crate) fn write_rel(&mut self, frame: &[usize], path: &Path, node: Node<N>) -> Result<Loc> {
        self.spend()?;
        self.stats.replacements += 1;
        let frame_node = tree::at_loc_mut(&mut self.tree.root, frame).expect("valid frame");
        let rel = tree::replace_in(frame_node, path, node)?;
        let mut loc = frame.to_vec();
        loc.extend(rel);
        Ok(loc)
    }

    /// Runs `f` with `node` placed as a temporary last child of the set at
    /// `scope`. The child is removed afterwards, also on error.
    pub(crate) fn with_scratch<R>(
        &mut self,
        scope: &[usize],
        node: Node<N>,
        f: impl FnOnce(&mut Self, &Loc) -> Result<R>,
    ) -> Result<R> {
        let idx = {
            let Some(set) = self.node_mut(scope).as_set_mut() else {
                let p = self.path_of(scope);
                return Err(Error::NotASet(p));
            };
            set.children.push(Child {
                key: Key::Positional,
                node,
            });
            set.children.len() - 1
        };
        let loc = child_loc(scope, idx);
        let out = f(self, &loc);
        if let Some(set) = tree::at_loc_mut(&mut self.tree.root, scope).and_then(Node::as_set_mut) {
            if idx < set.children.len() {
                set.children.remove(idx);
            }
        }
        out
    }

    /// Evaluates a detached node in the scope of the set at `scope`.
    pub(crate) fn evaluate_in(&mut self, scope: &[usize], node: Node<N>) -> Result<Node<N>> {
        self.with_scratch(scope, node, |m, loc| {
            m.eval_deep(loc)?;
            Ok(m.node(loc).clone())
        })
    }

    /// Like [`Self::evaluate_in`] but only the top node is forced.
    pub(crate) fn evaluate_shallow_in(
        &mut self,
        scope: &[usize],
        node: Node<N>,
    ) -> Result<Node<N>> {
        self.with_scratch(scope, node, |m, loc| {
            m.eval_at(loc)?;
            Ok(m.node(loc).clone())
        })
    }

    /// Innermost-first lookup: the nearest ancestor of `from` (inclusive)
    /// whose children match the first segment of `path`, then the rest.
    pub(crate) fn lookup(&self, from: &[usize], path: &Path) -> Result<Loc> {
        let Some(first) = path.first() else {
            return Ok(from.to_vec());
        };
        for depth in (0..=from.len()).rev() {
            let scope = &from[..depth];
            let Some(set) = self.node(scope).as_set() else {
                continue;
            };
            if set.position(first).is_some() {
                let rel = tree::locate(self.node(scope), path)
                    .ok_or_else(|| Error::PathUnresolvable(path.clone()))?;
                let mut loc = scope.to_vec();
                loc.extend(rel);
                return Ok(loc);
            }
        }
        Err(Error::PathUnresolvable(path.clone()))
    }

    /// Nearest function template named `name`, searching outward from `from`.
    pub(crate) fn lookup_template(&self, from: &[usize], name: &str) -> Option<Loc> {
        for depth in (0..=from.len()).rev() {
            let scope = &from[..depth];
            let Some(set) = self.node(scope).as_set() else {
                continue;
            };
            for (i, c) in set.children.iter().enumerate() {
                if c.key.name().is_some_and(|l| l.as_str() == name) && is_template(&c.node) {
                    return Some(child_loc(scope, i));
                }
            }
        }
        None
    }

    /// Resolves a reference found at `at` and returns a copy of its target's
    /// (evaluated) contents.
    pub(crate) fn deref_from(&mut self, at: &[usize], path: &Path) -> Result<Node<N>> {
        if self.devices.is_input(path) {
            return self.devices.read(path);
        }
        let scope = &at[..at.len().saturating_sub(1)];
        let target = self.lookup(scope, path)?;
        if self.in_progress.contains(&target) {
            return Err(Error::CyclicReference(path.clone()));
        }
        self.eval_at(&target)?;
        Ok(self.node(&target).clone())
    }

    /// Forces the node at `loc` if it is a term, leaving its value in place.
    pub(crate) fn eval_at(&mut self, loc: &[usize]) -> Result<()> {
        if !self.node(loc).is_term() {
            return Ok(());
        }
        if self.in_progress.iter().any(|l| l == loc) {
            let p = self.path_of(loc);
            return Err(Error::CyclicReference(p));
        }
        self.in_progress.push(loc.to_vec());
        let out = self.eval_term(loc);
        self.in_progress.pop();
        out
    }

    /// Forces the node at `loc` and, for a plain set, all of its children.
    pub(crate) fn eval_deep(&mut self, loc: &[usize]) -> Result<()> {
        self.eval_at(loc)?;
        match self.node(loc) {
            Node::Var(v) => Err(Error::UnboundVariable(v.to_string())),
            Node::Set(s) if s.op.is_none() => {
                for i in 0..s.len() {
                    self.eval_deep(&child_loc(loc, i))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn eval_term(&mut self, loc: &[usize]) -> Result<()> {
        let op = match self.node(loc) {
            Node::Ref(path) => {
                let path = path.clone();
                let value = self.deref_from(loc, &path)?;
                return self.put(loc, value);
            }
            Node::Set(s) => match &s.op {
                Some(Op::Name(l)) => l.clone(),
                Some(Op::Var(v)) => return Err(Error::UnknownOperation(format!("${v}"))),
                None => return Ok(()),
            },
            _ => return Ok(()),
        };
        let arity = self.node(loc).as_set().map_or(0, |s| s.len());
        match Builtin::lookup(op.as_str()) {
            Some(Builtin::If) => {
                if arity != 3 {
                    return Err(Error::Arity {
                        op: "if",
                        expected: "3",
                        found: arity,
                    });
                }
                self.eval_deep(&child_loc(loc, 0))?;
                let cond = self.node(&child_loc(loc, 0));
                let taken = if algebra::if_arrow(cond, true, false)? {
                    1
                } else {
                    2
                };
                let branch = child_loc(loc, taken);
                self.eval_deep(&branch)?;
                let value = self.node(&branch).clone();
                self.stats.firings += 1;
                self.put(loc, value)
            }
            Some(Builtin::Select) => {
                if arity != 2 {
                    return Err(Error::Arity {
                        op: "select",
                        expected: "2",
                        found: arity,
                    });
                }
                self.eval_deep(&child_loc(loc, 0))?;
                let m = self.node(&child_loc(loc, 0)).clone();
                let predicate = self.node(&child_loc(loc, 1)).clone();
                let value = algebra::select(&m, |x| self.test_predicate(loc, &predicate, x))
                    .map_err(|e| match e {
                        Error::NotASet(_) => Error::NotASet(self.path_of(&child_loc(loc, 0))),
                        other => other,
                    })?;
                self.stats.firings += 1;
                self.put(loc, value)
            }
            Some(builtin) => {
                let mut args = Vec::with_capacity(arity);
                for i in 0..arity {
                    let l = child_loc(loc, i);
                    self.eval_deep(&l)?;
                    args.push(self.node(&l).clone());
                }
                let value = algebra::apply(builtin, &args)?;
                self.stats.firings += 1;
                self.put(loc, value)
            }
            None => {
                let parent = &loc[..loc.len().saturating_sub(1)];
                let template = self
                    .lookup_template(parent, op.as_str())
                    .ok_or_else(|| Error::UnknownOperation(op.to_string()))?;
                let mut instance = self.node(&template).clone();
                for i in 0..arity {
                    let l = child_loc(loc, i);
                    self.eval_deep(&l)?;
                    let child = &self.node(loc).as_set().expect("term is a set").children[i];
                    assign_argument(&mut instance, &child.key, i, child.node.clone())?;
                }
                self.put(loc, instance)?;
                self.stats.firings += 1;
                self.call_at(loc).map(|_| ())
            }
        }
    }

    fn test_predicate(&mut self, at: &[usize], predicate: &Node<N>, x: &Node<N>) -> Result<bool> {
        let bound = substitute_var(predicate, "x", x);
        let scratch = Node::Set(tree::SetNode {
            op: None,
            children: vec![
                Child {
                    key: Key::Named(tree::Label::new("x").expect("label")),
                    node: x.clone(),
                },
                Child {
                    key: Key::Positional,
                    node: bound,
                },
            ],
        });
        self.with_scratch(at, scratch, |m, loc| {
            let p = child_loc(loc, 1);
            m.eval_deep(&p)?;
            m.node(&p)
                .as_leaf()
                .and_then(N::as_bool)
                .ok_or(Error::NotBoolean { op: "select" })
        })
    }
}

/// Replaces every `$name` in `node` by a copy of `value`.
fn substitute_var<N: Clone>(node: &Node<N>, name: &str, value: &Node<N>) -> Node<N> {
    match node {
        Node::Var(v) if v.as_str() == name => value.clone(),
        Node::Set(s) => Node::Set(tree::SetNode {
            op: s.op.clone(),
            children: s
                .children
                .iter()
                .map(|c| Child {
                    key: c.key.clone(),
                    node: substitute_var(&c.node, name, value),
                })
                .collect(),
        }),
        other => other.clone(),
    }
}

/// A function template: a plain set with `args`, `mode` and `body` or `rules`.
pub fn is_template<N>(node: &Node<N>) -> bool {
    let Some(set) = node.as_set() else {
        return false;
    };
    set.op.is_none()
        && matches!(set.named("args"), Some(Node::Set(_)))
        && matches!(set.named("mode"), Some(Node::Leaf(_)))
        && (set.named("body").is_some() || set.named("rules").is_some())
}

/// Stores an operand in the matching argument slot of a template copy:
/// by name for named operands, by position otherwise.
pub(crate) fn assign_argument<N>(
    instance: &mut Node<N>,
    key: &Key,
    position: usize,
    value: Node<N>,
) -> Result<()> {
    let args = instance
        .child_mut(&Segment::Name(tree::Label::new("args").expect("label")))
        .and_then(Node::as_set_mut)
        .ok_or_else(|| Error::UnknownArgument(key_text(key, position)))?;
    let seg = match key {
        Key::Named(l) => Segment::Name(l.clone()),
        Key::Positional => Segment::Index(position),
    };
    let slot = args
        .get_mut(&seg)
        .ok_or_else(|| Error::UnknownArgument(key_text(key, position)))?;
    *slot = value;
    Ok(())
}

fn key_text(key: &Key, position: usize) -> String {
    match key {
        Key::Named(l) => l.to_string(),
        Key::Positional => format!("#{position}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse;

    fn machine(src: &str) -> Machine<u64> {
        Machine::new(parse(src).unwrap())
    }

    fn p(s: &str) -> Path {
        Path::parse(s).unwrap()
    }

    fn l(n: u64) -> Node<u64> {
        Node::leaf(n)
    }

    #[test]
    fn data_of_plain_and_term() {
        let mut m = machine("a = 7 s : sum { x = 2 y = 3 }");
        assert_eq!(m.data_of(&p("a")).unwrap(), l(7));
        assert_eq!(m.data_of(&p("s")).unwrap(), l(5));
        assert!(matches!(
            m.data_of(&p("missing.path")),
            Err(Error::PathUnresolvable(_))
        ));
    }

    #[test]
    fn nested_expression() {
        let mut m = machine("e : prod { a : sum { x = 2 y = 3 } b = 4 }");
        assert_eq!(m.data_of(&p("e")).unwrap(), l(20));
    }

    #[test]
    fn if_is_lazy() {
        let mut m = machine("e : if { c : lt { a = 1 b = 2 } t = 10 f : rem { n = 1 d = 0 } }");
        assert_eq!(m.data_of(&p("e")).unwrap(), l(10));
        let mut m = machine("e : if { c = 0 t : rem { n = 1 d = 0 } f = 3 }");
        assert_eq!(m.data_of(&p("e")).unwrap(), l(3));
        let mut m = machine("e : if { c = 7 t = 1 f = 2 }");
        assert!(matches!(m.data_of(&p("e")), Err(Error::NotBoolean { .. })));
    }

    #[test]
    fn references() {
        let mut m = machine("a = 5 b = [a]");
        assert_eq!(m.data_of(&p("b")).unwrap(), l(5));
        let mut m = machine("a = [b] b = [a]");
        assert!(matches!(m.data_of(&p("a")), Err(Error::CyclicReference(_))));
        let mut m = machine("s : sum { #0 = 1 #1 = [s] }");
        assert!(matches!(m.data_of(&p("s")), Err(Error::CyclicReference(_))));
    }

    #[test]
    fn memoize_on_access() {
        let mut m = machine("s : sum { x = 2 y = 3 } t = [s]");
        assert_eq!(m.data_of(&p("t")).unwrap(), l(5));
        assert_eq!(m.resolve(&p("s")), Some(&l(5)));
        let fired = m.stats().firings;
        assert_eq!(m.data_of(&p("t")).unwrap(), l(5));
        assert_eq!(m.stats().firings, fired);
    }

    #[test]
    fn references_resolve_innermost_first() {
        let mut m = machine("x = 1 m { x = 2 y = [x] } n { y = [x] }");
        assert_eq!(m.data_of(&p("m.y")).unwrap(), l(2));
        assert_eq!(m.data_of(&p("n.y")).unwrap(), l(1));
    }

    #[test]
    fn detached_evaluation_leaves_tree() {
        let mut m = machine("a = 4");
        let before = m.tree().clone();
        let term = Node::term(tree::Label::new("sum").unwrap(), [Node::Ref(p("a")), l(1)]);
        assert_eq!(m.evaluate(term).unwrap(), l(5));
        assert_eq!(m.tree(), &before);
    }

    #[test]
    fn unknown_operation() {
        let mut m = machine("e : frobnicate { #0 = 1 }");
        assert!(matches!(
            m.data_of(&p("e")),
            Err(Error::UnknownOperation(_))
        ));
    }

    #[test]
    fn fuel_runs_out() {
        let mut m = machine("e : sum { #0 : sum { #0 = 1 #1 = 2 } #1 = 3 }").with_fuel(1);
        assert!(matches!(m.data_of(&p("e")), Err(Error::FuelExhausted)));
    }

    #[test]
    fn select_filters_children() {
        let mut m =
            machine("m { a = 1 b = 2 c = 3 } s : select { #0 = [m] #1 : lt { #0 = $x #1 = 3 } }");
        assert_eq!(
            m.data_of(&p("s")).unwrap(),
            Node::record([("a", l(1)), ("b", l(2))])
        );
    }

    #[test]
    fn select_sees_bound_record_fields() {
        let src = r#"
            people { p { name = "John" age = 3 } q { name = "Mary" age = 4 } }
            s : select { #0 = [people] #1 : seteq { #0 = [x.name] #1 = "John" } }
        "#;
        let mut m = machine(src);
        let got = m.data_of(&p("s")).unwrap();
        assert_eq!(got.as_set().unwrap().len(), 1);
        assert!(got.as_set().unwrap().named("p").is_some());
    }

    #[test]
    fn input_devices_are_not_memoized() {
        use crate::devices::{DeviceTable, ScriptedEnvironment};
        let mut m = machine("t = [dev.clock]")
            .with_devices(DeviceTable::standard(ScriptedEnvironment::new(100, 5)));
        assert_eq!(m.data_of(&p("dev.clock")).unwrap(), l(100));
        assert_eq!(m.data_of(&p("dev.clock")).unwrap(), l(105));
        assert_eq!(m.data_of(&p("t")).unwrap(), l(110));
    }
}
