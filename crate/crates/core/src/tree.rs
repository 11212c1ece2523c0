//! The state tree and its addressing.
//!
//! A state is a tree whose edges carry labels. A [`Path`] is a composition
//! of edge labels (an arrow of the addressing category): the empty path is
//! the identity, composition is concatenation, and from any node a path
//! reaches at most one node. Ordinal segments `#k` select the k-th child by
//! current position, counted from the left.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Natural;

/// An identifier token labelling an edge: `[A-Za-z_][A-Za-z0-9_]*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if is_ident(&text) {
            Ok(Self(text))
        } else {
            Err(Error::InvalidLabel(text))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s)
    }
}

pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// How a child is labelled under its parent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Key {
    Named(Label),
    /// Labelled by its position; printed as `#k`.
    Positional,
}

impl Key {
    pub fn name(&self) -> Option<&Label> {
        match self {
            Key::Named(l) => Some(l),
            Key::Positional => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Segment {
    Name(Label),
    Index(usize),
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Name(l) => write!(f, "{l}"),
            Segment::Index(k) => write!(f, "#{k}"),
        }
    }
}

/// A dot-separated address. The empty path is the identity arrow.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Path(Vec<Segment>);

impl Path {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn new(segments: Vec<Segment>) -> Self {
        Self(segments)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<&Segment> {
        self.0.first()
    }

    pub fn last(&self) -> Option<&Segment> {
        self.0.last()
    }

    /// The path without its final segment, `None` for the identity.
    pub fn parent(&self) -> Option<Path> {
        self.0.split_last().map(|(_, init)| Path(init.to_vec()))
    }

    pub fn child(&self, seg: Segment) -> Path {
        let mut segs = self.0.clone();
        segs.push(seg);
        Path(segs)
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn has_ordinals(&self) -> bool {
        self.0.iter().any(|s| matches!(s, Segment::Index(_)))
    }

    /// Parses `a.b.#1`; the empty string is the identity.
    pub fn parse(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Ok(Self::identity());
        }
        text.split('.')
            .map(|seg| match seg.strip_prefix('#') {
                Some(digits)
                    if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) =>
                {
                    digits
                        .parse()
                        .map(Segment::Index)
                        .map_err(|_| Error::InvalidLabel(seg.to_string()))
                }
                _ => Label::new(seg).map(Segment::Name),
            })
            .collect::<Result<Vec<_>>>()
            .map(Path)
    }
}

impl FromStr for Path {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, seg) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

impl FromIterator<Segment> for Path {
    fn from_iter<I: IntoIterator<Item = Segment>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Segments of `f` followed by segments of `g`.
pub fn compose(f: &Path, g: &Path) -> Path {
    let mut segs = f.0.clone();
    segs.extend(g.0.iter().cloned());
    Path(segs)
}

/// Longest common prefix of two label-only paths: the lowest common
/// ancestor, from which both nodes are reachable.
pub fn meet(e: &Path, c: &Path) -> Result<Path> {
    for p in [e, c] {
        if p.has_ordinals() {
            return Err(Error::OrdinalInMeet(p.clone()));
        }
    }
    Ok(e.0
        .iter()
        .zip(&c.0)
        .take_while(|(a, b)| a == b)
        .map(|(a, _)| a.clone())
        .collect())
}

/// An operation identifier carried by a term node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Op {
    Name(Label),
    /// Function variable `$F`, only meaningful inside patterns.
    Var(Label),
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Name(l) => write!(f, "{l}"),
            Op::Var(l) => write!(f, "${l}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Child<N> {
    pub key: Key,
    pub node: Node<N>,
}

/// An ordered set of labelled children; an `op` turns it into a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetNode<N> {
    pub op: Option<Op>,
    pub children: Vec<Child<N>>,
}

impl<N> Default for SetNode<N> {
    fn default() -> Self {
        Self {
            op: None,
            children: Vec::new(),
        }
    }
}

impl<N> SetNode<N> {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn position(&self, seg: &Segment) -> Option<usize> {
        match seg {
            Segment::Index(k) => (*k < self.children.len()).then_some(*k),
            Segment::Name(l) => self.children.iter().position(|c| c.key.name() == Some(l)),
        }
    }

    pub fn get(&self, seg: &Segment) -> Option<&Node<N>> {
        self.position(seg).map(|i| &self.children[i].node)
    }

    pub fn get_mut(&mut self, seg: &Segment) -> Option<&mut Node<N>> {
        self.position(seg).map(move |i| &mut self.children[i].node)
    }

    pub fn named(&self, name: &str) -> Option<&Node<N>> {
        self.children
            .iter()
            .find(|c| c.key.name().is_some_and(|l| l.as_str() == name))
            .map(|c| &c.node)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node<N>> {
        self.children.iter().map(|c| &c.node)
    }

    /// Appends a child, rejecting a duplicate name.
    pub fn push(&mut self, key: Key, node: Node<N>) -> Result<()> {
        if let Key::Named(l) = &key {
            if self.children.iter().any(|c| c.key.name() == Some(l)) {
                return Err(Error::InvalidLabel(format!("duplicate sibling `{l}`")));
            }
        }
        self.children.push(Child { key, node });
        Ok(())
    }
}

impl<N> std::ops::Index<usize> for SetNode<N> {
    type Output = Node<N>;

    fn index(&self, i: usize) -> &Node<N> {
        &self.children[i].node
    }
}

/// A vertex of the state tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node<N> {
    Leaf(N),
    Set(SetNode<N>),
    /// Reference term `[path]`: the contents of the addressed node.
    Ref(Path),
    /// Pattern variable `$X`.
    Var(Label),
}

impl<N> Node<N> {
    pub fn leaf(value: N) -> Self {
        Node::Leaf(value)
    }

    pub fn empty_set() -> Self {
        Node::Set(SetNode::default())
    }

    /// A plain set from `(label, node)` pairs.
    ///
    /// Panics on an invalid or duplicate label; meant for literal construction.
    pub fn record<'a>(pairs: impl IntoIterator<Item = (&'a str, Node<N>)>) -> Self {
        let mut set = SetNode::default();
        for (label, node) in pairs {
            let label = Label::new(label).expect("record label must be an identifier");
            set.push(Key::Named(label), node)
                .expect("record labels must be distinct");
        }
        Node::Set(set)
    }

    /// A plain set of positionally labelled children.
    pub fn sequence(items: impl IntoIterator<Item = Node<N>>) -> Self {
        Node::Set(SetNode {
            op: None,
            children: items
                .into_iter()
                .map(|node| Child {
                    key: Key::Positional,
                    node,
                })
                .collect(),
        })
    }

    /// An operation term with positional operands.
    pub fn term(op: Label, operands: impl IntoIterator<Item = Node<N>>) -> Self {
        match Self::sequence(operands) {
            Node::Set(mut s) => {
                s.op = Some(Op::Name(op));
                Node::Set(s)
            }
            _ => unreachable!(),
        }
    }

    pub fn as_leaf(&self) -> Option<&N> {
        match self {
            Node::Leaf(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&SetNode<N>> {
        match self {
            Node::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_set_mut(&mut self) -> Option<&mut SetNode<N>> {
        match self {
            Node::Set(s) => Some(s),
            _ => None,
        }
    }

    pub fn op(&self) -> Option<&Op> {
        self.as_set().and_then(|s| s.op.as_ref())
    }

    /// True for operation terms and references.
    pub fn is_term(&self) -> bool {
        matches!(self, Node::Ref(_)) || self.op().is_some()
    }

    /// Fully evaluated: no terms and no variables anywhere.
    pub fn is_value(&self) -> bool {
        match self {
            Node::Leaf(_) => true,
            Node::Set(s) => s.op.is_none() && s.nodes().all(Node::is_value),
            Node::Ref(_) | Node::Var(_) => false,
        }
    }

    pub fn has_vars(&self) -> bool {
        match self {
            Node::Var(_) => true,
            Node::Set(s) => matches!(s.op, Some(Op::Var(_))) || s.nodes().any(Node::has_vars),
            Node::Leaf(_) | Node::Ref(_) => false,
        }
    }

    pub fn child(&self, seg: &Segment) -> Option<&Node<N>> {
        self.as_set().and_then(|s| s.get(seg))
    }

    pub fn child_mut(&mut self, seg: &Segment) -> Option<&mut Node<N>> {
        self.as_set_mut().and_then(|s| s.get_mut(seg))
    }

    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        1 + self.as_set().map_or(0, |s| s.nodes().map(Node::size).sum())
    }
}

impl<N: Natural> Node<N> {
    /// A sequence of code points.
    pub fn string(text: &str) -> Self {
        Self::sequence(
            text.chars().map(|c| {
                Node::Leaf(N::from_char(c).expect("leaf type too narrow for code points"))
            }),
        )
    }

    /// Decodes a nonempty positional set of code-point leaves.
    pub fn as_string(&self) -> Option<String> {
        let set = self.as_set()?;
        if set.op.is_some() || set.is_empty() {
            return None;
        }
        set.children
            .iter()
            .map(|c| match (&c.key, &c.node) {
                (Key::Positional, Node::Leaf(n)) => n.to_char(),
                _ => None,
            })
            .collect()
    }
}

/// Follows `path` from `node`; `None` when any step fails.
pub fn resolve<'a, N>(node: &'a Node<N>, path: &Path) -> Option<&'a Node<N>> {
    path.segments().iter().try_fold(node, |n, seg| n.child(seg))
}

pub fn resolve_mut<'a, N>(node: &'a mut Node<N>, path: &Path) -> Option<&'a mut Node<N>> {
    path.segments()
        .iter()
        .try_fold(node, |n, seg| n.child_mut(seg))
}

/// Index path from `node` to the node at `path`.
pub(crate) fn locate<N>(node: &Node<N>, path: &Path) -> Option<Vec<usize>> {
    let mut cur = node;
    let mut loc = Vec::with_capacity(path.len());
    for seg in path.segments() {
        let set = cur.as_set()?;
        let i = set.position(seg)?;
        loc.push(i);
        cur = &set.children[i].node;
    }
    Some(loc)
}

pub(crate) fn at_loc<'a, N>(node: &'a Node<N>, loc: &[usize]) -> Option<&'a Node<N>> {
    loc.iter().try_fold(node, |n, &i| {
        n.as_set().and_then(|s| s.children.get(i)).map(|c| &c.node)
    })
}

pub(crate) fn at_loc_mut<'a, N>(node: &'a mut Node<N>, loc: &[usize]) -> Option<&'a mut Node<N>> {
    loc.iter().try_fold(node, |n, &i| {
        n.as_set_mut()
            .and_then(|s| s.children.get_mut(i))
            .map(|c| &mut c.node)
    })
}

/// Converts an index path back to a label path.
pub(crate) fn loc_to_path<N>(node: &Node<N>, loc: &[usize]) -> Path {
    let mut cur = node;
    let mut segs = Vec::with_capacity(loc.len());
    for &i in loc {
        let Some(child) = cur.as_set().and_then(|s| s.children.get(i)) else {
            break;
        };
        segs.push(match &child.key {
            Key::Named(l) => Segment::Name(l.clone()),
            Key::Positional => Segment::Index(i),
        });
        cur = &child.node;
    }
    Path(segs)
}

/// Replaces the node at `at` inside `root`, or appends it as the last child
/// when only the final segment is missing. Returns the index path written.
pub(crate) fn replace_in<N>(root: &mut Node<N>, at: &Path, new: Node<N>) -> Result<Vec<usize>> {
    let Some((last, init)) = at.segments().split_last() else {
        *root = new;
        return Ok(Vec::new());
    };
    let parent_path = Path(init.to_vec());
    let mut loc = locate(root, &parent_path).ok_or_else(|| Error::PathUnresolvable(at.clone()))?;
    let parent = at_loc_mut(root, &loc).expect("located");
    let set = parent
        .as_set_mut()
        .ok_or_else(|| Error::PathUnresolvable(at.clone()))?;
    match set.position(last) {
        Some(i) => {
            set.children[i].node = new;
            loc.push(i);
        }
        None => {
            let key = match last {
                Segment::Name(l) => Key::Named(l.clone()),
                Segment::Index(k) if *k == set.len() => Key::Positional,
                Segment::Index(_) => return Err(Error::PathUnresolvable(at.clone())),
            };
            loc.push(set.len());
            set.children.push(Child { key, node: new });
        }
    }
    Ok(loc)
}

/// A whole machine state, rooted at the diagram root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateTree<N> {
    pub root: Node<N>,
}

impl<N> Default for StateTree<N> {
    fn default() -> Self {
        Self {
            root: Node::empty_set(),
        }
    }
}

impl<N> StateTree<N> {
    pub fn new(root: Node<N>) -> Self {
        Self { root }
    }

    pub fn resolve(&self, path: &Path) -> Option<&Node<N>> {
        resolve(&self.root, path)
    }

    /// The single transition primitive: swaps in `new` at `at`.
    pub fn replace_subtree(&mut self, at: &Path, new: Node<N>) -> Result<()> {
        replace_in(&mut self.root, at, new).map(|_| ())
    }

    /// A machine rooted at the set node under `at`, aliasing this tree.
    pub fn subtree_view(&mut self, at: &Path) -> Result<SubtreeView<'_, N>> {
        match self.resolve(at) {
            None => Err(Error::PathUnresolvable(at.clone())),
            Some(Node::Set(_)) => Ok(SubtreeView {
                tree: self,
                base: at.clone(),
            }),
            Some(_) => Err(Error::NotASet(at.clone())),
        }
    }
}

/// A re-rooted window onto part of a [`StateTree`]. Paths given to the view
/// are relative to its root; writes go through to the enclosing tree.
#[derive(Debug)]
pub struct SubtreeView<'a, N> {
    tree: &'a mut StateTree<N>,
    base: Path,
}

impl<N> SubtreeView<'_, N> {
    pub fn base(&self) -> &Path {
        &self.base
    }

    pub fn root(&self) -> &Node<N> {
        self.tree.resolve(&self.base).expect("view root exists")
    }

    pub fn resolve(&self, path: &Path) -> Option<&Node<N>> {
        resolve(self.root(), path)
    }

    pub fn replace_subtree(&mut self, at: &Path, new: Node<N>) -> Result<()> {
        self.tree.replace_subtree(&compose(&self.base, at), new)
    }

    pub fn subtree_view(&mut self, at: &Path) -> Result<SubtreeView<'_, N>> {
        let base = compose(&self.base, at);
        self.tree.subtree_view(&base)
    }
}
