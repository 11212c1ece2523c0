//! The built-in instruction set: categorical operations on evaluated trees.
//!
//! On leaves (finite ordinals) product and coproduct are multiplication and
//! addition. On sets they are the Cartesian product and the disjoint union.
//! Booleans are the leaves 0 and 1.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Natural;
use crate::tree::{Child, Key, Label, Node, SetNode};

/// Operation identifiers understood by the evaluator without a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Prod,
    Sum,
    Pair,
    If,
    Min,
    Max,
    Monus,
    Rem,
    And,
    Or,
    Not,
    Implies,
    Eq,
    Le,
    Lt,
    Select,
    SetEq,
}

impl Builtin {
    pub const ALL: [Builtin; 17] = [
        Builtin::Prod,
        Builtin::Sum,
        Builtin::Pair,
        Builtin::If,
        Builtin::Min,
        Builtin::Max,
        Builtin::Monus,
        Builtin::Rem,
        Builtin::And,
        Builtin::Or,
        Builtin::Not,
        Builtin::Implies,
        Builtin::Eq,
        Builtin::Le,
        Builtin::Lt,
        Builtin::Select,
        Builtin::SetEq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Prod => "prod",
            Builtin::Sum => "sum",
            Builtin::Pair => "pair",
            Builtin::If => "if",
            Builtin::Min => "min",
            Builtin::Max => "max",
            Builtin::Monus => "monus",
            Builtin::Rem => "rem",
            Builtin::And => "and",
            Builtin::Or => "or",
            Builtin::Not => "not",
            Builtin::Implies => "implies",
            Builtin::Eq => "eq",
            Builtin::Le => "le",
            Builtin::Lt => "lt",
            Builtin::Select => "select",
            Builtin::SetEq => "seteq",
        }
    }

    pub fn lookup(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::lookup(s).ok_or_else(|| Error::UnknownOperation(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    Min,
    Max,
    Monus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Not,
    Implies,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Le,
    Lt,
}

fn leaf<'a, N>(op: &'static str, v: &'a Node<N>) -> Result<&'a N> {
    v.as_leaf().ok_or(Error::NotALeaf { op })
}

fn boolean<N: Natural>(op: &'static str, v: &Node<N>) -> Result<bool> {
    v.as_leaf()
        .and_then(N::as_bool)
        .ok_or(Error::NotBoolean { op })
}

fn plain_set<'a, N>(op: &'static str, v: &'a Node<N>) -> Result<&'a SetNode<N>> {
    match v {
        Node::Set(s) if s.op.is_none() => Ok(s),
        Node::Set(_) | Node::Ref(_) | Node::Var(_) => Err(Error::NotAValue),
        Node::Leaf(_) => Err(Error::MixedKinds { op }),
    }
}

/// Leaves: arithmetic product. Sets: every pair `{fst snd}` in
/// lexicographic order of operand positions, labelled `p0, p1, ...`.
pub fn product<N: Natural>(a: &Node<N>, b: &Node<N>) -> Result<Node<N>> {
    match (a, b) {
        (Node::Leaf(x), Node::Leaf(y)) => x.mul_checked(y).map(Node::Leaf),
        (Node::Leaf(_), _) | (_, Node::Leaf(_)) => Err(Error::MixedKinds { op: "prod" }),
        _ => {
            let (sa, sb) = (plain_set("prod", a)?, plain_set("prod", b)?);
            let mut out = SetNode::default();
            for (k, (x, y)) in sa
                .nodes()
                .flat_map(|x| sb.nodes().map(move |y| (x, y)))
                .enumerate()
            {
                let label = Label::new(format!("p{k}")).expect("generated label");
                out.children.push(Child {
                    key: Key::Named(label),
                    node: pair(x.clone(), y.clone()),
                });
            }
            Ok(Node::Set(out))
        }
    }
}

/// Leaves: arithmetic sum. Sets: disjoint union, duplicates kept, children
/// relabelled positionally.
pub fn coproduct<N: Natural>(a: &Node<N>, b: &Node<N>) -> Result<Node<N>> {
    match (a, b) {
        (Node::Leaf(x), Node::Leaf(y)) => x.add_checked(y).map(Node::Leaf),
        (Node::Leaf(_), _) | (_, Node::Leaf(_)) => Err(Error::MixedKinds { op: "sum" }),
        _ => {
            let (sa, sb) = (plain_set("sum", a)?, plain_set("sum", b)?);
            Ok(Node::sequence(sa.nodes().chain(sb.nodes()).cloned()))
        }
    }
}

pub fn pair<N>(f: Node<N>, g: Node<N>) -> Node<N> {
    Node::record([("fst", f), ("snd", g)])
}

/// The arrow coproduct `f + g` composed with a boolean: `f` on true.
pub fn if_arrow<N: Natural, T>(cond: &Node<N>, f: T, g: T) -> Result<T> {
    Ok(if boolean("if", cond)? { f } else { g })
}

pub fn nat_lattice<N: Natural>(op: LatticeOp, a: &Node<N>, b: &Node<N>) -> Result<Node<N>> {
    let name = match op {
        LatticeOp::Min => "min",
        LatticeOp::Max => "max",
        LatticeOp::Monus => "monus",
    };
    let (x, y) = (leaf(name, a)?, leaf(name, b)?);
    Ok(Node::Leaf(match op {
        LatticeOp::Min => x.min(y).clone(),
        LatticeOp::Max => x.max(y).clone(),
        LatticeOp::Monus => x.monus(y),
    }))
}

pub fn remainder<N: Natural>(a: &Node<N>, b: &Node<N>) -> Result<Node<N>> {
    leaf("rem", a)?.rem_checked(leaf("rem", b)?).map(Node::Leaf)
}

pub fn bool_lattice<N: Natural>(op: BoolOp, args: &[Node<N>]) -> Result<Node<N>> {
    let (name, arity) = match op {
        BoolOp::And => ("and", 2),
        BoolOp::Or => ("or", 2),
        BoolOp::Not => ("not", 1),
        BoolOp::Implies => ("implies", 2),
    };
    if args.len() != arity {
        return Err(Error::Arity {
            op: name,
            expected: if arity == 1 { "1" } else { "2" },
            found: args.len(),
        });
    }
    let vals = args
        .iter()
        .map(|a| boolean(name, a))
        .collect::<Result<Vec<_>>>()?;
    let r = match op {
        BoolOp::And => vals[0] && vals[1],
        BoolOp::Or => vals[0] || vals[1],
        BoolOp::Not => !vals[0],
        BoolOp::Implies => !vals[0] || vals[1],
    };
    Ok(Node::Leaf(N::from_bool(r)))
}

pub fn nat_compare<N: Natural>(op: CmpOp, a: &Node<N>, b: &Node<N>) -> Result<Node<N>> {
    let name = match op {
        CmpOp::Eq => "eq",
        CmpOp::Le => "le",
        CmpOp::Lt => "lt",
    };
    let (x, y) = (leaf(name, a)?, leaf(name, b)?);
    Ok(Node::Leaf(N::from_bool(match op {
        CmpOp::Eq => x == y,
        CmpOp::Le => x <= y,
        CmpOp::Lt => x < y,
    })))
}

/// Structural equality: kinds, leaf values, child keys and order.
pub fn struct_eq<N: PartialEq>(a: &Node<N>, b: &Node<N>) -> bool {
    a == b
}

/// The pullback of `predicate` along `true`: the children of `m` (keys and
/// order kept) on which the predicate holds.
pub fn select<N, F>(m: &Node<N>, mut predicate: F) -> Result<Node<N>>
where
    N: Clone,
    F: FnMut(&Node<N>) -> Result<bool>,
{
    let Node::Set(set) = m else {
        return Err(Error::NotASet(crate::tree::Path::identity()));
    };
    if set.op.is_some() {
        return Err(Error::NotAValue);
    }
    let mut out = SetNode::default();
    for child in &set.children {
        if predicate(&child.node)? {
            out.children.push(child.clone());
        }
    }
    Ok(Node::Set(out))
}

fn arity<N>(op: Builtin, args: &[Node<N>], expected: usize) -> Result<()> {
    if args.len() == expected {
        Ok(())
    } else {
        Err(Error::Arity {
            op: op.name(),
            expected: match expected {
                1 => "1",
                2 => "2",
                _ => "3",
            },
            found: args.len(),
        })
    }
}

fn fold<N: Natural>(
    op: Builtin,
    args: &[Node<N>],
    f: impl Fn(&Node<N>, &Node<N>) -> Result<Node<N>>,
) -> Result<Node<N>> {
    let Some((first, rest)) = args.split_first() else {
        return Err(Error::Arity {
            op: op.name(),
            expected: "at least 2",
            found: 0,
        });
    };
    if rest.is_empty() {
        return Err(Error::Arity {
            op: op.name(),
            expected: "at least 2",
            found: 1,
        });
    }
    rest.iter().try_fold(first.clone(), |acc, x| f(&acc, x))
}

/// Applies a strict built-in to evaluated operands. `select` and the lazy
/// `if` are handled by the evaluator; calling this with them reports arity
/// or type errors only.
pub fn apply<N: Natural>(op: Builtin, args: &[Node<N>]) -> Result<Node<N>> {
    match op {
        Builtin::Prod => fold(op, args, product),
        Builtin::Sum => fold(op, args, coproduct),
        Builtin::Min => fold(op, args, |a, b| nat_lattice(LatticeOp::Min, a, b)),
        Builtin::Max => fold(op, args, |a, b| nat_lattice(LatticeOp::Max, a, b)),
        Builtin::Monus => {
            arity(op, args, 2)?;
            nat_lattice(LatticeOp::Monus, &args[0], &args[1])
        }
        Builtin::Rem => {
            arity(op, args, 2)?;
            remainder(&args[0], &args[1])
        }
        Builtin::Pair => {
            arity(op, args, 2)?;
            Ok(pair(args[0].clone(), args[1].clone()))
        }
        Builtin::If => {
            arity(op, args, 3)?;
            if_arrow(&args[0], args[1].clone(), args[2].clone())
        }
        Builtin::And => bool_lattice(BoolOp::And, args),
        Builtin::Or => bool_lattice(BoolOp::Or, args),
        Builtin::Not => bool_lattice(BoolOp::Not, args),
        Builtin::Implies => bool_lattice(BoolOp::Implies, args),
        Builtin::Eq | Builtin::Le | Builtin::Lt => {
            arity(op, args, 2)?;
            let cmp = match op {
                Builtin::Eq => CmpOp::Eq,
                Builtin::Le => CmpOp::Le,
                _ => CmpOp::Lt,
            };
            nat_compare(cmp, &args[0], &args[1])
        }
        Builtin::SetEq => {
            arity(op, args, 2)?;
            Ok(Node::Leaf(N::from_bool(struct_eq(&args[0], &args[1]))))
        }
        Builtin::Select => Err(Error::Arity {
            op: "select",
            expected: "a set and a predicate",
            found: args.len(),
        }),
    }
}
