//! Helpers and reference implementations shared by the integration tests.
#![allow(dead_code)]

use evocat::tree::Node;
use evocat::{parse, Machine64, Path, StateTree64, STDLIB};

pub fn p(s: &str) -> Path {
    Path::parse(s).unwrap()
}

pub fn leaf(n: u64) -> Node<u64> {
    Node::Leaf(n)
}

/// A machine over `src` with the standard templates merged in.
pub fn with_stdlib(src: &str) -> Machine64 {
    let tree: StateTree64 = parse(&format!("{STDLIB}\n{src}")).unwrap();
    Machine64::new(tree)
}

/// Euclid's algorithm; also returns the number of remainder steps.
pub fn euclid(mut a: u64, mut b: u64) -> (u64, u64) {
    let mut steps = 0;
    while b != 0 {
        (a, b) = (b, a % b);
        steps += 1;
    }
    (a, steps)
}

pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// Zeller's congruence, shifted so that Monday is 0.
pub fn zeller_monday0(day: u64, month: u64, year: u64) -> u64 {
    let (m, y) = if month < 3 {
        (month + 12, year - 1)
    } else {
        (month, year)
    };
    let k = y % 100;
    let j = y / 100;
    let h = (day + 13 * (m + 1) / 5 + k + k / 4 + j / 4 + 5 * j) % 7; // 0 = Saturday
    (h + 5) % 7
}

pub fn rng(seed: u64) -> rand::rngs::StdRng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub mod gen {
    use evocat::tree::{Child, Key, Node, SetNode};
    use evocat::{Label, Op, Path, Segment};
    use proptest::prelude::*;

    pub const LABELS: [&str; 20] = [
        "a", "b", "c", "d", "e", "f", "g", "h", "x", "y", "z", "day", "name", "age", "list",
        "next", "left", "right", "k_1", "Val",
    ];

    pub fn label() -> impl Strategy<Value = Label> {
        prop::sample::select(&LABELS[..]).prop_map(|s| Label::new(s).unwrap())
    }

    pub fn segment() -> impl Strategy<Value = Segment> {
        prop_oneof![
            3 => label().prop_map(Segment::Name),
            1 => (0usize..5).prop_map(Segment::Index),
        ]
    }

    pub fn path(max: usize) -> impl Strategy<Value = Path> {
        prop::collection::vec(segment(), 0..=max).prop_map(Path::new)
    }

    pub fn label_path(max: usize) -> impl Strategy<Value = Path> {
        prop::collection::vec(label().prop_map(Segment::Name), 0..=max).prop_map(Path::new)
    }

    fn leaf() -> impl Strategy<Value = Node<u64>> {
        prop_oneof![
            3 => (0u64..200).prop_map(Node::Leaf),
            1 => any::<u64>().prop_map(Node::Leaf),
        ]
    }

    fn set_of(inner: BoxedStrategy<Node<u64>>) -> impl Strategy<Value = Node<u64>> {
        (
            prop::option::weighted(0.3, label()),
            prop::collection::vec((prop::option::of(label()), inner), 0..=5),
        )
            .prop_map(|(op, entries)| {
                let mut set = SetNode {
                    op: op.map(Op::Name),
                    children: Vec::new(),
                };
                for (name, node) in entries {
                    let key = match name {
                        Some(l) if set.named(l.as_str()).is_none() => Key::Named(l),
                        _ => Key::Positional,
                    };
                    set.children.push(Child { key, node });
                }
                Node::Set(set)
            })
    }

    /// Trees of depth at most 6 with at most 5 children per node; the
    /// root is always a plain set, like a parsed file.
    pub fn tree() -> impl Strategy<Value = Node<u64>> {
        let base = prop_oneof![
            4 => leaf(),
            1 => path(3).prop_map(Node::Ref),
        ];
        let node = base.prop_recursive(5, 200, 5, |inner| set_of(inner.boxed()));
        set_of(node.boxed()).prop_map(|mut n| {
            n.as_set_mut().unwrap().op = None;
            n
        })
    }
}
