mod common;

use common::{gen, p};
use evocat::engine::{match_pattern, substitute, Binding};
use evocat::tree::{Child, Node, StateTree};
use evocat::{parse, Label, Machine64};
use proptest::prelude::*;

/// Replaces leaves of `n` with fresh variables `$V0`, `$V1`, ... where
/// `mask` says so, giving a linear pattern.
fn abstract_leaves(
    n: &Node<u64>,
    mask: &mut impl Iterator<Item = bool>,
    next: &mut usize,
) -> Node<u64> {
    match n {
        Node::Leaf(_) if mask.next().unwrap_or(false) => {
            *next += 1;
            Node::Var(Label::new(format!("V{}", *next - 1)).unwrap())
        }
        Node::Set(s) => {
            let mut s = s.clone();
            for c in &mut s.children {
                c.node = abstract_leaves(&c.node, mask, next);
            }
            Node::Set(s)
        }
        other => other.clone(),
    }
}

fn ground_arith() -> impl Strategy<Value = Node<u64>> {
    let leaf = (0u64..50).prop_map(Node::Leaf);
    leaf.prop_recursive(4, 40, 3, |inner| {
        (
            prop::sample::select(vec!["sum", "prod", "min", "max", "monus"]),
            prop::collection::vec(inner, 2..=3),
        )
            .prop_map(|(op, args)| {
                let args = if op == "monus" {
                    args[..2].to_vec()
                } else {
                    args
                };
                Node::term(Label::new(op).unwrap(), args)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn match_inverts_substitute_on_linear_patterns(
        t in gen::tree(),
        mask in prop::collection::vec(any::<bool>(), 0..64),
        values in prop::collection::vec(gen::tree(), 4),
    ) {
        let mut next = 0;
        let pattern = abstract_leaves(&t, &mut mask.into_iter(), &mut next);
        let mut b = Binding::default();
        for i in 0..next {
            b.vars.insert(Label::new(format!("V{i}")).unwrap(), values[i % values.len()].clone());
        }
        let instance = substitute(&pattern, &b).unwrap();
        prop_assert_eq!(match_pattern(&pattern, &instance), Some(b));
    }

    #[test]
    fn evaluating_a_value_is_the_identity(t in gen::tree()) {
        let value = strip_terms(&t);
        let mut m = Machine64::new(parse("").unwrap());
        prop_assert_eq!(m.evaluate(value.clone()).unwrap(), value);
        prop_assert_eq!(m.stats().firings, 0);
    }

    #[test]
    fn more_fuel_gives_the_same_result(t in ground_arith(), extra in 1u64..1000) {
        let tree = StateTree::new(Node::record([("t", t)]));
        let mut probe = Machine64::new(tree.clone());
        let v = probe.data_of(&p("t")).unwrap();
        let needed = evocat::DEFAULT_FUEL - probe.fuel_left();
        let mut exact = Machine64::new(tree.clone()).with_fuel(needed);
        prop_assert_eq!(exact.data_of(&p("t")).unwrap(), v.clone());
        let mut more = Machine64::new(tree.clone()).with_fuel(needed + extra);
        prop_assert_eq!(more.data_of(&p("t")).unwrap(), v);
        if needed > 0 {
            let mut short = Machine64::new(tree).with_fuel(needed - 1);
            prop_assert_eq!(short.data_of(&p("t")), Err(evocat::Error::FuelExhausted));
        }
    }

    #[test]
    fn rereading_fires_nothing(t in ground_arith()) {
        let mut m = Machine64::new(StateTree::new(Node::record([("t", t)])));
        let first = m.data_of(&p("t")).unwrap();
        let fired = m.stats().firings;
        prop_assert_eq!(m.data_of(&p("t")).unwrap(), first);
        prop_assert_eq!(m.stats().firings, fired);
    }

    #[test]
    fn big_and_machine_naturals_agree(t in ground_arith()) {
        let text = evocat::print(&StateTree::new(Node::record([("t", t)])));
        let small = Machine64::new(parse(&text).unwrap()).data_of(&p("t"));
        let big = evocat::Machine::new(parse(&text).unwrap()).data_of(&p("t"));
        match (small, big) {
            (Ok(a), Ok(b)) => prop_assert_eq!(evocat::print_node(&a), evocat::print_node(&b)),
            (Err(evocat::Error::Overflow), Ok(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }
}

/// Drops ops and references so that only values remain.
fn strip_terms(n: &Node<u64>) -> Node<u64> {
    match n {
        Node::Set(s) => Node::Set(evocat::tree::SetNode {
            op: None,
            children: s
                .children
                .iter()
                .map(|c| Child {
                    key: c.key.clone(),
                    node: strip_terms(&c.node),
                })
                .collect(),
        }),
        Node::Ref(_) | Node::Var(_) => Node::Leaf(0),
        leaf => leaf.clone(),
    }
}

#[test]
fn rewriting_is_deterministic() {
    let run = || {
        let mut m = common::with_stdlib("g1 : gcd { arg1 = 1071 arg2 = 462 } g2 : fact { n = 7 }");
        let a = m.data_of(&p("g1")).unwrap();
        let b = m.data_of(&p("g2")).unwrap();
        (a, b, evocat::print(m.tree()))
    };
    assert_eq!(run(), run());
}
