mod common;

use common::gen;
use evocat::tree::{Node, StateTree};
use evocat::{parse, print, ParseError, StateTree64};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parse_inverts_print(root in gen::tree()) {
        let t = StateTree::new(root);
        let text = print(&t);
        let back: StateTree64 = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, t);
    }

    #[test]
    fn printing_is_a_fixpoint(root in gen::tree()) {
        let once = print(&StateTree::new(root));
        let twice = print(&parse::<u64>(&once).unwrap());
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn parser_never_panics_on_bytes(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse::<u64>(&String::from_utf8_lossy(&bytes));
    }

    #[test]
    fn parser_never_panics_on_token_soup(
        parts in prop::collection::vec(
            prop::sample::select(vec!["a", "=", "{", "}", "[", "]", ":", ".", "#0", "#1", "$X", "5", "\"s\"", " ", "\n", "//c\n", "rules", "select"]),
            0..60,
        )
    ) {
        let _ = parse::<u64>(&parts.concat());
    }

    #[test]
    fn strings_round_trip(s in "[ -~\n]{1,20}") {
        let t = StateTree::new(Node::record([("s", Node::<u64>::string(&s))]));
        let text = print(&t);
        prop_assert_eq!(parse::<u64>(&text).unwrap(), t);
    }
}

#[test]
fn error_positions() {
    let e = parse::<u64>("a = 1\nb = }").unwrap_err();
    assert!(matches!(e, ParseError::Syntax { .. }));
    assert_eq!(e.position(), (2, 5));
    let e = parse::<u64>("a = 1 a = 2").unwrap_err();
    assert!(matches!(e, ParseError::DuplicateSibling { .. }));
    let e = parse::<u64>("a = $X").unwrap_err();
    assert!(matches!(e, ParseError::VariablesOutsideRules { .. }));
    assert!(parse::<u64>("rules { #0 { lhs = $X rhs = $X } }").is_ok());
    let e = parse::<u64>("a { #1 = 3 }").unwrap_err();
    assert!(matches!(e, ParseError::Syntax { .. }));
}

#[test]
fn gcd_goal_is_a_term() {
    let t = parse::<u64>("goal : gcd { a = 12 b = 8 }").unwrap();
    assert_eq!(print(&t), "goal : gcd {\n  a = 12\n  b = 8\n}\n");
}
