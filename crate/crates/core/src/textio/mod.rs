//! The state language: compiler (`parse`) and de-compiler (`print`).
//!
//! ```text
//! tree     := entry*
//! entry    := LABEL body
//! body     := '=' NAT | '=' STRING | '=' '[' path ']' | '=' VAR
//!           | (':' opid)? '{' tree '}'
//! opid     := IDENT | VAR
//! path     := seg ('.' seg)*         seg := IDENT | '#' NAT
//! LABEL    := IDENT | '#' NAT
//! ```
//!
//! `//` starts a line comment. A string is sugar for a set whose k-th
//! positional child is the k-th code point. `$` variables are accepted only
//! below an entry labelled `rules` or inside a `select` term.
//!
//! Printing is canonical: two-space indentation, one entry per line,
//! children in stored order, positional labels as `#k`.

mod lexer;
mod parser;
mod printer;

use thiserror::Error;

use crate::scalar::Natural;
use crate::tree::{Node, StateTree};

use lexer::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: duplicate sibling label `{label}`")]
    DuplicateSibling {
        line: usize,
        column: usize,
        label: String,
    },
    #[error("{line}:{column}: `$` variable outside rules")]
    VariablesOutsideRules { line: usize, column: usize },
}

impl ParseError {
    fn syntax(at: Pos, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn vars(at: Pos) -> Self {
        ParseError::VariablesOutsideRules {
            line: at.line,
            column: at.column,
        }
    }

    /// 1-based line and column of the error.
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, column, .. }
            | ParseError::DuplicateSibling { line, column, .. }
            | ParseError::VariablesOutsideRules { line, column } => (*line, *column),
        }
    }
}

pub fn parse<N: Natural>(src: &str) -> Result<StateTree<N>, ParseError> {
    parser::Parser::new(src)?.parse_root().map(StateTree::new)
}

/// Canonical text of a whole state.
pub fn print<N: Natural>(tree: &StateTree<N>) -> String {
    let mut out = String::new();
    match &tree.root {
        Node::Set(s) if s.op.is_none() => printer::entries(s, 0, &mut out),
        other => {
            printer::body(other, 0, &mut out);
            out.push('\n');
        }
    }
    out
}

/// Canonical text of a single value: `4`, `"ok"`, or a braced block.
pub fn print_node<N: Natural>(node: &Node<N>) -> String {
    let mut out = String::new();
    printer::body(node, 0, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{Key, Label, Op, Path};

    type T = StateTree<u64>;

    fn p(src: &str) -> T {
        parse(src).unwrap()
    }

    #[test]
    fn nested_sets() {
        let t = p("root { a = 5 b { c = 1 } }");
        let root = t.resolve(&Path::parse("root").unwrap()).unwrap();
        assert_eq!(
            root.child(&"a".parse::<Path>().unwrap().segments()[0]),
            Some(&Node::leaf(5u64))
        );
        assert_eq!(
            t.resolve(&Path::parse("root.b.c").unwrap()),
            Some(&Node::leaf(1u64))
        );
    }

    #[test]
    fn term_node() {
        let t = p("goal : gcd { a = 12 b = 8 }");
        let goal = t.resolve(&Path::parse("goal").unwrap()).unwrap();
        assert_eq!(goal.op(), Some(&Op::Name(Label::new("gcd").unwrap())));
        assert_eq!(goal.as_set().unwrap().len(), 2);
    }

    #[test]
    fn string_sugar() {
        let t = p(r#"name = "John""#);
        let name = t.resolve(&Path::parse("name").unwrap()).unwrap();
        let leaves: Vec<u64> = name
            .as_set()
            .unwrap()
            .nodes()
            .map(|n| *n.as_leaf().unwrap())
            .collect();
        assert_eq!(leaves, vec![74, 111, 104, 110]);
        assert_eq!(print(&t), "name = \"John\"\n");
    }

    #[test]
    fn escapes_round_trip() {
        let src = "s = \"a\\\"b\\\\c\\nd\"\n";
        let t = p(src);
        assert_eq!(
            t.resolve(&Path::parse("s").unwrap())
                .unwrap()
                .as_string()
                .as_deref(),
            Some("a\"b\\c\nd")
        );
        assert_eq!(print(&t), src);
    }

    #[test]
    fn references_and_positional_labels() {
        let t = p("#0 = [a.#2.b] #1 = 3");
        let root = t.root.as_set().unwrap();
        assert_eq!(root.children[0].key, Key::Positional);
        assert_eq!(
            root.children[0].node,
            Node::Ref(Path::parse("a.#2.b").unwrap())
        );
        assert_eq!(print(&t), "#0 = [a.#2.b]\n#1 = 3\n");
    }

    #[test]
    fn canonical_layout() {
        let t = p("// comment\nf : sum { #0 = 1 #1 = [x] } e {} g { h = 2 }");
        assert_eq!(
            print(&t),
            "f : sum {\n  #0 = 1\n  #1 = [x]\n}\ne {}\ng {\n  h = 2\n}\n"
        );
    }

    #[test]
    fn leaf_only_tree_has_no_braces() {
        assert_eq!(print(&p("a = 1 b = 2")), "a = 1\nb = 2\n");
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse::<u64>("a = 1\nb = }").unwrap_err();
        assert_eq!(err.position(), (2, 5));
        assert!(matches!(
            parse::<u64>("a = 1 a = 2"),
            Err(ParseError::DuplicateSibling {
                line: 1,
                column: 7,
                ..
            })
        ));
        assert!(matches!(
            parse::<u64>("x = $X"),
            Err(ParseError::VariablesOutsideRules { .. })
        ));
        assert!(parse::<u64>("#1 = 0").is_err());
        assert!(parse::<u64>("a { b = 1").is_err());
        assert!(parse::<u64>("a = \"open").is_err());
        assert!(parse::<u8>("a = 300").is_err());
    }

    #[test]
    fn variables_allowed_in_rules_and_select() {
        assert!(parse::<u64>("rules { #0 { lhs : $F { #0 = $X } rhs = $X } }").is_ok());
        assert!(parse::<u64>("s : select { #0 = [m] #1 : lt { #0 = $x #1 = 3 } }").is_ok());
        assert!(parse::<u64>("s : sum { #0 = $x }").is_err());
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowed() {
        let src = "a {".repeat(10_000);
        assert!(parse::<u64>(&src).is_err());
    }

    #[test]
    fn value_printing() {
        assert_eq!(print_node(&Node::<u64>::leaf(4u64)), "4");
        assert_eq!(print_node(&Node::<u64>::string("ok")), "\"ok\"");
        assert_eq!(
            print_node(&Node::<u64>::record([("a", Node::leaf(1u64))])),
            "{\n  a = 1\n}"
        );
    }
}
