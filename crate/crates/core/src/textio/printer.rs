use std::fmt::Write;

use crate::scalar::Natural;
use crate::tree::{Key, Node, SetNode};

const INDENT: usize = 2;

fn printable(c: char) -> bool {
    c == '\n' || !c.is_control()
}

/// The string-sugar reading of a node, if the printer should use it.
fn sugar<N: Natural>(set: &SetNode<N>) -> Option<String> {
    if set.op.is_some() || set.is_empty() {
        return None;
    }
    let mut out = String::with_capacity(set.len());
    for child in &set.children {
        match (&child.key, &child.node) {
            (Key::Positional, Node::Leaf(n)) => out.push(n.to_char().filter(|&c| printable(c))?),
            _ => return None,
        }
    }
    Some(out)
}

fn quote(text: &str, out: &mut String) {
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub(crate) fn entries<N: Natural>(set: &SetNode<N>, depth: usize, out: &mut String) {
    for (k, child) in set.children.iter().enumerate() {
        out.extend(std::iter::repeat_n(' ', depth * INDENT));
        match &child.key {
            Key::Named(l) => out.push_str(l.as_str()),
            Key::Positional => {
                let _ = write!(out, "#{k}");
            }
        }
        match &child.node {
            Node::Set(s) if sugar(s).is_none() => out.push(' '),
            _ => out.push_str(" = "),
        }
        body(&child.node, depth, out);
        out.push('\n');
    }
}

/// Writes the part of an entry after its label and separator.
pub(crate) fn body<N: Natural>(node: &Node<N>, depth: usize, out: &mut String) {
    match node {
        Node::Leaf(n) => {
            let _ = write!(out, "{n}");
        }
        Node::Ref(p) => {
            let _ = write!(out, "[{p}]");
        }
        Node::Var(v) => {
            let _ = write!(out, "${v}");
        }
        Node::Set(s) => {
            if let Some(text) = sugar(s) {
                quote(&text, out);
                return;
            }
            if let Some(op) = &s.op {
                let _ = write!(out, ": {op} ");
            }
            if s.is_empty() {
                out.push_str("{}");
            } else {
                out.push_str("{\n");
                entries(s, depth + 1, out);
                out.extend(std::iter::repeat_n(' ', depth * INDENT));
                out.push('}');
            }
        }
    }
}
