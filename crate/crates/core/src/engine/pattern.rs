//! First-order matching with nonlinear variables, plus the restricted
//! second-order case where a function variable is applied to distinct,
//! already-bound variables. That restriction makes the match unique: the
//! function variable binds to the matched subtree with every occurrence of
//! its arguments' values abstracted into holes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::tree::{Child, Label, Node, Op, SetNode};

/// A one-or-more-hole context `λ _0 … _k. body`. Holes are the variables
/// `$_0`, `$_1`, … inside `body`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abstraction<N> {
    pub body: Node<N>,
    pub arity: usize,
}

impl<N: Clone> Abstraction<N> {
    pub fn apply(&self, args: &[Node<N>]) -> Result<Node<N>> {
        if args.len() != self.arity {
            return Err(Error::InvalidFormula(format!(
                "function variable expects {} arguments, got {}",
                self.arity,
                args.len()
            )));
        }
        Ok(fill_holes(&self.body, args))
    }
}

fn hole_label(i: usize) -> Label {
    Label::new(format!("_{i}")).expect("hole label")
}

fn hole_index(l: &Label) -> Option<usize> {
    l.as_str().strip_prefix('_')?.parse().ok()
}

fn fill_holes<N: Clone>(body: &Node<N>, args: &[Node<N>]) -> Node<N> {
    match body {
        Node::Var(v) => match hole_index(v).and_then(|i| args.get(i)) {
            Some(a) => a.clone(),
            None => body.clone(),
        },
        Node::Set(s) => Node::Set(SetNode {
            op: s.op.clone(),
            children: s
                .children
                .iter()
                .map(|c| Child {
                    key: c.key.clone(),
                    node: fill_holes(&c.node, args),
                })
                .collect(),
        }),
        other => other.clone(),
    }
}

/// Replaces, outermost first, every subtree equal to one of `values` by the
/// corresponding hole.
fn abstract_over<N: Clone + PartialEq>(t: &Node<N>, values: &[&Node<N>]) -> Node<N> {
    if let Some(i) = values.iter().position(|v| *v == t) {
        return Node::Var(hole_label(i));
    }
    match t {
        Node::Set(s) => Node::Set(SetNode {
            op: s.op.clone(),
            children: s
                .children
                .iter()
                .map(|c| Child {
                    key: c.key.clone(),
                    node: abstract_over(&c.node, values),
                })
                .collect(),
        }),
        other => other.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding<N> {
    pub vars: BTreeMap<Label, Node<N>>,
    pub funs: BTreeMap<Label, Abstraction<N>>,
}

impl<N> Default for Binding<N> {
    fn default() -> Self {
        Self {
            vars: BTreeMap::new(),
            funs: BTreeMap::new(),
        }
    }
}

impl<N> Binding<N> {
    pub fn var(&self, name: &str) -> Option<&Node<N>> {
        self.vars
            .iter()
            .find(|(k, _)| k.as_str() == name)
            .map(|(_, v)| v)
    }

    pub fn fun(&self, name: &str) -> Option<&Abstraction<N>> {
        self.funs
            .iter()
            .find(|(k, _)| k.as_str() == name)
            .map(|(_, v)| v)
    }
}

struct Deferred<'p, N> {
    fun: &'p Label,
    args: Vec<&'p Label>,
    target: Node<N>,
}

fn match_into<'p, N: Clone + PartialEq>(
    p: &'p Node<N>,
    t: &Node<N>,
    b: &mut Binding<N>,
    deferred: &mut Vec<Deferred<'p, N>>,
) -> bool {
    match p {
        Node::Var(x) => match b.vars.get(x) {
            Some(bound) => bound == t,
            None => {
                b.vars.insert(x.clone(), t.clone());
                true
            }
        },
        Node::Leaf(_) | Node::Ref(_) => p == t,
        Node::Set(ps) => {
            if let Some(Op::Var(f)) = &ps.op {
                let args = ps
                    .nodes()
                    .map(|a| match a {
                        Node::Var(x) => Some(x),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>();
                return match args {
                    Some(args) => {
                        deferred.push(Deferred {
                            fun: f,
                            args,
                            target: t.clone(),
                        });
                        true
                    }
                    None => false,
                };
            }
            let Node::Set(ts) = t else {
                return false;
            };
            ps.op == ts.op
                && ps.len() == ts.len()
                && ps
                    .children
                    .iter()
                    .zip(&ts.children)
                    .all(|(pc, tc)| pc.key == tc.key && match_into(&pc.node, &tc.node, b, deferred))
        }
    }
}

/// Matches `p` against `t`; `None` when they do not match.
pub fn match_pattern<N: Clone + PartialEq>(p: &Node<N>, t: &Node<N>) -> Option<Binding<N>> {
    let mut b = Binding::default();
    let mut deferred = Vec::new();
    if !match_into(p, t, &mut b, &mut deferred) {
        return None;
    }
    for d in deferred {
        let values = d
            .args
            .iter()
            .map(|x| b.vars.get(*x))
            .collect::<Option<Vec<_>>>()?;
        let abs = Abstraction {
            body: abstract_over(&d.target, &values),
            arity: d.args.len(),
        };
        match b.funs.get(d.fun) {
            Some(prev) if *prev != abs => return None,
            Some(_) => {}
            None => {
                b.funs.insert(d.fun.clone(), abs);
            }
        }
    }
    Some(b)
}

/// Instantiates a template with the bound subtrees.
pub fn substitute<N: Clone>(tmpl: &Node<N>, b: &Binding<N>) -> Result<Node<N>> {
    match tmpl {
        Node::Var(x) => b
            .vars
            .get(x)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(x.to_string())),
        Node::Set(s) => {
            let children = s
                .children
                .iter()
                .map(|c| {
                    Ok(Child {
                        key: c.key.clone(),
                        node: substitute(&c.node, b)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match &s.op {
                Some(Op::Var(f)) => {
                    let abs = b
                        .funs
                        .get(f)
                        .ok_or_else(|| Error::UnboundVariable(f.to_string()))?;
                    let args: Vec<_> = children.into_iter().map(|c| c.node).collect();
                    abs.apply(&args)
                }
                op => Ok(Node::Set(SetNode {
                    op: op.clone(),
                    children,
                })),
            }
        }
        other => Ok(other.clone()),
    }
}

#[derive(Default)]
struct VarUse<'a> {
    first_order: BTreeSet<&'a Label>,
    fun_arity: BTreeMap<&'a Label, usize>,
    ho_args: Vec<&'a Label>,
}

fn collect_vars<'a, N>(n: &'a Node<N>, uses: &mut VarUse<'a>, pattern: bool) -> Result<()> {
    match n {
        Node::Var(x) => {
            uses.first_order.insert(x);
        }
        Node::Set(s) => {
            if let Some(Op::Var(f)) = &s.op {
                if uses
                    .fun_arity
                    .insert(f, s.len())
                    .is_some_and(|a| a != s.len())
                {
                    return Err(Error::InvalidFormula(format!(
                        "`${f}` used with different arities"
                    )));
                }
                if pattern {
                    let mut seen = BTreeSet::new();
                    for a in s.nodes() {
                        match a {
                            Node::Var(x) if seen.insert(x) => uses.ho_args.push(x),
                            _ => {
                                return Err(Error::InvalidFormula(format!(
                                    "`${f}` must be applied to distinct variables"
                                )))
                            }
                        }
                    }
                    return Ok(());
                }
            }
            for c in s.nodes() {
                collect_vars(c, uses, pattern)?;
            }
        }
        Node::Leaf(_) | Node::Ref(_) => {}
    }
    Ok(())
}

pub(crate) fn validate<N>(lhs: &Node<N>, rhs: &Node<N>) -> Result<()> {
    let mut l = VarUse::default();
    collect_vars(lhs, &mut l, true)?;
    if let Some(x) = l.ho_args.iter().find(|x| !l.first_order.contains(*x)) {
        return Err(Error::InvalidFormula(format!(
            "`${x}` appears only as a function-variable argument"
        )));
    }
    let mut r = VarUse::default();
    collect_vars(rhs, &mut r, false)?;
    if let Some(x) = r.first_order.iter().find(|x| !l.first_order.contains(*x)) {
        return Err(Error::UnboundVariable(x.to_string()));
    }
    for (f, arity) in &r.fun_arity {
        match l.fun_arity.get(f) {
            None => return Err(Error::UnboundVariable(f.to_string())),
            Some(a) if a != arity => {
                return Err(Error::InvalidFormula(format!(
                    "`${f}` used with different arities"
                )))
            }
            Some(_) => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::parse;
    use crate::tree::Path;

    type V = Node<u64>;

    /// Parses `rules { e <body> }` and returns the node `e`.
    fn pat(body: &str) -> V {
        let t = parse::<u64>(&format!("rules {{ e {body} }}")).unwrap();
        t.resolve(&Path::parse("rules.e").unwrap()).unwrap().clone()
    }

    #[test]
    fn first_order() {
        let p = pat(": gcd { a = $X b = 0 }");
        let b = match_pattern(&p, &pat(": gcd { a = 7 b = 0 }")).unwrap();
        assert_eq!(b.var("X"), Some(&Node::leaf(7u64)));
        assert!(match_pattern(&p, &pat(": gcd { a = 7 b = 3 }")).is_none());
        assert!(match_pattern(&p, &pat(": gcd { #0 = 7 #1 = 0 }")).is_none());
        assert!(match_pattern(&p, &pat(": lcm { a = 7 b = 0 }")).is_none());
    }

    #[test]
    fn nonlinear() {
        let p = pat(": d { #0 = $X #1 = $X }");
        assert!(match_pattern(&p, &pat(": d { #0 : x {} #1 : x {} }")).is_some());
        assert!(match_pattern(&p, &pat(": d { #0 = 3 #1 : x {} }")).is_none());
    }

    #[test]
    fn second_order_product_rule_shape() {
        let p = pat(": d { #0 : prod { #0 : $F { #0 = $X } #1 : $G { #0 = $X } } #1 = $X }");
        let t = pat(": d { #0 : prod { #0 : x {} #1 : sin { #0 : x {} } } #1 : x {} }");
        let b = match_pattern(&p, &t).unwrap();
        assert_eq!(b.var("X"), Some(&pat(": x {}")));
        assert_eq!(b.fun("F").unwrap().body, Node::Var(hole_label(0)));
        assert_eq!(
            b.fun("G").unwrap().body,
            Node::term(Label::new("sin").unwrap(), [Node::Var(hole_label(0))])
        );
        // substituting the bindings back reproduces the term
        assert_eq!(substitute(&p, &b).unwrap(), t);
    }

    #[test]
    fn vacuous_hole() {
        let p = pat(": f { #0 : $F { #0 = $X } #1 = $X }");
        let t = pat(": f { #0 = 3 #1 : x {} }");
        let b = match_pattern(&p, &t).unwrap();
        assert_eq!(b.fun("F").unwrap().body, Node::leaf(3u64));
        assert_eq!(
            b.fun("F").unwrap().apply(&[Node::leaf(9u64)]).unwrap(),
            Node::leaf(3u64)
        );
    }

    #[test]
    fn gcd_step_substitution() {
        let rhs = pat(": gcd { a = $Y b : rem { #0 = $X #1 = $Y } }");
        let mut b = Binding::default();
        b.vars.insert(Label::new("X").unwrap(), Node::leaf(12u64));
        b.vars.insert(Label::new("Y").unwrap(), Node::leaf(8u64));
        assert_eq!(
            substitute(&rhs, &b).unwrap(),
            pat(": gcd { a = 8 b : rem { #0 = 12 #1 = 8 } }")
        );
        assert_eq!(substitute(&pat("= $X"), &b).unwrap(), Node::leaf(12u64));
        assert!(matches!(
            substitute(&pat("= $Z"), &b),
            Err(Error::UnboundVariable(_))
        ));
    }

    #[test]
    fn validation() {
        assert!(validate(&pat(": f { #0 = $X }"), &pat("= $X")).is_ok());
        assert!(matches!(
            validate(&pat(": f { #0 = $X }"), &pat("= $Y")),
            Err(Error::UnboundVariable(_))
        ));
        assert!(validate(
            &pat(": f { #0 : $F { #0 = $X #1 = $X } #1 = $X }"),
            &pat("= 0")
        )
        .is_err());
        assert!(validate(&pat(": f { #0 : $F { #0 = $X } }"), &pat("= 0")).is_err());
        assert!(validate(&pat(": f { #0 : $F { #0 = 1 } }"), &pat("= 0")).is_err());
    }
}
