use super::lexer::{Lexer, Pos, Tok};
use super::ParseError;
use crate::scalar::Natural;
use crate::tree::{Child, Key, Label, Node, Op, Path, Segment, SetNode};

const MAX_DEPTH: usize = 256;

pub(crate) struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    pos: Pos,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, pos) = lexer.next_token()?;
        Ok(Self { lexer, tok, pos })
    }

    fn advance(&mut self) -> Result<Tok, ParseError> {
        let (tok, pos) = self.lexer.next_token()?;
        self.pos = pos;
        Ok(std::mem::replace(&mut self.tok, tok))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        Err(ParseError::syntax(
            self.pos,
            format!("expected {wanted}, found {}", self.tok.describe()),
        ))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.tok == tok {
            self.advance()?;
            Ok(())
        } else {
            self.unexpected(&tok.describe())
        }
    }

    pub(crate) fn parse_root<N: Natural>(mut self) -> Result<Node<N>, ParseError> {
        let set = self.entries(Tok::Eof, false, 0)?;
        Ok(Node::Set(set))
    }

    /// `entry*` up to (and consuming) `close`.
    fn entries<N: Natural>(
        &mut self,
        close: Tok,
        vars_ok: bool,
        depth: usize,
    ) -> Result<SetNode<N>, ParseError> {
        if depth > MAX_DEPTH {
            return Err(ParseError::syntax(self.pos, "nesting too deep"));
        }
        let mut set = SetNode::default();
        loop {
            if self.tok == close {
                self.advance()?;
                return Ok(set);
            }
            let at = self.pos;
            let key = match self.advance()? {
                Tok::Ident(name) => Key::Named(Label::new(name).expect("lexer yields identifiers")),
                Tok::Ordinal(digits) => {
                    let expected = set.len().to_string();
                    if digits.trim_start_matches('0') != expected.trim_start_matches('0') {
                        return Err(ParseError::syntax(
                            at,
                            format!("positional label `#{digits}` at position {expected}"),
                        ));
                    }
                    Key::Positional
                }
                Tok::Eof => {
                    return Err(ParseError::syntax(
                        at,
                        "unexpected end of input, missing `}`",
                    ))
                }
                other => {
                    return Err(ParseError::syntax(
                        at,
                        format!("expected a label, found {}", other.describe()),
                    ))
                }
            };
            if let Key::Named(l) = &key {
                if set.children.iter().any(|c| c.key.name() == Some(l)) {
                    return Err(ParseError::DuplicateSibling {
                        line: at.line,
                        column: at.column,
                        label: l.to_string(),
                    });
                }
            }
            let inner_vars = vars_ok || key.name().is_some_and(|l| l.as_str() == "rules");
            let node = self.body(inner_vars, depth)?;
            set.children.push(Child { key, node });
        }
    }

    fn body<N: Natural>(&mut self, vars_ok: bool, depth: usize) -> Result<Node<N>, ParseError> {
        match self.tok {
            Tok::Eq => {
                self.advance()?;
                self.value(vars_ok)
            }
            Tok::Colon => {
                self.advance()?;
                let at = self.pos;
                let op = match self.advance()? {
                    Tok::Ident(name) => Op::Name(Label::new(name).expect("identifier")),
                    Tok::Var(name) => {
                        if !vars_ok {
                            return Err(ParseError::vars(at));
                        }
                        Op::Var(Label::new(name).expect("identifier"))
                    }
                    other => {
                        return Err(ParseError::syntax(
                            at,
                            format!(
                                "expected an operation identifier, found {}",
                                other.describe()
                            ),
                        ))
                    }
                };
                let vars_ok = vars_ok || matches!(&op, Op::Name(l) if l.as_str() == "select");
                self.expect(Tok::LBrace)?;
                let mut set = self.entries(Tok::RBrace, vars_ok, depth + 1)?;
                set.op = Some(op);
                Ok(Node::Set(set))
            }
            Tok::LBrace => {
                self.advance()?;
                Ok(Node::Set(self.entries(Tok::RBrace, vars_ok, depth + 1)?))
            }
            _ => self.unexpected("`=`, `:` or `{`"),
        }
    }

    fn value<N: Natural>(&mut self, vars_ok: bool) -> Result<Node<N>, ParseError> {
        let at = self.pos;
        match self.advance()? {
            Tok::Nat(digits) => N::parse_decimal(&digits)
                .map(Node::Leaf)
                .ok_or_else(|| ParseError::syntax(at, "number out of range")),
            Tok::Str(text) => {
                let mut items = Vec::with_capacity(text.len());
                for c in text.chars() {
                    items.push(Node::Leaf(N::from_char(c).ok_or_else(|| {
                        ParseError::syntax(at, "code point out of range")
                    })?));
                }
                Ok(Node::sequence(items))
            }
            Tok::Var(name) => {
                if vars_ok {
                    Ok(Node::Var(Label::new(name).expect("identifier")))
                } else {
                    Err(ParseError::vars(at))
                }
            }
            Tok::LBrack => {
                let path = self.path()?;
                self.expect(Tok::RBrack)?;
                Ok(Node::Ref(path))
            }
            other => Err(ParseError::syntax(
                at,
                format!("expected a value, found {}", other.describe()),
            )),
        }
    }

    fn path(&mut self) -> Result<Path, ParseError> {
        let mut segs = Vec::new();
        if self.tok == Tok::RBrack {
            return Ok(Path::identity());
        }
        loop {
            let at = self.pos;
            segs.push(match self.advance()? {
                Tok::Ident(name) => Segment::Name(Label::new(name).expect("identifier")),
                Tok::Ordinal(digits) => Segment::Index(
                    digits
                        .parse()
                        .map_err(|_| ParseError::syntax(at, "ordinal out of range"))?,
                ),
                other => {
                    return Err(ParseError::syntax(
                        at,
                        format!("expected a path segment, found {}", other.describe()),
                    ))
                }
            });
            if self.tok != Tok::Dot {
                return Ok(Path::new(segs));
            }
            self.advance()?;
        }
    }
}
