use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(String),
    Ordinal(String),
    Str(String),
    Var(String),
    Eq,
    Colon,
    Dot,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(s) => format!("number `{s}`"),
            Tok::Ordinal(s) => format!("`#{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::Var(s) => format!("`${s}`"),
            Tok::Eq => "`=`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
}

pub(crate) struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn skip_trivia(&mut self) -> Result<(), ParseError> {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let at = self.pos();
                    self.bump();
                    if self.chars.peek() != Some(&'/') {
                        return Err(ParseError::syntax(at, "expected `//` comment"));
                    }
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    pub(crate) fn next_token(&mut self) -> Result<(Tok, Pos), ParseError> {
        self.skip_trivia()?;
        let at = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok((Tok::Eof, at));
        };
        let ident_start = |c: char| c.is_ascii_alphabetic() || c == '_';
        let ident_rest = |c: char| c.is_ascii_alphanumeric() || c == '_';
        let tok = match c {
            '=' | ':' | '.' | '{' | '}' | '[' | ']' => {
                self.bump();
                match c {
                    '=' => Tok::Eq,
                    ':' => Tok::Colon,
                    '.' => Tok::Dot,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBrack,
                    _ => Tok::RBrack,
                }
            }
            '#' => {
                self.bump();
                let digits = self.take_while(|c| c.is_ascii_digit());
                if digits.is_empty() {
                    return Err(ParseError::syntax(at, "expected digits after `#`"));
                }
                Tok::Ordinal(digits)
            }
            '$' => {
                self.bump();
                match self.chars.peek() {
                    Some(&c) if ident_start(c) => Tok::Var(self.take_while(ident_rest)),
                    _ => return Err(ParseError::syntax(at, "expected identifier after `$`")),
                }
            }
            '"' => {
                self.bump();
                Tok::Str(self.string_body(at)?)
            }
            c if c.is_ascii_digit() => {
                let digits = self.take_while(|c| c.is_ascii_digit());
                if self.chars.peek().is_some_and(|&c| ident_rest(c)) {
                    return Err(ParseError::syntax(at, "malformed number"));
                }
                Tok::Nat(digits)
            }
            c if ident_start(c) => Tok::Ident(self.take_while(ident_rest)),
            other => {
                return Err(ParseError::syntax(
                    at,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        Ok((tok, at))
    }

    fn string_body(&mut self, start: Pos) -> Result<String, ParseError> {
        let mut out = String::new();
        loop {
            let esc_at = self.pos();
            match self.bump() {
                None => return Err(ParseError::syntax(start, "unterminated string")),
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    Some('n') => out.push('\n'),
                    _ => return Err(ParseError::syntax(esc_at, "invalid escape")),
                },
                Some(c) => out.push(c),
            }
        }
    }
}
