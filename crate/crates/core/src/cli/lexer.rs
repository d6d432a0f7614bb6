use crate::error::InputError;

/// A source position, 1-based. Positions never affect equality of the
/// values that carry them.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Pos {}

impl Pos {
    pub fn syntax(self, expected: impl Into<String>) -> InputError {
        InputError::Syntax {
            line: self.line,
            col: self.col,
            expected: expected.into(),
        }
    }

    pub fn invalid(self, message: impl Into<String>) -> InputError {
        InputError::Invalid {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    pub fn unknown(self, name: &str) -> InputError {
        InputError::Resolution {
            name: name.to_string(),
            line: self.line,
            col: self.col,
        }
    }

    /// Position `offset` characters further along the same line.
    pub fn advance(self, offset: usize) -> Pos {
        Pos {
            line: self.line,
            col: self.col + offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Uint(u64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {}", s),
            Tok::Uint(n) => format!("number {}", n),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// Splits a document into tokens. Identifiers may contain '-' so that
/// command names like `check-subspace` are single tokens. A string token
/// is positioned at its first character after the opening quote.
pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, InputError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let bump = |c: char, line: &mut usize, col: &mut usize| {
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump(c, &mut line, &mut col);
            i += 1;
        } else if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
                col += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| pos.invalid("number too large"))?;
            out.push((Tok::Uint(n), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                i += 1;
                col += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else if c == '"' {
            i += 1;
            col += 1;
            let body = Pos { line, col };
            let mut text = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(pos.syntax("closing '\"'")),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some(&ch) => {
                        text.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            out.push((Tok::Str(text), body));
        } else {
            let tok = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                _ => return Err(pos.syntax(format!("a token, found '{}'", c))),
            };
            out.push((tok, pos));
            i += 1;
            col += 1;
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("tower {\n  p 2 # c\n  value \"t+1\"\n}").unwrap();
        let kinds: Vec<Tok> = toks.iter().map(|t| t.0.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("tower".into()),
                Tok::LBrace,
                Tok::Ident("p".into()),
                Tok::Uint(2),
                Tok::Ident("value".into()),
                Tok::Str("t+1".into()),
                Tok::RBrace,
                Tok::Eof
            ]
        );
        assert_eq!((toks[5].1.line, toks[5].1.col), (3, 10));
    }

    #[test]
    fn unterminated_string() {
        assert!(matches!(tokenize("\"abc"), Err(InputError::Syntax { line: 1, col: 1, .. })));
    }
}
