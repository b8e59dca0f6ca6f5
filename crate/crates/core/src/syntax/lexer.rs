use crate::error::{Error, Pos, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

// Longest symbols first so that `==` wins over `=`.
const SYMBOLS: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "..", "->", "<", ">", "+", "-", "*", "/", "%", "!", "(", ")", "{", "}", ";",
    ",", ":", "=", "'",
];

/// Splits `src` into tokens. `//` and `#` start comments running to end of line.
pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos::new(line, col);
        if c == b'\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == b'#' || (c == b'/' && bytes.get(i + 1) == Some(&b'/')) {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let text = &src[start..i];
            let v = text.parse::<i64>().map_err(|_| Error::Syntax {
                pos,
                msg: format!("integer literal `{text}` is too large"),
            })?;
            col += (i - start) as u32;
            out.push((Tok::Int(v), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            col += (i - start) as u32;
            out.push((Tok::Ident(src[start..i].to_string()), pos));
            continue;
        }
        match SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len() as u32;
                out.push((Tok::Sym(s), pos));
            }
            None => {
                let ch = src[i..].chars().next().unwrap();
                return Err(Error::Syntax {
                    pos,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        }
    }
    out.push((Tok::Eof, Pos::new(line, col)));
    Ok(out)
}

/// Token cursor shared by the spec, program, and relation-literal parsers.
pub struct Cursor {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self> {
        Ok(Cursor {
            toks: tokenize(src)?,
            i: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].0
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    pub fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == kw)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn error<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    pub fn unexpected<T>(&self, wanted: &str) -> Result<T> {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<Pos> {
        if self.at_sym(s) {
            Ok(self.bump().1)
        } else {
            self.unexpected(&format!("`{s}`"))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<Pos> {
        if self.at_keyword(kw) {
            Ok(self.bump().1)
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok((s, p))
            }
            _ => self.unexpected("an identifier"),
        }
    }

    /// An optionally negated integer literal.
    pub fn expect_signed_int(&mut self) -> Result<i64> {
        let neg = self.eat_sym("-");
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => self.unexpected("an integer"),
        }
    }

    pub fn expect_eof(&self) -> Result<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("x' == x+y // sum\n  r<=10").unwrap();
        let kinds: Vec<_> = toks.iter().map(|(t, _)| t.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("x".into()),
                Tok::Sym("'"),
                Tok::Sym("=="),
                Tok::Ident("x".into()),
                Tok::Sym("+"),
                Tok::Ident("y".into()),
                Tok::Ident("r".into()),
                Tok::Sym("<="),
                Tok::Int(10),
                Tok::Eof,
            ]
        );
        assert_eq!(toks[6].1, Pos::new(2, 3));
        assert_eq!(toks.last().unwrap().1, Pos::new(2, 8));
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(matches!(tokenize("x @ y"), Err(Error::Syntax { pos, .. }) if pos == Pos::new(1, 3)));
    }
}
