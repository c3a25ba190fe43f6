//! Tokenizer shared by the theory reader and the program reader.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// Lowercase-initial identifier.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Int(i64),
    /// Decimal literal with a fractional part, kept as text.
    Decimal(String),
    Dot,
    DotDot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Bar,
    Colon,
    Neck,
    Minus,
    Plus,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Hash,
    /// `%` comment, text after the marker with surrounding whitespace trimmed.
    Comment(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Decimal(s) => write!(f, "`{s}`"),
            Tok::Int(i) => write!(f, "`{i}`"),
            Tok::Comment(_) => write!(f, "comment"),
            other => {
                let text = match other {
                    Tok::Dot => ".",
                    Tok::DotDot => "..",
                    Tok::Comma => ",",
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Bar => "|",
                    Tok::Colon => ":",
                    Tok::Neck => ":-",
                    Tok::Minus => "-",
                    Tok::Plus => "+",
                    Tok::Lt => "<",
                    Tok::Le => "<=",
                    Tok::Gt => ">",
                    Tok::Ge => ">=",
                    Tok::Eq => "=",
                    Tok::Ne => "!=",
                    Tok::Hash => "#",
                    _ => unreachable!(),
                };
                write!(f, "`{text}`")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '%' {
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && chars[end] != '\n' {
                end += 1;
            }
            let text: String = chars[start..end].iter().collect();
            tokens.push(Token { tok: Tok::Comment(text.trim().to_string()), pos });
            advance!(end - i);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i;
            while end < chars.len() && (chars[end].is_ascii_alphanumeric() || chars[end] == '_') {
                end += 1;
            }
            let word: String = chars[i..end].iter().collect();
            let tok = if c.is_ascii_lowercase() { Tok::Ident(word) } else { Tok::Var(word) };
            tokens.push(Token { tok, pos });
            advance!(end - i);
            continue;
        }
        if c.is_ascii_digit() {
            let mut end = i;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            let is_decimal = end + 1 < chars.len() && chars[end] == '.' && chars[end + 1].is_ascii_digit();
            if is_decimal {
                end += 1;
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                let text: String = chars[i..end].iter().collect();
                tokens.push(Token { tok: Tok::Decimal(text), pos });
            } else {
                let text: String = chars[i..end].iter().collect();
                let value = text.parse::<i64>().map_err(|_| LexError {
                    pos,
                    message: format!("integer `{text}` out of range"),
                })?;
                tokens.push(Token { tok: Tok::Int(value), pos });
            }
            advance!(end - i);
            continue;
        }
        let (tok, width) = match (c, next) {
            ('.', Some('.')) => (Tok::DotDot, 2),
            ('.', _) => (Tok::Dot, 1),
            (',', _) => (Tok::Comma, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('|', _) => (Tok::Bar, 1),
            (':', Some('-')) => (Tok::Neck, 2),
            (':', _) => (Tok::Colon, 1),
            ('-', _) => (Tok::Minus, 1),
            ('+', _) => (Tok::Plus, 1),
            ('<', Some('=')) => (Tok::Le, 2),
            ('<', _) => (Tok::Lt, 1),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('>', _) => (Tok::Gt, 1),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('=', _) => (Tok::Eq, 1),
            ('#', _) => (Tok::Hash, 1),
            _ => {
                return Err(LexError { pos, message: format!("unexpected character `{c}`") });
            }
        };
        tokens.push(Token { tok, pos });
        advance!(width);
    }
    Ok(tokens)
}

/// Cursor over a token vector with one-token lookahead.
pub struct Cursor {
    tokens: Vec<Token>,
    index: usize,
    end: Pos,
}

impl Cursor {
    pub fn new(tokens: Vec<Token>, end: Pos) -> Self {
        Cursor { tokens, index: 0, end }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.index).map(|t| &t.tok)
    }

    pub fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.index + offset).map(|t| &t.tok)
    }

    pub fn pos(&self) -> Pos {
        self.tokens.get(self.index).map(|t| t.pos).unwrap_or(self.end)
    }

    pub fn next(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.index).cloned();
        if token.is_some() {
            self.index += 1;
        }
        token
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.index += 1;
            true
        } else {
            false
        }
    }

    pub fn at_end(&self) -> bool {
        self.index >= self.tokens.len()
    }

    pub fn describe_next(&self) -> String {
        match self.peek() {
            Some(tok) => tok.to_string(),
            None => "end of input".to_string(),
        }
    }
}

/// Position just past the last character of `source`.
pub fn end_pos(source: &str) -> Pos {
    let mut pos = Pos { line: 1, col: 1 };
    for c in source.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
    }
    pos
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn decimals_ranges_and_terminators() {
        assert_eq!(
            toks("1..3. 1.0. horizon 2."),
            vec![
                Tok::Int(1),
                Tok::DotDot,
                Tok::Int(3),
                Tok::Dot,
                Tok::Decimal("1.0".into()),
                Tok::Dot,
                Tok::Ident("horizon".into()),
                Tok::Int(2),
                Tok::Dot,
            ]
        );
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            toks("a :- not b, X != Y. % [29] note"),
            vec![
                Tok::Ident("a".into()),
                Tok::Neck,
                Tok::Ident("not".into()),
                Tok::Ident("b".into()),
                Tok::Comma,
                Tok::Var("X".into()),
                Tok::Ne,
                Tok::Var("Y".into()),
                Tok::Dot,
                Tok::Comment("[29] note".into()),
            ]
        );
    }

    #[test]
    fn positions_track_lines() {
        let tokens = tokenize("a.\n  b.").unwrap();
        assert_eq!(tokens[2].pos, Pos { line: 2, col: 3 });
        let err = tokenize("a ? b").unwrap_err();
        assert_eq!(err.pos, Pos { line: 1, col: 3 });
    }
}
