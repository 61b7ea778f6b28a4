use std::fmt;

use crate::diagnostic::{Diagnostic, Position};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase- or digit-initial identifier.
    Name(String),
    /// Uppercase-initial identifier.
    Var(String),
    /// `%name`.
    Grounded(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Slash,
    If,
    Arrow,
    ArrowStar,
    Eq,
    Implies,
    Not,
    And,
    Or,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Name(s) | Tok::Var(s) => write!(f, "`{s}`"),
            Tok::Grounded(s) => write!(f, "`%{s}`"),
            Tok::Eof => write!(f, "end of input"),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBrace => "{",
                    Tok::RBrace => "}",
                    Tok::Comma => ",",
                    Tok::Dot => ".",
                    Tok::Colon => ":",
                    Tok::Slash => "/",
                    Tok::If => ":-",
                    Tok::Arrow => "->",
                    Tok::ArrowStar => "->*",
                    Tok::Eq => "=",
                    Tok::Implies => "=>",
                    Tok::Not => "~",
                    Tok::And => "/\\",
                    Tok::Or => "\\/",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Position,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens. `#` starts a comment that runs to the end of
/// the line. Lexical errors are collected and the offending character is
/// skipped.
pub(crate) fn lex(text: &str, first_line: usize) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0usize, first_line, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let rest = &chars[i..];
        let starts = |s: &str| s.chars().enumerate().all(|(k, ch)| rest.get(k) == Some(&ch));
        let fixed = [
            ("->*", Tok::ArrowStar),
            ("->", Tok::Arrow),
            (":-", Tok::If),
            ("=>", Tok::Implies),
            ("/\\", Tok::And),
            ("\\/", Tok::Or),
            ("=", Tok::Eq),
            ("~", Tok::Not),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            ("{", Tok::LBrace),
            ("}", Tok::RBrace),
            (",", Tok::Comma),
            (".", Tok::Dot),
            (":", Tok::Colon),
            ("/", Tok::Slash),
        ];
        if let Some((s, tok)) = fixed.iter().find(|(s, _)| starts(s)) {
            let n = s.chars().count();
            tokens.push(Token { tok: tok.clone(), pos });
            i += n;
            col += n;
            continue;
        }
        if c == '%' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let name: String = chars[start..j].iter().collect();
            if name.is_empty() || name.starts_with('_') {
                errors.push(Diagnostic::at(pos, "`%` must be followed by a variable name"));
            } else {
                tokens.push(Token { tok: Tok::Grounded(name), pos });
            }
            col += j - i;
            i = j;
            continue;
        }
        if is_ident_char(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if c == '_' {
                errors.push(Diagnostic::at(pos, format!("identifier `{word}` may not start with `_`")));
            } else if c.is_ascii_uppercase() {
                tokens.push(Token { tok: Tok::Var(word), pos });
            } else {
                tokens.push(Token { tok: Tok::Name(word), pos });
            }
            col += j - i;
            i = j;
            continue;
        }
        errors.push(Diagnostic::at(pos, format!("unexpected character `{c}`")));
        i += 1;
        col += 1;
    }
    tokens.push(Token { tok: Tok::Eof, pos: Position { line, column: col } });
    (tokens, errors)
}
