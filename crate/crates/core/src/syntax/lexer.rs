use std::iter::Peekable;
use std::str::Chars;

use super::token::{Keyword, Token, TokenKind};
use crate::error::{MqlError, Result};

struct Cursor<'a> {
    chars: Peekable<Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
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

    fn eat_while(&mut self, out: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek().filter(|&c| pred(c)) {
            out.push(c);
            self.bump();
        }
    }
}

/// Splits MQL text into tokens. `--` comments run to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let err = |ch| MqlError::Lex { line, column, ch };

        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '-' && cur.peek2() == Some('-') {
            while cur.peek().is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }

        let kind = if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            cur.eat_while(&mut word, |c| c.is_ascii_alphanumeric() || c == '_');
            match Keyword::lookup(&word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word),
            }
        } else if c.is_ascii_digit() || (c == '.' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) {
            TokenKind::Number(lex_number(&mut cur))
        } else if c == '"' || c == '\'' {
            cur.bump();
            let body = lex_quoted(&mut cur, c).ok_or_else(|| err(c))?;
            if c == '"' {
                TokenKind::QuotedIdent(body)
            } else {
                TokenKind::Str(body)
            }
        } else {
            cur.bump();
            match c {
                ',' => TokenKind::Comma,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                '*' => TokenKind::Star,
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '/' => TokenKind::Slash,
                ';' => TokenKind::Semicolon,
                '.' => TokenKind::Dot,
                '=' => TokenKind::Eq,
                '<' => match cur.peek() {
                    Some('=') => {
                        cur.bump();
                        TokenKind::Le
                    }
                    Some('>') => {
                        cur.bump();
                        TokenKind::Ne
                    }
                    _ => TokenKind::Lt,
                },
                '>' => {
                    if cur.peek() == Some('=') {
                        cur.bump();
                        TokenKind::Ge
                    } else {
                        TokenKind::Gt
                    }
                }
                '!' if cur.peek() == Some('=') => {
                    cur.bump();
                    TokenKind::Ne
                }
                other => return Err(err(other)),
            }
        };
        out.push(Token { kind, line, column });
    }
    Ok(out)
}

fn lex_number(cur: &mut Cursor<'_>) -> String {
    let mut s = String::new();
    cur.eat_while(&mut s, |c| c.is_ascii_digit());
    if cur.peek() == Some('.') && cur.peek2().is_some_and(|c| c.is_ascii_digit()) {
        s.push('.');
        cur.bump();
        cur.eat_while(&mut s, |c| c.is_ascii_digit());
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut look = cur.chars.clone();
        look.next();
        let mut sign = None;
        if let Some(c @ ('+' | '-')) = look.peek().copied() {
            sign = Some(c);
            look.next();
        }
        if look.peek().is_some_and(|c| c.is_ascii_digit()) {
            s.push('e');
            cur.bump();
            if let Some(sign) = sign {
                s.push(sign);
                cur.bump();
            }
            cur.eat_while(&mut s, |c| c.is_ascii_digit());
        }
    }
    s
}

/// Body of a quoted token; a doubled quote is an escaped quote. `None` if unterminated.
fn lex_quoted(cur: &mut Cursor<'_>, quote: char) -> Option<String> {
    let mut s = String::new();
    loop {
        let c = cur.bump()?;
        if c == quote {
            if cur.peek() == Some(quote) {
                cur.bump();
                s.push(quote);
            } else {
                return Some(s);
            }
        } else {
            s.push(c);
        }
    }
}
