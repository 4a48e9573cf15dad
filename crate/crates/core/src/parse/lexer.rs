//! Tokenizer shared by every CCL dialect and the parameter file.
//!
//! Newlines are significant in a few places (list terminators), so they are
//! kept as tokens. `#` starts a comment running to end of line and a
//! trailing `\` joins the next line onto the current one.

use std::fmt;
use std::path::Path;

use super::{ParseError, SourceLocation};
use crate::ident::{is_identifier, Identifier};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Word(String),
    Str(String),
    Colon,
    DoubleColon,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Equals,
    Newline,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Word(w) => write!(f, "`{w}`"),
            TokenKind::Str(s) => write!(f, "string {s:?}"),
            TokenKind::Colon => f.write_str("`:`"),
            TokenKind::DoubleColon => f.write_str("`::`"),
            TokenKind::Comma => f.write_str("`,`"),
            TokenKind::LBrace => f.write_str("`{`"),
            TokenKind::RBrace => f.write_str("`}`"),
            TokenKind::LParen => f.write_str("`(`"),
            TokenKind::RParen => f.write_str("`)`"),
            TokenKind::Equals => f.write_str("`=`"),
            TokenKind::Newline => f.write_str("end of line"),
            TokenKind::Eof => f.write_str("end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '{' | '}' | '(' | ')' | ',' | '=' | ':' | '"' | '#' | '\\')
}

pub(crate) fn tokenize(text: &str, origin: &Path) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    let err = |line: u32, column: u32, expected: &str, found: String| ParseError {
        location: SourceLocation { file: origin.to_path_buf(), line, column },
        expected: expected.to_string(),
        found,
    };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let push = |tokens: &mut Vec<Token>, kind| tokens.push(Token { kind, line: start_line, column: start_col });
        match c {
            '\n' => {
                push(&mut tokens, TokenKind::Newline);
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
            }
            '\\' => {
                let mut j = i + 1;
                while j < chars.len() && matches!(chars[j], ' ' | '\t' | '\r') {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '\n' {
                    i = j + 1;
                    line += 1;
                    col = 1;
                } else if j == chars.len() {
                    i = j;
                } else {
                    return Err(err(line, col, "line continuation at end of line", "`\\`".into()));
                }
            }
            '"' => {
                let mut value = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(err(start_line, start_col, "closing `\"`", "unterminated string".into()));
                        }
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            let escaped = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                other => {
                                    let found =
                                        other.map(|c| format!("`\\{c}`")).unwrap_or_else(|| "end of file".into());
                                    return Err(err(line, col, "escape sequence", found));
                                }
                            };
                            value.push(escaped);
                            i += 2;
                            col += 2;
                        }
                        Some(&c) => {
                            value.push(c);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                push(&mut tokens, TokenKind::Str(value));
            }
            ':' => {
                if chars.get(i + 1) == Some(&':') {
                    push(&mut tokens, TokenKind::DoubleColon);
                    i += 2;
                    col += 2;
                } else {
                    push(&mut tokens, TokenKind::Colon);
                    i += 1;
                    col += 1;
                }
            }
            '{' | '}' | '(' | ')' | ',' | '=' => {
                let kind = match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ',' => TokenKind::Comma,
                    _ => TokenKind::Equals,
                };
                push(&mut tokens, kind);
                i += 1;
                col += 1;
            }
            _ => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                    col += 1;
                }
                let word: String = chars[start..i].iter().collect();
                push(&mut tokens, TokenKind::Word(word));
            }
        }
    }
    tokens.push(Token { kind: TokenKind::Eof, line, column: col });
    Ok(tokens)
}

/// Recursive-descent helper over a token vector with one-token lookahead.
pub(crate) struct Cursor<'a> {
    tokens: Vec<Token>,
    pos: usize,
    origin: &'a Path,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &str, origin: &'a Path) -> Result<Self, ParseError> {
        Ok(Cursor { tokens: tokenize(text, origin)?, pos: 0, origin })
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn peek_kind(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    pub fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    pub fn mark(&self) -> usize {
        self.pos
    }

    pub fn reset(&mut self, mark: usize) {
        self.pos = mark;
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek_kind(), TokenKind::Eof)
    }

    pub fn skip_newlines(&mut self) {
        while matches!(self.peek_kind(), TokenKind::Newline) {
            self.advance();
        }
    }

    pub fn error_at(&self, tok: &Token, expected: impl Into<String>) -> ParseError {
        ParseError {
            location: SourceLocation { file: self.origin.to_path_buf(), line: tok.line, column: tok.column },
            expected: expected.into(),
            found: tok.kind.to_string(),
        }
    }

    pub fn error(&self, expected: impl Into<String>) -> ParseError {
        self.error_at(self.peek(), expected)
    }

    /// True when the next token is the word `kw`, ignoring case.
    pub fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek_kind(), TokenKind::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(kw.to_string()))
        }
    }

    pub fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek_kind() == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, kind: &TokenKind) -> Result<(), ParseError> {
        if self.eat(kind) {
            Ok(())
        } else {
            Err(self.error(kind.to_string()))
        }
    }

    pub fn expect_word(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek_kind().clone() {
            TokenKind::Word(w) => {
                self.advance();
                Ok(w)
            }
            _ => Err(self.error(what.to_string())),
        }
    }

    pub fn expect_ident(&mut self, what: &str) -> Result<Identifier, ParseError> {
        match self.peek_kind() {
            TokenKind::Word(w) if is_identifier(w) => {
                let id = Identifier::new(w.clone()).expect("checked identifier");
                self.advance();
                Ok(id)
            }
            _ => Err(self.error(what.to_string())),
        }
    }

    pub fn eat_string(&mut self) -> Option<String> {
        match self.peek_kind().clone() {
            TokenKind::Str(s) => {
                self.advance();
                Some(s)
            }
            _ => None,
        }
    }

    /// Statement terminator: end of line or end of file.
    pub fn expect_line_end(&mut self) -> Result<(), ParseError> {
        match self.peek_kind() {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::Eof => Ok(()),
            _ => Err(self.error("end of line")),
        }
    }

    /// Identifiers separated by commas and/or blanks, up to end of line or a
    /// closing brace. At least one is required.
    pub fn ident_list(&mut self, what: &str) -> Result<Vec<Identifier>, ParseError> {
        let mut out = vec![self.expect_ident(what)?];
        loop {
            match self.peek_kind() {
                TokenKind::Comma => {
                    self.advance();
                    out.push(self.expect_ident(what)?);
                }
                TokenKind::Word(_) => out.push(self.expect_ident(what)?),
                _ => return Ok(out),
            }
        }
    }
}
