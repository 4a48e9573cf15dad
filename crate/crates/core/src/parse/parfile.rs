//! Runtime parameter files (`.par`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lexer::{Cursor, TokenKind};
use super::ParseError;
use crate::ident::Identifier;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    /// Implementation or thorn name before `::`.
    pub scope: Identifier,
    pub parameter: Identifier,
    pub value: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub active_thorns: Vec<Identifier>,
    pub assignments: Vec<Assignment>,
}

/// `ActiveThorns = "a b c"` lines accumulate; `scope::name = value` lines
/// are kept in file order.
pub fn parse_parameter_file(text: &str, origin: &Path) -> Result<RunConfig, ParseError> {
    let mut cur = Cursor::new(text, origin)?;
    let mut config = RunConfig::default();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            return Ok(config);
        }
        if cur.at_keyword("ActiveThorns") {
            cur.advance();
            cur.expect(&TokenKind::Equals)?;
            let tok = cur.peek().clone();
            let list = match cur.peek_kind().clone() {
                TokenKind::Str(s) | TokenKind::Word(s) => {
                    cur.advance();
                    s
                }
                _ => return Err(cur.error("quoted thorn list")),
            };
            for name in list.split_whitespace() {
                let id = Identifier::new(name).map_err(|_| cur.error_at(&tok, "thorn names"))?;
                config.active_thorns.push(id);
            }
        } else {
            let scope = cur.expect_ident("ActiveThorns or parameter assignment")?;
            cur.expect(&TokenKind::DoubleColon)?;
            let parameter = cur.expect_ident("parameter name")?;
            cur.expect(&TokenKind::Equals)?;
            let value = match cur.peek_kind().clone() {
                TokenKind::Str(s) | TokenKind::Word(s) => {
                    cur.advance();
                    s
                }
                _ => return Err(cur.error("parameter value")),
            };
            config.assignments.push(Assignment { scope, parameter, value });
        }
        cur.expect_line_end()?;
    }
}
