//! Thornlist text: one `arrangement/thorn` per line, `#` comments.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lexer::{Cursor, TokenKind};
use super::ParseError;
use crate::ident::Identifier;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ThornlistEntry {
    pub arrangement: Identifier,
    pub thorn: Identifier,
}

pub fn parse_thornlist(text: &str, origin: &Path) -> Result<Vec<ThornlistEntry>, ParseError> {
    let mut cur = Cursor::new(text, origin)?;
    let mut out = Vec::new();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            return Ok(out);
        }
        let tok = cur.peek().clone();
        let word = match cur.peek_kind() {
            TokenKind::Word(w) => w.clone(),
            _ => return Err(cur.error("arrangement/thorn")),
        };
        let entry = word.split_once('/').and_then(|(a, t)| {
            Some(ThornlistEntry { arrangement: Identifier::new(a).ok()?, thorn: Identifier::new(t).ok()? })
        });
        let Some(entry) = entry else {
            return Err(cur.error_at(&tok, "arrangement/thorn"));
        };
        cur.advance();
        cur.expect_line_end()?;
        out.push(entry);
    }
}

/// Sorted by thorn name, case-insensitively.
pub fn write_thornlist(entries: &[ThornlistEntry]) -> String {
    let mut sorted: Vec<&ThornlistEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| a.thorn.cmp(&b.thorn).then_with(|| a.arrangement.cmp(&b.arrangement)));
    let mut out = String::new();
    for e in sorted {
        out.push_str(&format!("{}/{}\n", e.arrangement, e.thorn));
    }
    out
}
