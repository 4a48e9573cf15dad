//! `schedule.ccl`: `SCHEDULE [GROUP] name AT|IN target ... { ... } "desc"`.

use std::path::Path;

use super::lexer::{Cursor, TokenKind};
use super::ParseError;
use crate::ident::Identifier;
use crate::model::*;

pub fn parse_schedule(text: &str, origin: &Path) -> Result<Vec<ScheduleItem>, ParseError> {
    let mut cur = Cursor::new(text, origin)?;
    let mut items = Vec::new();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            return Ok(items);
        }
        cur.expect_keyword("SCHEDULE")?;
        items.push(item(&mut cur)?);
    }
}

fn item(cur: &mut Cursor<'_>) -> Result<ScheduleItem, ParseError> {
    cur.skip_newlines();
    let is_group = cur.eat_keyword("GROUP");
    cur.skip_newlines();
    let name = cur.expect_ident("routine or group name")?;

    let mut anchor = None;
    let mut while_vars = Vec::new();
    let mut if_vars = Vec::new();
    let mut before = Vec::new();
    let mut after = Vec::new();

    loop {
        cur.skip_newlines();
        let tok = cur.peek().clone();
        if cur.at_keyword("AT") || cur.at_keyword("IN") {
            let at = cur.at_keyword("AT");
            if anchor.is_some() {
                return Err(cur.error("a single AT or IN clause"));
            }
            cur.advance();
            let target = cur.expect_ident(if at { "schedule bin" } else { "schedule group" })?;
            anchor = Some(if at {
                ScheduleAnchor::AtBin { bin: target }
            } else {
                ScheduleAnchor::InGroup { group: target }
            });
        } else if cur.eat_keyword("WHILE") {
            while_vars.push(cur.expect_ident("variable name")?);
        } else if cur.eat_keyword("IF") {
            if_vars.push(cur.expect_ident("variable name")?);
        } else if cur.at_keyword("BEFORE") || cur.at_keyword("AFTER") {
            let is_before = cur.at_keyword("BEFORE");
            cur.advance();
            let names = ordering_targets(cur)?;
            if let Some(own) = names.iter().find(|n| **n == name) {
                return Err(cur.error_at(&tok, format!("an item other than `{own}` itself")));
            }
            if is_before {
                before.extend(names);
            } else {
                after.extend(names);
            }
        } else if matches!(cur.peek_kind(), TokenKind::LBrace) {
            break;
        } else {
            let expected = if anchor.is_none() { "AT or IN" } else { "WHILE, IF, BEFORE, AFTER or `{`" };
            return Err(cur.error(expected));
        }
    }
    let Some(anchor) = anchor else {
        return Err(cur.error("AT or IN"));
    };
    cur.expect(&TokenKind::LBrace)?;

    let mut storage = Vec::new();
    let mut sync = Vec::new();
    let mut language = None;
    loop {
        cur.skip_newlines();
        if cur.eat(&TokenKind::RBrace) {
            break;
        }
        if cur.eat_keyword("STORAGE") {
            cur.expect(&TokenKind::Colon)?;
            storage.extend(cur.ident_list("group name")?);
        } else if cur.eat_keyword("SYNC") {
            cur.expect(&TokenKind::Colon)?;
            sync.extend(cur.ident_list("group name")?);
        } else if cur.eat_keyword("LANG") {
            cur.expect(&TokenKind::Colon)?;
            language = Some(cur.expect_word("language")?);
        } else {
            return Err(cur.error("STORAGE:, SYNC:, LANG: or `}`"));
        }
        if !matches!(cur.peek_kind(), TokenKind::RBrace) {
            cur.expect_line_end()?;
        }
    }

    let mark = cur.mark();
    cur.skip_newlines();
    let description = match cur.eat_string() {
        Some(s) => s,
        None => {
            cur.reset(mark);
            String::new()
        }
    };
    cur.expect_line_end()?;

    Ok(ScheduleItem {
        name,
        is_group,
        anchor,
        while_vars,
        if_vars,
        before,
        after,
        storage,
        sync,
        language,
        description,
    })
}

/// `name` or `(name name ...)`.
fn ordering_targets(cur: &mut Cursor<'_>) -> Result<Vec<Identifier>, ParseError> {
    if cur.eat(&TokenKind::LParen) {
        let mut names = Vec::new();
        loop {
            cur.skip_newlines();
            if cur.eat(&TokenKind::RParen) {
                break;
            }
            if cur.eat(&TokenKind::Comma) {
                continue;
            }
            names.push(cur.expect_ident("item name or `)`")?);
        }
        if names.is_empty() {
            return Err(cur.error("at least one item name"));
        }
        Ok(names)
    } else {
        Ok(vec![cur.expect_ident("item name")?])
    }
}
