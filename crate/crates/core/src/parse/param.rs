//! `param.ccl`: parameter declarations, scope switches and `SHARES:` sections.

use std::path::Path;

use super::interface::data_type;
use super::lexer::{Cursor, TokenKind};
use super::ParseError;
use crate::ident::Identifier;
use crate::model::*;

enum Section {
    Scope(ParamScope),
    Shares(Identifier),
}

pub fn parse_param(text: &str, origin: &Path) -> Result<Vec<Parameter>, ParseError> {
    let mut cur = Cursor::new(text, origin)?;
    let mut out = Vec::new();
    let mut section = Section::Scope(ParamScope::Private);

    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        if cur.eat_keyword("RESTRICTED") {
            cur.expect(&TokenKind::Colon)?;
            section = Section::Scope(ParamScope::Restricted);
        } else if cur.eat_keyword("PRIVATE") {
            cur.expect(&TokenKind::Colon)?;
            section = Section::Scope(ParamScope::Private);
        } else if cur.eat_keyword("SHARES") {
            cur.expect(&TokenKind::Colon)?;
            section = Section::Shares(cur.expect_ident("implementation name")?);
            cur.expect_line_end()?;
        } else if cur.at_keyword("USES") || cur.at_keyword("EXTENDS") {
            let extends = cur.at_keyword("EXTENDS");
            let Section::Shares(imp) = &section else {
                return Err(cur.error("SHARES: section before USES or EXTENDS"));
            };
            let origin = if extends { ParamOrigin::Extends(imp.clone()) } else { ParamOrigin::Uses(imp.clone()) };
            cur.advance();
            out.push(declaration(&mut cur, origin, ParamScope::Restricted)?);
        } else {
            let Section::Scope(scope) = section else {
                return Err(cur.error("USES, EXTENDS, RESTRICTED: or PRIVATE:"));
            };
            out.push(declaration(&mut cur, ParamOrigin::Own, scope)?);
        }
    }
    Ok(out)
}

fn declaration(cur: &mut Cursor<'_>, origin: ParamOrigin, scope: ParamScope) -> Result<Parameter, ParseError> {
    let data_type = data_type(cur, "parameter type")?;
    let name = cur.expect_ident("parameter name")?;
    let description = cur.eat_string().unwrap_or_default();
    let mut steerable = false;
    if cur.eat_keyword("STEERABLE") {
        steerable = true;
        if cur.eat(&TokenKind::Equals) {
            if cur.eat_keyword("ALWAYS") || cur.eat_keyword("RECOVER") {
                steerable = true;
            } else if cur.eat_keyword("NEVER") {
                steerable = false;
            } else {
                return Err(cur.error("ALWAYS, RECOVER or NEVER"));
            }
        }
    }

    let mut param = Parameter {
        name,
        data_type,
        scope,
        ranges: Vec::new(),
        default: String::new(),
        steerable,
        origin,
        description,
    };

    let mark = cur.mark();
    cur.skip_newlines();
    let has_block = matches!(cur.peek_kind(), TokenKind::LBrace);
    match &param.origin {
        ParamOrigin::Uses(_) => {
            if has_block {
                return Err(cur.error("end of USES entry (USES may not add ranges)"));
            }
            cur.reset(mark);
        }
        ParamOrigin::Extends(_) => {
            if !has_block {
                return Err(cur.error("`{` opening the added ranges"));
            }
            param.ranges = range_block(cur)?;
        }
        ParamOrigin::Own => {
            if !has_block {
                return Err(cur.error("`{` opening the allowed ranges"));
            }
            param.ranges = range_block(cur)?;
            param.default = match cur.peek_kind().clone() {
                TokenKind::Str(s) | TokenKind::Word(s) => {
                    cur.advance();
                    s
                }
                _ => return Err(cur.error("default value")),
            };
        }
    }
    cur.expect_line_end()?;
    Ok(param)
}

fn range_block(cur: &mut Cursor<'_>) -> Result<Vec<ParameterRange>, ParseError> {
    cur.expect(&TokenKind::LBrace)?;
    let mut ranges = Vec::new();
    loop {
        cur.skip_newlines();
        if cur.eat(&TokenKind::RBrace) {
            return Ok(ranges);
        }
        let spec = match cur.peek_kind().clone() {
            TokenKind::Str(s) => {
                cur.advance();
                s
            }
            _ => {
                let mut spec = String::new();
                loop {
                    match cur.peek_kind().clone() {
                        TokenKind::Word(w) => spec.push_str(&w),
                        TokenKind::Colon => spec.push(':'),
                        _ => break,
                    }
                    cur.advance();
                }
                if spec.is_empty() {
                    return Err(cur.error("range"));
                }
                spec
            }
        };
        cur.expect(&TokenKind::DoubleColon)?;
        let description = cur.eat_string().unwrap_or_default();
        ranges.push(ParameterRange { spec, description });
        if !matches!(cur.peek_kind(), TokenKind::RBrace) {
            cur.expect(&TokenKind::Newline)?;
        }
    }
}
