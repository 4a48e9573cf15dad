//! `interface.ccl`: implementation, inheritance, variable groups, aliased
//! functions and include declarations.

use std::path::Path;

use super::lexer::{Cursor, TokenKind};
use super::ParseError;
use crate::model::*;

pub fn parse_interface(text: &str, origin: &Path) -> Result<InterfaceDecl, ParseError> {
    let mut cur = Cursor::new(text, origin)?;
    let mut decl = InterfaceDecl::default();
    // Groups are private until the first PUBLIC: switch.
    let mut access = Access::Private;

    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            break;
        }
        let start = cur.peek().clone();
        if cur.eat_keyword("IMPLEMENTS") {
            cur.expect(&TokenKind::Colon)?;
            let name = cur.expect_ident("implementation name")?;
            if decl.implements.is_some() {
                return Err(cur.error_at(&start, "a single IMPLEMENTS declaration"));
            }
            decl.implements = Some(name);
            cur.expect_line_end()?;
        } else if cur.eat_keyword("INHERITS") {
            cur.expect(&TokenKind::Colon)?;
            decl.inherits.extend(cur.ident_list("implementation name")?);
            cur.expect_line_end()?;
        } else if cur.eat_keyword("PUBLIC") {
            cur.expect(&TokenKind::Colon)?;
            access = Access::Public;
        } else if cur.eat_keyword("PRIVATE") {
            cur.expect(&TokenKind::Colon)?;
            access = Access::Private;
        } else if cur.eat_keyword("USES") {
            if cur.eat_keyword("INCLUDE") {
                include_kind(&mut cur);
                cur.expect(&TokenKind::Colon)?;
                let file = cur.expect_word("include file name")?;
                decl.includes.push(IncludeDecl::Uses { file });
            } else if cur.eat_keyword("FUNCTION") {
                let name = cur.expect_ident("function name")?;
                decl.functions.push(AliasedFunction { name, relation: FunctionRelation::Uses });
            } else {
                return Err(cur.error("INCLUDE or FUNCTION"));
            }
            cur.expect_line_end()?;
        } else if cur.eat_keyword("INCLUDE") || cur.eat_keyword("INCLUDES") {
            include_kind(&mut cur);
            cur.expect(&TokenKind::Colon)?;
            let fragment = cur.expect_word("include file name")?;
            cur.expect_keyword("IN")?;
            let target = cur.expect_word("include target file name")?;
            decl.includes.push(IncludeDecl::ProvidesInto { fragment, target });
            cur.expect_line_end()?;
        } else if cur.eat_keyword("PROVIDES") {
            cur.expect_keyword("FUNCTION")?;
            let name = cur.expect_ident("function name")?;
            cur.expect_keyword("WITH")?;
            let routine = cur.expect_ident("routine name")?;
            cur.expect_keyword("LANGUAGE")?;
            let language = cur.expect_word("language")?;
            decl.functions.push(AliasedFunction { name, relation: FunctionRelation::Provides { routine, language } });
            cur.expect_line_end()?;
        } else if cur.eat_keyword("REQUIRES") {
            cur.expect_keyword("FUNCTION")?;
            let name = cur.expect_ident("function name")?;
            decl.functions.push(AliasedFunction { name, relation: FunctionRelation::Requires });
            cur.expect_line_end()?;
        } else if cur.eat_keyword("VOID") {
            cur.expect_keyword("FUNCTION")?;
            decl.functions.push(function_declaration(&mut cur, None)?);
        } else {
            let data_type = data_type(&mut cur, "interface declaration")?;
            if cur.eat_keyword("FUNCTION") {
                decl.functions.push(function_declaration(&mut cur, Some(data_type))?);
            } else {
                decl.groups.push(variable_group(&mut cur, data_type, access)?);
            }
        }
    }

    if decl.implements.is_none() {
        return Err(cur.error("IMPLEMENTS"));
    }
    Ok(decl)
}

/// Optional `HEADER` / `SOURCE` qualifier after INCLUDE; it carries no meaning here.
fn include_kind(cur: &mut Cursor<'_>) {
    let _ = cur.eat_keyword("HEADER") || cur.eat_keyword("SOURCE");
}

pub(crate) fn data_type(cur: &mut Cursor<'_>, what: &str) -> Result<CctkDataType, ParseError> {
    match cur.peek_kind() {
        TokenKind::Word(w) => match CctkDataType::parse(w) {
            Some(t) => {
                cur.advance();
                Ok(t)
            }
            None => Err(cur.error(what.to_string())),
        },
        _ => Err(cur.error(what.to_string())),
    }
}

fn function_declaration(
    cur: &mut Cursor<'_>,
    return_type: Option<CctkDataType>,
) -> Result<AliasedFunction, ParseError> {
    let name = cur.expect_ident("function name")?;
    cur.expect(&TokenKind::LParen)?;
    let mut args = Vec::new();
    cur.skip_newlines();
    if !cur.eat(&TokenKind::RParen) {
        loop {
            cur.skip_newlines();
            let data_type = data_type(cur, "argument type")?;
            let is_array = cur.eat_keyword("ARRAY");
            let intent = if cur.eat_keyword("INOUT") {
                Intent::InOut
            } else if cur.eat_keyword("IN") {
                Intent::In
            } else if cur.eat_keyword("OUT") {
                Intent::Out
            } else {
                return Err(cur.error("IN, OUT or INOUT"));
            };
            let name = cur.expect_ident("argument name")?;
            args.push(FunctionArg { name, data_type, intent, is_array });
            cur.skip_newlines();
            if cur.eat(&TokenKind::RParen) {
                break;
            }
            cur.expect(&TokenKind::Comma)?;
        }
    }
    cur.expect_line_end()?;
    Ok(AliasedFunction { name, relation: FunctionRelation::Declares(FunctionSignature { return_type, args }) })
}

fn variable_group(cur: &mut Cursor<'_>, data_type: CctkDataType, access: Access) -> Result<VariableGroup, ParseError> {
    let name = cur.expect_ident("group name")?;
    let mut group_type = None;
    let mut size = None;
    let mut timelevels = None;

    // Attributes may continue on following lines.
    loop {
        let mark = cur.mark();
        cur.skip_newlines();
        let attr = cur.peek().clone();
        if cur.eat_keyword("TYPE") {
            cur.expect(&TokenKind::Equals)?;
            let t = if cur.eat_keyword("GF") {
                GroupType::Gf
            } else if cur.eat_keyword("ARRAY") {
                GroupType::Array
            } else if cur.eat_keyword("SCALAR") {
                GroupType::Scalar
            } else {
                return Err(cur.error("GF, ARRAY or SCALAR"));
            };
            if group_type.replace(t).is_some() {
                return Err(cur.error_at(&attr, "a single TYPE attribute"));
            }
        } else if cur.eat_keyword("SIZE") {
            cur.expect(&TokenKind::Equals)?;
            let mut extents = vec![cur.expect_word("extent expression")?];
            while cur.eat(&TokenKind::Comma) {
                extents.push(cur.expect_word("extent expression")?);
            }
            if size.replace(extents).is_some() {
                return Err(cur.error_at(&attr, "a single SIZE attribute"));
            }
        } else if cur.eat_keyword("TIMELEVELS") {
            cur.expect(&TokenKind::Equals)?;
            let tok = cur.peek().clone();
            let n: u32 =
                cur.expect_word("timelevel count")?.parse().map_err(|_| cur.error_at(&tok, "timelevel count"))?;
            if timelevels.replace(n).is_some() {
                return Err(cur.error_at(&attr, "a single TIMELEVELS attribute"));
            }
        } else {
            cur.reset(mark);
            break;
        }
    }

    let mut variables = Vec::new();
    let mut description = String::new();
    let mark = cur.mark();
    cur.skip_newlines();
    if cur.eat(&TokenKind::LBrace) {
        loop {
            cur.skip_newlines();
            if cur.eat(&TokenKind::RBrace) {
                break;
            }
            if cur.eat(&TokenKind::Comma) {
                continue;
            }
            variables.push(cur.expect_ident("variable name or `}`")?);
        }
        let mark = cur.mark();
        cur.skip_newlines();
        match cur.eat_string() {
            Some(s) => description = s,
            None => cur.reset(mark),
        }
    } else {
        cur.reset(mark);
    }
    cur.expect_line_end()?;

    if variables.is_empty() {
        variables.push(name.clone());
    }
    Ok(VariableGroup {
        name,
        data_type,
        group_type: group_type.unwrap_or(GroupType::Scalar),
        size,
        timelevels: timelevels.unwrap_or(1),
        access,
        variables,
        description,
    })
}
