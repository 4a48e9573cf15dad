//! `configuration.ccl`: provided and required capabilities plus
//! `REQUIRES THORNS:` direct thorn dependencies.

use std::path::Path;

use super::lexer::{Cursor, TokenKind};
use super::ParseError;
use crate::model::*;

pub fn parse_configuration(text: &str, origin: &Path) -> Result<ConfigurationDecl, ParseError> {
    let mut cur = Cursor::new(text, origin)?;
    let mut decl = ConfigurationDecl::default();
    loop {
        cur.skip_newlines();
        if cur.at_eof() {
            return Ok(decl);
        }
        if cur.eat_keyword("PROVIDES") {
            let name = cur.expect_ident("capability name")?;
            cur.skip_newlines();
            cur.expect(&TokenKind::LBrace)?;
            let mut script = None;
            let mut language = None;
            loop {
                cur.skip_newlines();
                let tok = cur.peek().clone();
                if cur.eat(&TokenKind::RBrace) {
                    if script.is_none() {
                        return Err(cur.error_at(&tok, "SCRIPT"));
                    }
                    if language.is_none() {
                        return Err(cur.error_at(&tok, "LANG"));
                    }
                    break;
                }
                if cur.eat_keyword("SCRIPT") {
                    if script.replace(cur.expect_word("script path")?).is_some() {
                        return Err(cur.error_at(&tok, "a single SCRIPT line"));
                    }
                } else if cur.eat_keyword("LANG") {
                    if language.replace(cur.expect_word("language")?).is_some() {
                        return Err(cur.error_at(&tok, "a single LANG line"));
                    }
                } else {
                    return Err(cur.error("SCRIPT, LANG or `}`"));
                }
                if !matches!(cur.peek_kind(), TokenKind::RBrace) {
                    cur.expect_line_end()?;
                }
            }
            cur.expect_line_end()?;
            decl.capabilities.push(Capability {
                name,
                relation: CapabilityRelation::Provides {
                    script: script.expect("checked"),
                    language: language.expect("checked"),
                },
            });
        } else if cur.eat_keyword("REQUIRES") {
            let mark = cur.mark();
            if cur.eat_keyword("THORNS") && cur.eat(&TokenKind::Colon) {
                decl.requires_thorns.extend(cur.ident_list("thorn name")?);
            } else {
                cur.reset(mark);
                let name = cur.expect_ident("capability name")?;
                decl.capabilities.push(Capability { name, relation: CapabilityRelation::Requires });
            }
            cur.expect_line_end()?;
        } else {
            return Err(cur.error("PROVIDES or REQUIRES"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ident::id;

    fn parse(text: &str) -> Result<ConfigurationDecl, ParseError> {
        parse_configuration(text, Path::new("configuration.ccl"))
    }

    #[test]
    fn provides_block() {
        let d = parse("PROVIDES Mesh\n{\n SCRIPT configure.sh\n LANG bash\n}\n").unwrap();
        assert_eq!(
            d.capabilities,
            vec![Capability {
                name: id("Mesh"),
                relation: CapabilityRelation::Provides { script: "configure.sh".into(), language: "bash".into() }
            }]
        );
        assert!(d.requires_thorns.is_empty());
    }

    #[test]
    fn requires_capability() {
        let d = parse("REQUIRES LAPACK\n").unwrap();
        assert_eq!(d.capabilities, vec![Capability { name: id("LAPACK"), relation: CapabilityRelation::Requires }]);
    }

    #[test]
    fn requires_thorns() {
        let d = parse("REQUIRES THORNS: carpet, carpetlib\n").unwrap();
        assert!(d.capabilities.is_empty());
        assert_eq!(d.requires_thorns, vec![id("carpet"), id("carpetlib")]);
    }

    #[test]
    fn provides_missing_lang() {
        let e = parse("PROVIDES Mesh\n{\n SCRIPT configure.sh\n}\n").unwrap_err();
        assert_eq!(e.expected, "LANG");
        assert_eq!(e.location.line, 4);
    }

    #[test]
    fn empty_configuration() {
        assert_eq!(parse("").unwrap(), ConfigurationDecl::default());
    }
}
