//! Canonical text for parsed CCL. Parsing the output yields a structure
//! equal to the one written.

use std::fmt::Write as _;

use super::parfile::RunConfig;
use crate::model::*;

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn is_bare_word(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '{' | '}' | '(' | ')' | ',' | '=' | ':' | '"' | '#' | '\\'))
}

fn word_or_quoted(s: &str) -> String {
    if is_bare_word(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(sep)
}

pub fn write_interface(decl: &InterfaceDecl) -> String {
    let mut out = String::new();
    if let Some(imp) = &decl.implements {
        writeln!(out, "IMPLEMENTS: {imp}").unwrap();
    }
    if !decl.inherits.is_empty() {
        writeln!(out, "INHERITS: {}", join(&decl.inherits, ", ")).unwrap();
    }
    for inc in &decl.includes {
        match inc {
            IncludeDecl::Uses { file } => writeln!(out, "USES INCLUDE: {file}").unwrap(),
            IncludeDecl::ProvidesInto { fragment, target } => {
                writeln!(out, "INCLUDES: {fragment} IN {target}").unwrap()
            }
        }
    }
    for f in &decl.functions {
        match &f.relation {
            FunctionRelation::Declares(sig) => {
                let ret = sig.return_type.map(|t| t.to_string()).unwrap_or_else(|| "VOID".into());
                let args: Vec<String> = sig
                    .args
                    .iter()
                    .map(|a| {
                        let array = if a.is_array { " ARRAY" } else { "" };
                        format!("{}{array} {} {}", a.data_type, a.intent.keyword(), a.name)
                    })
                    .collect();
                writeln!(out, "{ret} FUNCTION {}({})", f.name, args.join(", ")).unwrap();
            }
            FunctionRelation::Provides { routine, language } => {
                writeln!(out, "PROVIDES FUNCTION {} WITH {routine} LANGUAGE {language}", f.name).unwrap()
            }
            FunctionRelation::Requires => writeln!(out, "REQUIRES FUNCTION {}", f.name).unwrap(),
            FunctionRelation::Uses => writeln!(out, "USES FUNCTION {}", f.name).unwrap(),
        }
    }
    let mut access = Access::Private;
    for g in &decl.groups {
        if g.access != access {
            access = g.access;
            out.push_str(match access {
                Access::Public => "\nPUBLIC:\n",
                Access::Private => "\nPRIVATE:\n",
            });
        }
        write!(out, "{} {} TYPE={}", g.data_type, g.name, g.group_type.keyword()).unwrap();
        if let Some(size) = &g.size {
            write!(out, " SIZE={}", size.join(",")).unwrap();
        }
        writeln!(out, " TIMELEVELS={}", g.timelevels).unwrap();
        writeln!(out, "{{\n  {}\n}} {}", join(&g.variables, ", "), quote(&g.description)).unwrap();
    }
    out
}

fn write_ranges(out: &mut String, param: &Parameter) {
    out.push_str("{\n");
    let quoted_type = matches!(param.data_type.base, BaseType::Keyword | BaseType::String);
    for r in &param.ranges {
        let bare_ok =
            !quoted_type && !r.spec.contains("::") && r.spec.chars().all(|c| c == ':' || is_bare_word(&c.to_string()));
        let spec = if bare_ok && !r.spec.is_empty() { r.spec.clone() } else { quote(&r.spec) };
        writeln!(out, "  {spec} :: {}", quote(&r.description)).unwrap();
    }
    out.push('}');
}

pub fn write_param(params: &[Parameter]) -> String {
    enum Section<'a> {
        Scope(ParamScope),
        Shares(&'a crate::ident::Identifier),
    }
    let mut out = String::new();
    let mut section = Section::Scope(ParamScope::Private);
    for p in params {
        match &p.origin {
            ParamOrigin::Own => {
                if !matches!(section, Section::Scope(s) if s == p.scope) {
                    section = Section::Scope(p.scope);
                    out.push_str(match p.scope {
                        ParamScope::Restricted => "RESTRICTED:\n",
                        ParamScope::Private => "PRIVATE:\n",
                    });
                }
            }
            ParamOrigin::Uses(imp) | ParamOrigin::Extends(imp) => {
                if !matches!(section, Section::Shares(s) if s == imp) {
                    section = Section::Shares(imp);
                    writeln!(out, "SHARES: {imp}").unwrap();
                }
            }
        }
        let prefix = match p.origin {
            ParamOrigin::Own => "",
            ParamOrigin::Uses(_) => "USES ",
            ParamOrigin::Extends(_) => "EXTENDS ",
        };
        write!(out, "{prefix}{} {}", p.data_type, p.name).unwrap();
        if p.origin == ParamOrigin::Own || !p.description.is_empty() {
            write!(out, " {}", quote(&p.description)).unwrap();
        }
        if p.steerable {
            out.push_str(" STEERABLE=ALWAYS");
        }
        match p.origin {
            ParamOrigin::Own => {
                out.push('\n');
                write_ranges(&mut out, p);
                writeln!(out, " {}", word_or_quoted(&p.default)).unwrap();
            }
            ParamOrigin::Extends(_) => {
                out.push('\n');
                write_ranges(&mut out, p);
                out.push('\n');
            }
            ParamOrigin::Uses(_) => out.push('\n'),
        }
    }
    out
}

pub fn write_schedule(items: &[ScheduleItem]) -> String {
    let mut out = String::new();
    for it in items {
        out.push_str("SCHEDULE ");
        if it.is_group {
            out.push_str("GROUP ");
        }
        write!(out, "{}", it.name).unwrap();
        match &it.anchor {
            ScheduleAnchor::AtBin { bin } => write!(out, " AT {bin}").unwrap(),
            ScheduleAnchor::InGroup { group } => write!(out, " IN {group}").unwrap(),
        }
        for v in &it.while_vars {
            write!(out, " WHILE {v}").unwrap();
        }
        for v in &it.if_vars {
            write!(out, " IF {v}").unwrap();
        }
        if !it.before.is_empty() {
            write!(out, " BEFORE ({})", join(&it.before, " ")).unwrap();
        }
        if !it.after.is_empty() {
            write!(out, " AFTER ({})", join(&it.after, " ")).unwrap();
        }
        out.push_str("\n{\n");
        if let Some(lang) = &it.language {
            writeln!(out, "  LANG: {lang}").unwrap();
        }
        if !it.storage.is_empty() {
            writeln!(out, "  STORAGE: {}", join(&it.storage, ", ")).unwrap();
        }
        if !it.sync.is_empty() {
            writeln!(out, "  SYNC: {}", join(&it.sync, ", ")).unwrap();
        }
        writeln!(out, "}} {}", quote(&it.description)).unwrap();
    }
    out
}

pub fn write_configuration(decl: &ConfigurationDecl) -> String {
    let mut out = String::new();
    for cap in &decl.capabilities {
        match &cap.relation {
            CapabilityRelation::Provides { script, language } => {
                writeln!(out, "PROVIDES {}\n{{\n  SCRIPT {script}\n  LANG {language}\n}}", cap.name).unwrap();
            }
            CapabilityRelation::Requires => writeln!(out, "REQUIRES {}", cap.name).unwrap(),
        }
    }
    if !decl.requires_thorns.is_empty() {
        writeln!(out, "REQUIRES THORNS: {}", join(&decl.requires_thorns, ", ")).unwrap();
    }
    out
}

pub fn write_parameter_file(config: &RunConfig) -> String {
    let mut out = String::new();
    if !config.active_thorns.is_empty() {
        writeln!(out, "ActiveThorns = {}", quote(&join(&config.active_thorns, " "))).unwrap();
    }
    for a in &config.assignments {
        writeln!(out, "{}::{} = {}", a.scope, a.parameter, quote(&a.value)).unwrap();
    }
    out
}
