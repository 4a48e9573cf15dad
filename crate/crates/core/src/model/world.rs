//! The validated universe of thorns and its provider indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::types::*;
use super::value::{check_range, validate_parameter_value};
use crate::ident::Identifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DiagCode {
    DuplicateThorn,
    DuplicateGroup,
    DuplicateVariable,
    DuplicateParameter,
    DuplicateCapability,
    InvalidDataType,
    InvalidGroupShape,
    InvalidTimelevels,
    InvalidRange,
    DefaultOutOfRange,
    InvalidSharedParameter,
    SelfInheritance,
    FunctionSignatureMismatch,
    UndeclaredFunction,
    InvalidIncludePath,
    MissingCapabilityScript,
    InterfaceMismatch,
    IgnoredOrdering,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagCode,
    /// Thorn the diagnostic is about, when there is one.
    pub location: Option<String>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: DiagCode, location: &Identifier, message: String) -> Self {
        Diagnostic { severity: Severity::Error, code, location: Some(location.to_string()), message }
    }

    pub fn warning(code: DiagCode, location: &Identifier, message: String) -> Self {
        Diagnostic { severity: Severity::Warning, code, location: Some(location.to_string()), message }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}[{:?}]", self.code)?;
        if let Some(loc) = &self.location {
            write!(f, " {loc}")?;
        }
        write!(f, ": {}", self.message)
    }
}

pub type ProviderIndex = BTreeMap<Identifier, BTreeSet<Identifier>>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct World {
    pub thorns: BTreeMap<Identifier, Thorn>,
    pub providers_of_impl: ProviderIndex,
    pub providers_of_capability: ProviderIndex,
    pub providers_of_function: ProviderIndex,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indices {
    pub providers_of_impl: ProviderIndex,
    pub providers_of_capability: ProviderIndex,
    pub providers_of_function: ProviderIndex,
}

/// Recomputes the provider indices from a thorn map.
pub fn index_thorns(thorns: &BTreeMap<Identifier, Thorn>) -> Indices {
    let mut impls = ProviderIndex::new();
    let mut caps = ProviderIndex::new();
    let mut funcs = ProviderIndex::new();
    for thorn in thorns.values() {
        impls.entry(thorn.implements.clone()).or_default().insert(thorn.name.clone());
        for cap in &thorn.capabilities {
            if let CapabilityRelation::Provides { .. } = cap.relation {
                caps.entry(cap.name.clone()).or_default().insert(thorn.name.clone());
            }
        }
        for func in &thorn.functions {
            if let FunctionRelation::Provides { .. } = func.relation {
                funcs.entry(func.name.clone()).or_default().insert(thorn.name.clone());
            }
        }
    }
    Indices { providers_of_impl: impls, providers_of_capability: caps, providers_of_function: funcs }
}

impl World {
    pub fn thorn(&self, name: &Identifier) -> Option<&Thorn> {
        self.thorns.get(name)
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn indices(&self) -> Indices {
        Indices {
            providers_of_impl: self.providers_of_impl.clone(),
            providers_of_capability: self.providers_of_capability.clone(),
            providers_of_function: self.providers_of_function.clone(),
        }
    }

    /// Thorns that provide `file` through an `INCLUDE ... IN file` declaration.
    pub fn providers_of_include(&self, file: &str) -> BTreeSet<Identifier> {
        self.thorns.values().filter(|t| t.provides_include(file)).map(|t| t.name.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("world serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Builds the World from per-thorn parse results. Never fails: every
/// semantic violation becomes a diagnostic and indices are filled on a
/// best-effort basis (the first thorn of a duplicated name wins).
pub fn build_world(parsed_thorns: Vec<Thorn>) -> World {
    let mut diagnostics = Vec::new();
    let mut thorns: BTreeMap<Identifier, Thorn> = BTreeMap::new();
    for thorn in parsed_thorns {
        if let Some(existing) = thorns.get(&thorn.name) {
            diagnostics.push(Diagnostic::error(
                DiagCode::DuplicateThorn,
                &thorn.name,
                format!(
                    "thorn `{}` in arrangement `{}` duplicates `{}` in arrangement `{}`",
                    thorn.name, thorn.arrangement, existing.name, existing.arrangement
                ),
            ));
            continue;
        }
        thorns.insert(thorn.name.clone(), thorn);
    }

    let indices = index_thorns(&thorns);
    for thorn in thorns.values() {
        check_thorn(thorn, &mut diagnostics);
    }
    check_shared_parameters(&thorns, &indices, &mut diagnostics);
    check_function_signatures(&thorns, &mut diagnostics);

    World {
        thorns,
        providers_of_impl: indices.providers_of_impl,
        providers_of_capability: indices.providers_of_capability,
        providers_of_function: indices.providers_of_function,
        diagnostics,
    }
}

fn duplicates<'a>(names: impl Iterator<Item = &'a Identifier>) -> Vec<&'a Identifier> {
    let mut seen = BTreeSet::new();
    let mut dups = Vec::new();
    for n in names {
        if !seen.insert(n) && !dups.contains(&n) {
            dups.push(n);
        }
    }
    dups
}

fn check_thorn(thorn: &Thorn, out: &mut Vec<Diagnostic>) {
    let t = &thorn.name;

    if thorn.inherits.contains(&thorn.implements) {
        out.push(Diagnostic::error(
            DiagCode::SelfInheritance,
            t,
            format!("inherits its own implementation `{}`", thorn.implements),
        ));
    }

    for dup in duplicates(thorn.groups.iter().map(|g| &g.name)) {
        out.push(Diagnostic::error(DiagCode::DuplicateGroup, t, format!("group `{dup}` declared twice")));
    }
    for group in &thorn.groups {
        check_group(t, group, out);
    }

    for dup in duplicates(thorn.parameters.iter().map(|p| &p.name)) {
        out.push(Diagnostic::error(DiagCode::DuplicateParameter, t, format!("parameter `{dup}` declared twice")));
    }
    for param in &thorn.parameters {
        check_parameter(thorn, param, out);
    }

    let provided_caps = thorn
        .capabilities
        .iter()
        .filter(|c| matches!(c.relation, CapabilityRelation::Provides { .. }))
        .map(|c| &c.name);
    for dup in duplicates(provided_caps) {
        out.push(Diagnostic::error(
            DiagCode::DuplicateCapability,
            t,
            format!("capability `{dup}` provided more than once"),
        ));
    }
    if let Some(dir) = &thorn.source_dir {
        for cap in &thorn.capabilities {
            if let CapabilityRelation::Provides { script, .. } = &cap.relation {
                if !dir.join(script).is_file() {
                    out.push(Diagnostic::warning(
                        DiagCode::MissingCapabilityScript,
                        t,
                        format!("script `{script}` for capability `{}` not found", cap.name),
                    ));
                }
            }
        }
    }

    for inc in &thorn.includes {
        let paths: Vec<&str> = match inc {
            IncludeDecl::Uses { file } => vec![file],
            IncludeDecl::ProvidesInto { fragment, target } => vec![fragment, target],
        };
        for p in paths {
            if !is_safe_relative(p) {
                out.push(Diagnostic::error(
                    DiagCode::InvalidIncludePath,
                    t,
                    format!("include path `{p}` must be relative without `..` segments"),
                ));
            }
        }
    }

    let declared: BTreeSet<&Identifier> = thorn
        .functions
        .iter()
        .filter(|f| matches!(f.relation, FunctionRelation::Declares(_)))
        .map(|f| &f.name)
        .collect();
    for f in &thorn.functions {
        if !matches!(f.relation, FunctionRelation::Declares(_)) && !declared.contains(&f.name) {
            out.push(Diagnostic::warning(
                DiagCode::UndeclaredFunction,
                t,
                format!("aliased function `{}` is used without a signature declaration", f.name),
            ));
        }
    }
}

fn is_safe_relative(p: &str) -> bool {
    let path = Path::new(p);
    !p.is_empty()
        && !path.is_absolute()
        && !p.starts_with('/')
        && path.components().all(|c| matches!(c, std::path::Component::Normal(_) | std::path::Component::CurDir))
}

fn check_group(t: &Identifier, group: &VariableGroup, out: &mut Vec<Diagnostic>) {
    let g = &group.name;
    if group.data_type.base.parameter_only() {
        out.push(Diagnostic::error(
            DiagCode::InvalidDataType,
            t,
            format!("group `{g}` uses parameter-only type {}", group.data_type),
        ));
    }
    if !group.data_type.size_is_valid() {
        out.push(Diagnostic::error(
            DiagCode::InvalidDataType,
            t,
            format!("group `{g}` has invalid type size in {}", group.data_type),
        ));
    }
    match (group.group_type, &group.size) {
        (GroupType::Scalar, Some(_)) => {
            out.push(Diagnostic::error(DiagCode::InvalidGroupShape, t, format!("scalar group `{g}` cannot have SIZE")))
        }
        (GroupType::Array, None) => {
            out.push(Diagnostic::error(DiagCode::InvalidGroupShape, t, format!("array group `{g}` requires SIZE")))
        }
        _ => {}
    }
    if group.timelevels == 0 {
        out.push(Diagnostic::error(
            DiagCode::InvalidTimelevels,
            t,
            format!("group `{g}` must have at least one timelevel"),
        ));
    }
    if group.variables.is_empty() {
        out.push(Diagnostic::error(DiagCode::InvalidGroupShape, t, format!("group `{g}` has no variables")));
    }
    for dup in duplicates(group.variables.iter()) {
        out.push(Diagnostic::error(
            DiagCode::DuplicateVariable,
            t,
            format!("variable `{dup}` appears twice in group `{g}`"),
        ));
    }
}

fn check_parameter(thorn: &Thorn, param: &Parameter, out: &mut Vec<Diagnostic>) {
    let t = &thorn.name;
    let p = &param.name;
    let base = param.data_type.base;
    if !matches!(base, BaseType::Int | BaseType::Real | BaseType::Keyword | BaseType::Boolean | BaseType::String)
        || !param.data_type.size_is_valid()
    {
        out.push(Diagnostic::error(
            DiagCode::InvalidDataType,
            t,
            format!("parameter `{p}` has type {} which parameters cannot use", param.data_type),
        ));
        return;
    }
    if let Some(imp) = param.origin.shared_from() {
        if imp == &thorn.implements {
            out.push(Diagnostic::error(
                DiagCode::InvalidSharedParameter,
                t,
                format!("parameter `{p}` is shared from the thorn's own implementation `{imp}`"),
            ));
        }
    }
    let mut ranges_ok = true;
    for range in &param.ranges {
        if let Err(e) = check_range(base, range) {
            ranges_ok = false;
            out.push(Diagnostic::error(DiagCode::InvalidRange, t, format!("parameter `{p}`: {e}")));
        }
    }
    if param.origin == ParamOrigin::Own && ranges_ok {
        if let Err(e) = validate_parameter_value(param, &param.default) {
            out.push(Diagnostic::error(
                DiagCode::DefaultOutOfRange,
                t,
                format!("default of parameter `{p}` is invalid: {e}"),
            ));
        }
    }
}

/// USES/EXTENDS entries must name a restricted parameter of matching type in
/// every provider of the shared implementation that is present.
fn check_shared_parameters(thorns: &BTreeMap<Identifier, Thorn>, indices: &Indices, out: &mut Vec<Diagnostic>) {
    for thorn in thorns.values() {
        for param in &thorn.parameters {
            let Some(imp) = param.origin.shared_from() else { continue };
            if imp == &thorn.implements {
                continue;
            }
            let Some(providers) = indices.providers_of_impl.get(imp) else { continue };
            for provider in providers {
                let owner = &thorns[provider];
                let problem = match owner.own_parameter(&param.name) {
                    None => Some(format!("`{provider}` declares no parameter `{}`", param.name)),
                    Some(own) if own.scope != ParamScope::Restricted => {
                        Some(format!("`{provider}::{}` is private", param.name))
                    }
                    Some(own) if own.data_type != param.data_type => {
                        Some(format!("type {} differs from {} in `{provider}`", param.data_type, own.data_type))
                    }
                    Some(_) => None,
                };
                if let Some(problem) = problem {
                    out.push(Diagnostic::error(
                        DiagCode::InvalidSharedParameter,
                        &thorn.name,
                        format!("shared parameter `{imp}::{}`: {problem}", param.name),
                    ));
                }
            }
        }
    }
}

fn check_function_signatures(thorns: &BTreeMap<Identifier, Thorn>, out: &mut Vec<Diagnostic>) {
    let mut first: BTreeMap<&Identifier, (&Identifier, &FunctionSignature)> = BTreeMap::new();
    for thorn in thorns.values() {
        for f in &thorn.functions {
            let FunctionRelation::Declares(sig) = &f.relation else { continue };
            match first.get(&f.name) {
                None => {
                    first.insert(&f.name, (&thorn.name, sig));
                }
                Some((owner, existing)) => {
                    if existing.shape() != sig.shape() {
                        out.push(Diagnostic::error(
                            DiagCode::FunctionSignatureMismatch,
                            &thorn.name,
                            format!(
                                "aliased function `{}` declared with a different signature than in `{owner}`",
                                f.name
                            ),
                        ));
                    }
                }
            }
        }
    }
}

/// Canonical public surface of a thorn: what inheritors can see.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum SurfaceElement {
    Group {
        name: String,
        data_type: CctkDataType,
        group_type: GroupType,
        size: Option<Vec<String>>,
        timelevels: u32,
        variables: Vec<String>,
    },
    Function {
        name: String,
        signature: (Option<CctkDataType>, Vec<(CctkDataType, Intent, bool)>),
    },
}

impl SurfaceElement {
    fn key(&self) -> (u8, &str) {
        match self {
            SurfaceElement::Group { name, .. } => (0, name),
            SurfaceElement::Function { name, .. } => (1, name),
        }
    }

    fn describe(&self) -> String {
        match self {
            SurfaceElement::Group { name, data_type, group_type, size, timelevels, variables } => {
                let size = size.as_ref().map(|s| format!(" SIZE={}", s.join(","))).unwrap_or_default();
                format!(
                    "public group `{name}` ({data_type} TYPE={} TIMELEVELS={timelevels}{size} {{{}}})",
                    group_type.keyword(),
                    variables.join(",")
                )
            }
            SurfaceElement::Function { name, .. } => format!("aliased function `{name}`"),
        }
    }
}

fn public_surface(thorn: &Thorn) -> Vec<SurfaceElement> {
    let mut out: Vec<SurfaceElement> = thorn
        .groups
        .iter()
        .filter(|g| g.access == Access::Public)
        .map(|g| SurfaceElement::Group {
            name: g.name.folded().to_string(),
            data_type: g.data_type,
            group_type: g.group_type,
            size: g.size.as_ref().map(|s| s.iter().map(|e| e.to_ascii_lowercase()).collect()),
            timelevels: g.timelevels,
            variables: g.variables.iter().map(|v| v.folded().to_string()).collect(),
        })
        .collect();
    for f in &thorn.functions {
        if let FunctionRelation::Declares(sig) = &f.relation {
            out.push(SurfaceElement::Function { name: f.name.folded().to_string(), signature: sig.shape() });
        }
    }
    out.sort();
    out.dedup();
    out
}

/// First element on which two canonical surfaces disagree.
fn first_difference(
    a: &[SurfaceElement],
    b: &[SurfaceElement],
    a_name: &Identifier,
    b_name: &Identifier,
) -> Option<String> {
    let mut i = 0;
    let mut j = 0;
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return None,
            (Some(x), None) => return Some(format!("{} only in `{a_name}`", x.describe())),
            (None, Some(y)) => return Some(format!("{} only in `{b_name}`", y.describe())),
            (Some(x), Some(y)) => {
                if x == y {
                    i += 1;
                    j += 1;
                    continue;
                }
                return Some(match x.key().cmp(&y.key()) {
                    std::cmp::Ordering::Less => format!("{} only in `{a_name}`", x.describe()),
                    std::cmp::Ordering::Greater => format!("{} only in `{b_name}`", y.describe()),
                    std::cmp::Ordering::Equal => {
                        format!("{} in `{a_name}` but {} in `{b_name}`", x.describe(), y.describe())
                    }
                });
            }
        }
    }
}

/// Compares the public surface of every implementation with two or more
/// providers. Each provider is compared against the name-wise first one.
pub fn check_implementation_consistency(world: &World) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (imp, providers) in &world.providers_of_impl {
        if providers.len() < 2 {
            continue;
        }
        let mut iter = providers.iter().filter_map(|p| world.thorns.get(p));
        let Some(reference) = iter.next() else { continue };
        let ref_surface = public_surface(reference);
        for other in iter {
            let surface = public_surface(other);
            if let Some(diff) = first_difference(&ref_surface, &surface, &reference.name, &other.name) {
                out.push(Diagnostic::error(
                    DiagCode::InterfaceMismatch,
                    &other.name,
                    format!("implementation `{imp}`: `{}` and `{}` differ: {diff}", reference.name, other.name),
                ));
            }
        }
    }
    out
}
