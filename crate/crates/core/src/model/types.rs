//! Semantic types for every CCL construct.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::ident::Identifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BaseType {
    Byte,
    Int,
    Real,
    Complex,
    String,
    Keyword,
    Boolean,
    Pointer,
}

impl BaseType {
    pub fn keyword(self) -> &'static str {
        match self {
            BaseType::Byte => "BYTE",
            BaseType::Int => "INT",
            BaseType::Real => "REAL",
            BaseType::Complex => "COMPLEX",
            BaseType::String => "STRING",
            BaseType::Keyword => "KEYWORD",
            BaseType::Boolean => "BOOLEAN",
            BaseType::Pointer => "POINTER",
        }
    }

    pub fn sizeable(self) -> bool {
        matches!(self, BaseType::Int | BaseType::Real | BaseType::Complex)
    }

    /// Types that may only appear on parameters.
    pub fn parameter_only(self) -> bool {
        matches!(self, BaseType::String | BaseType::Keyword | BaseType::Boolean)
    }
}

/// A Cactus data type with an optional byte-size suffix (`REAL8`, `INT4`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CctkDataType {
    pub base: BaseType,
    pub size_bytes: Option<u8>,
}

pub const VALID_SIZES: [u8; 5] = [1, 2, 4, 8, 16];

impl CctkDataType {
    pub const fn plain(base: BaseType) -> Self {
        CctkDataType { base, size_bytes: None }
    }

    /// Parses `REAL`, `real8`, `CCTK_INT4`, ... The size suffix is accepted
    /// syntactically on any base; whether it is allowed is a semantic check.
    pub fn parse(word: &str) -> Option<Self> {
        let upper = word.to_ascii_uppercase();
        let upper = upper.strip_prefix("CCTK_").unwrap_or(&upper);
        let split = upper.find(|c: char| c.is_ascii_digit()).unwrap_or(upper.len());
        let (name, digits) = upper.split_at(split);
        let base = match name {
            "BYTE" => BaseType::Byte,
            "INT" => BaseType::Int,
            "REAL" => BaseType::Real,
            "COMPLEX" => BaseType::Complex,
            "STRING" => BaseType::String,
            "KEYWORD" => BaseType::Keyword,
            "BOOLEAN" => BaseType::Boolean,
            "POINTER" => BaseType::Pointer,
            _ => return None,
        };
        let size_bytes = if digits.is_empty() {
            None
        } else {
            if digits.len() > 2 || digits.starts_with('0') {
                return None;
            }
            Some(digits.parse().ok()?)
        };
        Some(CctkDataType { base, size_bytes })
    }

    pub fn size_is_valid(&self) -> bool {
        match self.size_bytes {
            None => true,
            Some(n) => self.base.sizeable() && VALID_SIZES.contains(&n),
        }
    }
}

impl fmt::Display for CctkDataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.base.keyword())?;
        if let Some(n) = self.size_bytes {
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupType {
    #[serde(rename = "GF")]
    Gf,
    #[serde(rename = "ARRAY")]
    Array,
    #[serde(rename = "SCALAR")]
    Scalar,
}

impl GroupType {
    pub fn keyword(self) -> &'static str {
        match self {
            GroupType::Gf => "GF",
            GroupType::Array => "ARRAY",
            GroupType::Scalar => "SCALAR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Access {
    Public,
    Private,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableGroup {
    pub name: Identifier,
    pub data_type: CctkDataType,
    pub group_type: GroupType,
    /// Extent expressions, one per dimension, kept unevaluated.
    pub size: Option<Vec<String>>,
    pub timelevels: u32,
    pub access: Access,
    pub variables: Vec<Identifier>,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ParamScope {
    Restricted,
    Private,
}

/// One allowed-range line of a parameter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterRange {
    pub spec: String,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "implementation")]
pub enum ParamOrigin {
    Own,
    Uses(Identifier),
    Extends(Identifier),
}

impl ParamOrigin {
    pub fn shared_from(&self) -> Option<&Identifier> {
        match self {
            ParamOrigin::Own => None,
            ParamOrigin::Uses(imp) | ParamOrigin::Extends(imp) => Some(imp),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: Identifier,
    pub data_type: CctkDataType,
    pub scope: ParamScope,
    pub ranges: Vec<ParameterRange>,
    /// Empty for USES/EXTENDS entries, which carry no default.
    pub default: String,
    pub steerable: bool,
    pub origin: ParamOrigin,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Intent {
    In,
    Out,
    InOut,
}

impl Intent {
    pub fn keyword(self) -> &'static str {
        match self {
            Intent::In => "IN",
            Intent::Out => "OUT",
            Intent::InOut => "INOUT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FunctionArg {
    pub name: Identifier,
    pub data_type: CctkDataType,
    pub intent: Intent,
    pub is_array: bool,
}

/// `None` return type means `VOID`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FunctionSignature {
    pub return_type: Option<CctkDataType>,
    pub args: Vec<FunctionArg>,
}

impl FunctionSignature {
    /// Form used for cross-thorn comparison: argument names are irrelevant.
    pub fn shape(&self) -> (Option<CctkDataType>, Vec<(CctkDataType, Intent, bool)>) {
        (self.return_type, self.args.iter().map(|a| (a.data_type, a.intent, a.is_array)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FunctionRelation {
    Declares(FunctionSignature),
    Provides { routine: Identifier, language: String },
    Requires,
    Uses,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasedFunction {
    pub name: Identifier,
    pub relation: FunctionRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CapabilityRelation {
    Provides { script: String, language: String },
    Requires,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capability {
    pub name: Identifier,
    pub relation: CapabilityRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScheduleAnchor {
    AtBin { bin: Identifier },
    InGroup { group: Identifier },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleItem {
    pub name: Identifier,
    pub is_group: bool,
    pub anchor: ScheduleAnchor,
    pub while_vars: Vec<Identifier>,
    pub if_vars: Vec<Identifier>,
    pub before: Vec<Identifier>,
    pub after: Vec<Identifier>,
    pub storage: Vec<Identifier>,
    pub sync: Vec<Identifier>,
    pub language: Option<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum IncludeDecl {
    Uses { file: String },
    ProvidesInto { fragment: String, target: String },
}

/// Parsed `interface.ccl`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterfaceDecl {
    pub implements: Option<Identifier>,
    pub inherits: Vec<Identifier>,
    pub groups: Vec<VariableGroup>,
    pub functions: Vec<AliasedFunction>,
    pub includes: Vec<IncludeDecl>,
}

/// Parsed `configuration.ccl`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationDecl {
    pub capabilities: Vec<Capability>,
    pub requires_thorns: Vec<Identifier>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thorn {
    pub name: Identifier,
    pub arrangement: Identifier,
    pub implements: Identifier,
    pub inherits: Vec<Identifier>,
    pub groups: Vec<VariableGroup>,
    pub parameters: Vec<Parameter>,
    pub functions: Vec<AliasedFunction>,
    pub schedule: Vec<ScheduleItem>,
    pub capabilities: Vec<Capability>,
    pub requires_thorns: Vec<Identifier>,
    pub includes: Vec<IncludeDecl>,
    /// `test.ccl` is recorded but never interpreted.
    pub has_test_ccl: bool,
    /// Thorn directory on disk, when loaded from a corpus.
    pub source_dir: Option<PathBuf>,
}

impl Thorn {
    /// A thorn with only a name and implementation; used by tests and
    /// synthetic corpora.
    pub fn new(name: Identifier, arrangement: Identifier, implements: Identifier) -> Self {
        Thorn {
            name,
            arrangement,
            implements,
            inherits: Vec::new(),
            groups: Vec::new(),
            parameters: Vec::new(),
            functions: Vec::new(),
            schedule: Vec::new(),
            capabilities: Vec::new(),
            requires_thorns: Vec::new(),
            includes: Vec::new(),
            has_test_ccl: false,
            source_dir: None,
        }
    }

    pub fn from_decls(
        name: Identifier,
        arrangement: Identifier,
        interface: InterfaceDecl,
        parameters: Vec<Parameter>,
        schedule: Vec<ScheduleItem>,
        configuration: ConfigurationDecl,
    ) -> Option<Self> {
        Some(Thorn {
            name,
            arrangement,
            implements: interface.implements?,
            inherits: interface.inherits,
            groups: interface.groups,
            parameters,
            functions: interface.functions,
            schedule,
            capabilities: configuration.capabilities,
            requires_thorns: configuration.requires_thorns,
            includes: interface.includes,
            has_test_ccl: false,
            source_dir: None,
        })
    }

    pub fn provides_function(&self, name: &Identifier) -> bool {
        self.functions.iter().any(|f| &f.name == name && matches!(f.relation, FunctionRelation::Provides { .. }))
    }

    pub fn provides_capability(&self, name: &Identifier) -> bool {
        self.capabilities.iter().any(|c| &c.name == name && matches!(c.relation, CapabilityRelation::Provides { .. }))
    }

    pub fn provides_include(&self, file: &str) -> bool {
        self.includes.iter().any(|inc| matches!(inc, IncludeDecl::ProvidesInto { target, .. } if target == file))
    }

    pub fn required_functions(&self) -> impl Iterator<Item = &Identifier> {
        self.functions.iter().filter(|f| matches!(f.relation, FunctionRelation::Requires)).map(|f| &f.name)
    }

    pub fn required_capabilities(&self) -> impl Iterator<Item = &Identifier> {
        self.capabilities.iter().filter(|c| matches!(c.relation, CapabilityRelation::Requires)).map(|c| &c.name)
    }

    pub fn used_includes(&self) -> impl Iterator<Item = &str> {
        self.includes.iter().filter_map(|inc| match inc {
            IncludeDecl::Uses { file } => Some(file.as_str()),
            IncludeDecl::ProvidesInto { .. } => None,
        })
    }

    /// Implementations this thorn shares parameters from, in first-seen order.
    pub fn shared_implementations(&self) -> Vec<&Identifier> {
        let mut out: Vec<&Identifier> = Vec::new();
        for p in &self.parameters {
            if let Some(imp) = p.origin.shared_from() {
                if !out.contains(&imp) {
                    out.push(imp);
                }
            }
        }
        out
    }

    pub fn own_parameter(&self, name: &Identifier) -> Option<&Parameter> {
        self.parameters.iter().find(|p| &p.name == name && p.origin == ParamOrigin::Own)
    }
}
