//! Recursive-descent parsers for the CCL dialects and runtime parameter files.
//!
//! Every parser is a pure function of its input text. The first error stops
//! the file; there is no recovery.

mod configuration;
mod interface;
mod lexer;
mod param;
mod parfile;
mod schedule;
mod thornlist;
mod write;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use configuration::parse_configuration;
pub use interface::parse_interface;
pub use param::parse_param;
pub use parfile::{parse_parameter_file, Assignment, RunConfig};
pub use schedule::parse_schedule;
pub use thornlist::{parse_thornlist, write_thornlist, ThornlistEntry};
pub use write::{write_configuration, write_interface, write_param, write_parameter_file, write_schedule};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceLocation {
    pub file: PathBuf,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: expected {expected}, found {found}")]
pub struct ParseError {
    pub location: SourceLocation,
    pub expected: String,
    pub found: String,
}

/// The file kinds this crate can parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dialect {
    Interface,
    Param,
    Schedule,
    Configuration,
    ParameterFile,
    Thornlist,
}

impl Dialect {
    pub const ALL: [Dialect; 6] = [
        Dialect::Interface,
        Dialect::Param,
        Dialect::Schedule,
        Dialect::Configuration,
        Dialect::ParameterFile,
        Dialect::Thornlist,
    ];
}

/// Result of [`parse_bytes`], one variant per dialect.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Interface(crate::model::InterfaceDecl),
    Param(Vec<crate::model::Parameter>),
    Schedule(Vec<crate::model::ScheduleItem>),
    Configuration(crate::model::ConfigurationDecl),
    ParameterFile(RunConfig),
    Thornlist(Vec<ThornlistEntry>),
}

/// Decodes untrusted bytes as UTF-8 and parses them. Invalid UTF-8 is
/// reported as a [`ParseError`] at the offending position.
pub fn parse_bytes(dialect: Dialect, bytes: &[u8], origin: &Path) -> Result<Parsed, ParseError> {
    let text = decode_utf8(bytes, origin)?;
    Ok(match dialect {
        Dialect::Interface => Parsed::Interface(parse_interface(text, origin)?),
        Dialect::Param => Parsed::Param(parse_param(text, origin)?),
        Dialect::Schedule => Parsed::Schedule(parse_schedule(text, origin)?),
        Dialect::Configuration => Parsed::Configuration(parse_configuration(text, origin)?),
        Dialect::ParameterFile => Parsed::ParameterFile(parse_parameter_file(text, origin)?),
        Dialect::Thornlist => Parsed::Thornlist(parse_thornlist(text, origin)?),
    })
}

pub fn decode_utf8<'a>(bytes: &'a [u8], origin: &Path) -> Result<&'a str, ParseError> {
    std::str::from_utf8(bytes).map_err(|e| {
        let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
        let line = valid.matches('\n').count() as u32 + 1;
        let column = valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
        ParseError {
            location: SourceLocation { file: origin.to_path_buf(), line, column },
            expected: "UTF-8 text".into(),
            found: format!("invalid byte 0x{:02x}", bytes[e.valid_up_to()]),
        }
    })
}
