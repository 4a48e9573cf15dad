//! Thorn discovery and loading from a `<root>/<arrangement>/<thorn>/` tree.
//!
//! A directory is a thorn iff it contains `interface.ccl`. Discovery looks
//! exactly two levels below the root and never deeper. Thorns are parsed in
//! parallel; the result order is the sorted discovery order.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::ident::Identifier;
use crate::model::{ConfigurationDecl, Thorn};
use crate::parse::{self, ParseError, SourceLocation};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl CorpusError {
    pub fn is_io(&self) -> bool {
        matches!(self, CorpusError::Io { .. })
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        if entry.file_type().map_err(io_err(&entry.path()))?.is_dir() {
            out.push(entry.path());
        }
    }
    out.sort();
    Ok(out)
}

/// Thorn directories under `root`, sorted by path.
pub fn discover(root: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut thorns = Vec::new();
    for arrangement in sorted_subdirs(root)? {
        for dir in sorted_subdirs(&arrangement)? {
            if dir.join("interface.ccl").is_file() {
                thorns.push(dir);
            }
        }
    }
    Ok(thorns)
}

fn read_optional(path: &Path) -> Result<Option<Vec<u8>>, CorpusError> {
    match fs::read(path) {
        Ok(bytes) => Ok(Some(bytes)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(io_err(path)(e)),
    }
}

fn dir_identifier(dir: &Path, what: &str) -> Result<Identifier, CorpusError> {
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Identifier::new(name.clone()).map_err(|_| {
        CorpusError::Parse(ParseError {
            location: SourceLocation { file: dir.to_path_buf(), line: 1, column: 1 },
            expected: format!("{what} directory named like an identifier"),
            found: format!("`{name}`"),
        })
    })
}

/// Parses every CCL file of one thorn directory. `param.ccl`,
/// `schedule.ccl` and `configuration.ccl` may be absent and then count as
/// empty.
pub fn load_thorn(dir: &Path) -> Result<Thorn, CorpusError> {
    let name = dir_identifier(dir, "thorn")?;
    let arrangement = dir_identifier(dir.parent().unwrap_or(Path::new("")), "arrangement")?;

    let iface_path = dir.join("interface.ccl");
    let bytes = fs::read(&iface_path).map_err(io_err(&iface_path))?;
    let interface = parse::parse_interface(parse::decode_utf8(&bytes, &iface_path)?, &iface_path)?;

    let param_path = dir.join("param.ccl");
    let parameters = match read_optional(&param_path)? {
        Some(b) => parse::parse_param(parse::decode_utf8(&b, &param_path)?, &param_path)?,
        None => Vec::new(),
    };
    let sched_path = dir.join("schedule.ccl");
    let schedule = match read_optional(&sched_path)? {
        Some(b) => parse::parse_schedule(parse::decode_utf8(&b, &sched_path)?, &sched_path)?,
        None => Vec::new(),
    };
    let conf_path = dir.join("configuration.ccl");
    let configuration = match read_optional(&conf_path)? {
        Some(b) => parse::parse_configuration(parse::decode_utf8(&b, &conf_path)?, &conf_path)?,
        None => ConfigurationDecl::default(),
    };

    let mut thorn = Thorn::from_decls(name, arrangement, interface, parameters, schedule, configuration)
        .expect("parse_interface guarantees IMPLEMENTS");
    thorn.has_test_ccl = dir.join("test.ccl").is_file();
    thorn.source_dir = Some(dir.to_path_buf());
    Ok(thorn)
}

/// Discovers and loads every thorn under `root`. On failure, the error of
/// the first failing thorn in discovery order is returned.
pub fn load_corpus(root: &Path) -> Result<Vec<Thorn>, CorpusError> {
    let dirs = discover(root)?;
    let results: Vec<Result<Thorn, CorpusError>> = dirs.par_iter().map(|d| load_thorn(d)).collect();
    results.into_iter().collect()
}
