//! Condition oracles answer WHILE and IF variables during a dry run.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use thiserror::Error;

use super::TimeBin;
use crate::ident::Identifier;
use crate::parse::{ParseError, SourceLocation};

/// Where in the traversal a condition is being evaluated.
#[derive(Debug, Clone, Copy)]
pub struct OracleContext<'a> {
    pub bin: TimeBin,
    /// 0 for the once-only bins, 1-based inside the iteration loop.
    pub iteration: u32,
    /// Completed WHILE passes of the item so far; 0 for IF tests.
    pub pass: u32,
    pub item: &'a Identifier,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle failed on `{variable}`: {reason}")]
pub struct OracleFailure {
    pub variable: Identifier,
    pub reason: String,
}

/// Called sequentially, in trace order.
pub trait ConditionOracle {
    fn evaluate(&mut self, variable: &Identifier, ctx: &OracleContext<'_>) -> Result<i64, OracleFailure>;
}

/// Every IF holds and every WHILE loop runs exactly one pass: a variable
/// is 1 until the item has completed a pass, then 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct OnesOracle;

impl ConditionOracle for OnesOracle {
    fn evaluate(&mut self, _: &Identifier, ctx: &OracleContext<'_>) -> Result<i64, OracleFailure> {
        Ok(i64::from(ctx.pass == 0))
    }
}

/// Per-variable value sequences, consumed one value per evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceOracle {
    sequences: BTreeMap<Identifier, VecDeque<i64>>,
}

impl SequenceOracle {
    pub fn new(sequences: BTreeMap<Identifier, Vec<i64>>) -> Self {
        SequenceOracle { sequences: sequences.into_iter().map(|(k, v)| (k, v.into())).collect() }
    }
}

impl ConditionOracle for SequenceOracle {
    fn evaluate(&mut self, variable: &Identifier, _: &OracleContext<'_>) -> Result<i64, OracleFailure> {
        let fail = |reason: &str| OracleFailure { variable: variable.clone(), reason: reason.into() };
        self.sequences
            .get_mut(variable)
            .ok_or_else(|| fail("variable not listed"))?
            .pop_front()
            .ok_or_else(|| fail("sequence exhausted"))
    }
}

/// Parses `name = v1 v2 ...` lines with `#` comments. A repeated name
/// appends to its sequence.
pub fn parse_oracle_file(text: &str, origin: &Path) -> Result<SequenceOracle, ParseError> {
    let mut sequences: BTreeMap<Identifier, Vec<i64>> = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let err = |offset: usize, expected: &str, found: &str| ParseError {
            location: SourceLocation {
                file: origin.to_path_buf(),
                line: lineno as u32 + 1,
                column: raw[..offset].chars().count() as u32 + 1,
            },
            expected: expected.into(),
            found: found.into(),
        };
        let Some((name, values)) = line.split_once('=') else {
            return Err(err(line.len(), "`=`", "end of line"));
        };
        let name_offset = name.len() - name.trim_start().len();
        let ident = Identifier::new(name.trim())
            .map_err(|_| err(name_offset, "variable name", &format!("`{}`", name.trim())))?;
        let seq = sequences.entry(ident).or_default();
        let mut offset = name.len() + 1;
        for word in values.split_inclusive(char::is_whitespace) {
            let token = word.trim();
            if !token.is_empty() {
                let v = token.parse().map_err(|_| err(offset, "integer", &format!("`{token}`")))?;
                seq.push(v);
            }
            offset += word.len();
        }
    }
    Ok(SequenceOracle::new(sequences))
}
