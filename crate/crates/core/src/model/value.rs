//! Parameter values: type coercion and range membership.
//!
//! Numeric ranges are `lo:hi` closed intervals where either end may be `*`
//! or empty (unbounded), or a single literal. Keyword ranges are case-insensitive
//! literals. String ranges are regular expressions anchored at both ends.
//! Several range lines form a union; an empty range list admits every
//! value of the right type.

use std::fmt;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::types::{BaseType, Parameter, ParameterRange};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value")]
pub enum ParamValue {
    Int(i64),
    Real(f64),
    Keyword(String),
    String(String),
    Boolean(bool),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => write!(f, "{v:?}"),
            ParamValue::Keyword(s) | ParamValue::String(s) => f.write_str(s),
            ParamValue::Boolean(b) => f.write_str(if *b { "yes" } else { "no" }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("`{value}` is not a valid {expected} value")]
    TypeError { value: String, expected: &'static str },
    #[error("`{value}` lies outside every allowed range of `{parameter}`")]
    RangeError { parameter: String, value: String },
}

/// A range line that cannot be interpreted for the parameter's type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("range `{spec}`: {reason}")]
pub struct MalformedRange {
    pub spec: String,
    pub reason: String,
}

pub fn parse_bool(text: &str) -> Option<bool> {
    match text.to_ascii_lowercase().as_str() {
        "yes" | "true" | "1" => Some(true),
        "no" | "false" | "0" => Some(false),
        _ => None,
    }
}

fn parse_int(text: &str) -> Option<i64> {
    let t = text.strip_prefix('+').unwrap_or(text);
    t.parse().ok()
}

fn parse_real(text: &str) -> Option<f64> {
    // Rust accepts "inf"/"nan"; CCL does not.
    if text.chars().any(|c| c.is_ascii_alphabetic() && !matches!(c, 'e' | 'E')) {
        return None;
    }
    let v: f64 = text.parse().ok()?;
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bound<T> {
    Unbounded,
    At(T),
}

/// A numeric range line after parsing.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Interval<T> {
    lo: Bound<T>,
    hi: Bound<T>,
}

impl<T: PartialOrd + Copy> Interval<T> {
    fn contains(&self, v: T) -> bool {
        let above = match self.lo {
            Bound::Unbounded => true,
            Bound::At(lo) => v >= lo,
        };
        let below = match self.hi {
            Bound::Unbounded => true,
            Bound::At(hi) => v <= hi,
        };
        above && below
    }
}

fn parse_interval<T: PartialOrd + Copy>(
    spec: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Interval<T>, MalformedRange> {
    let bad = |reason: &str| MalformedRange { spec: spec.to_string(), reason: reason.to_string() };
    let bound = |s: &str| -> Result<Bound<T>, MalformedRange> {
        let s = s.trim();
        if s == "*" || s.is_empty() {
            Ok(Bound::Unbounded)
        } else {
            parse(s).map(Bound::At).ok_or_else(|| bad("bound is not a number of the parameter's type"))
        }
    };
    let interval = match spec.split_once(':') {
        Some((lo, hi)) => {
            if hi.contains(':') {
                return Err(bad("too many `:` separators"));
            }
            Interval { lo: bound(lo)?, hi: bound(hi)? }
        }
        None => {
            let v = bound(spec)?;
            Interval { lo: v, hi: v }
        }
    };
    if let (Bound::At(lo), Bound::At(hi)) = (interval.lo, interval.hi) {
        if lo > hi {
            return Err(bad("lower bound exceeds upper bound"));
        }
    }
    Ok(interval)
}

fn anchored_regex(pattern: &str) -> Result<Regex, MalformedRange> {
    Regex::new(&format!("^(?:{pattern})$"))
        .map_err(|e| MalformedRange { spec: pattern.to_string(), reason: format!("invalid pattern: {e}") })
}

/// Checks that a range line is meaningful for `base`.
pub fn check_range(base: BaseType, range: &ParameterRange) -> Result<(), MalformedRange> {
    match base {
        BaseType::Int | BaseType::Byte => parse_interval(&range.spec, parse_int).map(|_| ()),
        BaseType::Real => parse_interval(&range.spec, parse_real).map(|_| ()),
        BaseType::String => anchored_regex(&range.spec).map(|_| ()),
        BaseType::Boolean => parse_bool(&range.spec)
            .map(|_| ())
            .ok_or_else(|| MalformedRange { spec: range.spec.clone(), reason: "not a boolean literal".into() }),
        BaseType::Keyword => Ok(()),
        BaseType::Complex | BaseType::Pointer => Err(MalformedRange {
            spec: range.spec.clone(),
            reason: format!("{} is not a parameter type", base.keyword()),
        }),
    }
}

fn type_name(base: BaseType) -> &'static str {
    match base {
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

/// Coerces `value` to the parameter's type and checks it against `ranges`.
///
/// Separate from [`validate_parameter_value`] so that callers can pass the
/// union of a parameter's own ranges and ranges added by extending thorns.
pub fn validate_against(param: &Parameter, ranges: &[&ParameterRange], value: &str) -> Result<ParamValue, ValueError> {
    let base = param.data_type.base;
    let type_err = || ValueError::TypeError { value: value.to_string(), expected: type_name(base) };
    let range_err = || ValueError::RangeError { parameter: param.name.to_string(), value: value.to_string() };
    let text = value.trim();
    match base {
        BaseType::Int | BaseType::Byte => {
            let v = parse_int(text).ok_or_else(type_err)?;
            let ok = ranges.is_empty()
                || ranges.iter().any(|r| parse_interval(&r.spec, parse_int).map(|i| i.contains(v)).unwrap_or(false));
            ok.then_some(ParamValue::Int(v)).ok_or_else(range_err)
        }
        BaseType::Real => {
            let v = parse_real(text).ok_or_else(type_err)?;
            let ok = ranges.is_empty()
                || ranges.iter().any(|r| parse_interval(&r.spec, parse_real).map(|i| i.contains(v)).unwrap_or(false));
            ok.then_some(ParamValue::Real(v)).ok_or_else(range_err)
        }
        BaseType::Boolean => {
            let v = parse_bool(text).ok_or_else(type_err)?;
            let ok = ranges.is_empty() || ranges.iter().any(|r| parse_bool(&r.spec) == Some(v));
            ok.then_some(ParamValue::Boolean(v)).ok_or_else(range_err)
        }
        BaseType::Keyword => {
            if ranges.is_empty() {
                return Ok(ParamValue::Keyword(value.to_string()));
            }
            ranges
                .iter()
                .find(|r| r.spec.eq_ignore_ascii_case(value))
                .map(|r| ParamValue::Keyword(r.spec.clone()))
                .ok_or_else(range_err)
        }
        BaseType::String => {
            let ok = ranges.is_empty()
                || ranges.iter().any(|r| anchored_regex(&r.spec).map(|re| re.is_match(value)).unwrap_or(false));
            ok.then(|| ParamValue::String(value.to_string())).ok_or_else(range_err)
        }
        BaseType::Complex | BaseType::Pointer => Err(type_err()),
    }
}

pub fn validate_parameter_value(param: &Parameter, value: &str) -> Result<ParamValue, ValueError> {
    let ranges: Vec<&ParameterRange> = param.ranges.iter().collect();
    validate_against(param, &ranges, value)
}
