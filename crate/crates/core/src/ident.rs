//! Case-insensitive identifiers.
//!
//! CCL names compare without regard to ASCII case (`IDScalarWaveC` and
//! `idscalarwavec` are the same thorn) but keep the spelling they were
//! written with for display.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a valid identifier")]
pub struct InvalidIdentifier(pub String);

/// A CCL name: letters, digits and underscores, not starting with a digit.
#[derive(Clone)]
pub struct Identifier {
    text: String,
    folded: String,
}

impl Identifier {
    pub fn new(text: impl Into<String>) -> Result<Self, InvalidIdentifier> {
        let text = text.into();
        if !is_identifier(&text) {
            return Err(InvalidIdentifier(text));
        }
        let folded = text.to_ascii_lowercase();
        Ok(Identifier { text, folded })
    }

    /// Spelling as written.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    /// Lowercased form used for comparison and hashing.
    pub fn folded(&self) -> &str {
        &self.folded
    }

    pub fn matches(&self, other: &str) -> bool {
        self.text.eq_ignore_ascii_case(other)
    }
}

pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PartialEq for Identifier {
    fn eq(&self, other: &Self) -> bool {
        self.folded == other.folded
    }
}

impl Eq for Identifier {}

impl Hash for Identifier {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.folded.hash(state);
    }
}

impl PartialOrd for Identifier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Identifier {
    fn cmp(&self, other: &Self) -> Ordering {
        self.folded.cmp(&other.folded)
    }
}

// Lets `BTreeMap<Identifier, _>` be queried with a folded `&str`.
impl Borrow<str> for Identifier {
    fn borrow(&self) -> &str {
        &self.folded
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl fmt::Debug for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.text)
    }
}

impl std::str::FromStr for Identifier {
    type Err = InvalidIdentifier;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identifier::new(s)
    }
}

impl Serialize for Identifier {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Identifier {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Identifier::new(text).map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and fixtures; panics on an invalid name.
pub fn id(text: &str) -> Identifier {
    Identifier::new(text).unwrap_or_else(|e| panic!("{e}"))
}
