//! Thornlist resolution from seed thorns, plus runtime activation.
//!
//! Resolution admits thorns until every requirement of every member is met
//! by a member. A requirement with one provider admits it; with several, the
//! caller's [`ChoiceMap`] decides, and without a choice the requirement is
//! reported as ambiguous. Ambiguities are never broken automatically.

mod activate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{needs, providers, Domain, Need};
use crate::ident::Identifier;
use crate::model::World;
use crate::parse::ThornlistEntry;

pub use activate::{activate, steer, ActivationError, ActiveConfiguration, ParamEntry, SteerError};

/// Requirement key (implementation, function or capability name, folded)
/// mapped to the thorn chosen to satisfy it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChoiceMap {
    entries: BTreeMap<String, Identifier>,
}

impl ChoiceMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: &str, thorn: Identifier) {
        self.entries.insert(key.to_ascii_lowercase(), thorn);
    }

    pub fn get(&self, key: &str) -> Option<&Identifier> {
        self.entries.get(&key.to_ascii_lowercase())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(String, Identifier)> for ChoiceMap {
    fn from_iter<I: IntoIterator<Item = (String, Identifier)>>(iter: I) -> Self {
        let mut map = ChoiceMap::new();
        for (k, v) in iter {
            map.insert(&k, v);
        }
        map
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    Seed,
    RequiredBy { thorn: Identifier, via: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thornlist {
    /// Sorted case-insensitively.
    pub thorns: Vec<Identifier>,
    /// First admitting reason of each member.
    pub provenance: BTreeMap<Identifier, Reason>,
}

impl Thornlist {
    pub fn contains(&self, thorn: &Identifier) -> bool {
        self.thorns.binary_search(thorn).is_ok()
    }

    /// Entries for the thornlist text format.
    pub fn entries(&self, world: &World) -> Vec<ThornlistEntry> {
        self.thorns
            .iter()
            .filter_map(|t| world.thorn(t))
            .map(|t| ThornlistEntry { arrangement: t.arrangement.clone(), thorn: t.name.clone() })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ambiguity {
    pub key: String,
    pub domain: Domain,
    /// Sorted, at least two.
    pub candidates: Vec<Identifier>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AmbiguityReport {
    pub unresolved: Vec<Ambiguity>,
}

impl fmt::Display for AmbiguityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.unresolved.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let names: Vec<&str> = a.candidates.iter().map(|c| c.as_str()).collect();
            write!(f, "{} `{}` has several providers: {}", a.domain.label(), a.key, names.join(", "))?;
        }
        Ok(())
    }
}

fn chain_text(chain: &[Identifier]) -> String {
    chain.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("no seed thorns given")]
    NoSeeds,
    #[error("unknown seed thorn `{0}`")]
    UnknownSeed(Identifier),
    #[error("no thorn provides {} `{requirement}` (required along {})", .domain.label(), chain_text(.chain))]
    UnsatisfiedRequirement { requirement: String, domain: Domain, chain: Vec<Identifier> },
    #[error("capability `{capability}` is provided by both `{first}` and `{second}`")]
    CapabilityConflict { capability: Identifier, first: Identifier, second: Identifier },
    #[error("choice `{key}={thorn}` names a thorn that does not provide `{key}`")]
    InvalidChoice { key: String, thorn: Identifier },
    #[error("{0}")]
    Ambiguous(AmbiguityReport),
}

/// A requirement of a member that no member satisfies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unsatisfied {
    pub thorn: Identifier,
    pub domain: Domain,
    pub requirement: String,
}

/// Checks that every requirement of every thorn in `set` is met inside `set`.
/// Thorns of `set` that are not in the world are skipped.
pub fn check_closure(world: &World, set: &BTreeSet<Identifier>) -> Result<(), Unsatisfied> {
    for name in set {
        let Some(thorn) = world.thorn(name) else { continue };
        for need in needs(thorn) {
            let cands = providers(world, need.domain, need.name);
            if !cands.iter().any(|c| set.contains(c)) {
                return Err(Unsatisfied {
                    thorn: name.clone(),
                    domain: need.domain,
                    requirement: need.name.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Returns the first capability (in name order) provided by two members.
pub fn check_capability_uniqueness(
    world: &World,
    set: &BTreeSet<Identifier>,
) -> Result<(), (Identifier, Identifier, Identifier)> {
    for (cap, provs) in &world.providers_of_capability {
        let mut inside = provs.iter().filter(|p| set.contains(*p));
        if let (Some(a), Some(b)) = (inside.next(), inside.next()) {
            return Err((cap.clone(), a.clone(), b.clone()));
        }
    }
    Ok(())
}

fn provenance_chain(provenance: &BTreeMap<Identifier, Reason>, thorn: &Identifier) -> Vec<Identifier> {
    let mut chain = vec![thorn.clone()];
    let mut cur = thorn;
    while let Some(Reason::RequiredBy { thorn: parent, .. }) = provenance.get(cur) {
        if chain.contains(parent) {
            break;
        }
        chain.push(parent.clone());
        cur = parent;
    }
    chain.reverse();
    chain
}

pub fn resolve(world: &World, seeds: &[Identifier], choices: &ChoiceMap) -> Result<Thornlist, ResolveError> {
    if seeds.is_empty() {
        return Err(ResolveError::NoSeeds);
    }
    let mut members: BTreeSet<Identifier> = BTreeSet::new();
    let mut provenance = BTreeMap::new();
    for seed in seeds {
        let thorn = world.thorn(seed).ok_or_else(|| ResolveError::UnknownSeed(seed.clone()))?;
        members.insert(thorn.name.clone());
        provenance.entry(thorn.name.clone()).or_insert(Reason::Seed);
    }

    // Fixed-point rounds over the sorted member set keep admission order,
    // provenance and the ambiguity report deterministic.
    loop {
        let mut pending: BTreeMap<(Domain, String), Ambiguity> = BTreeMap::new();
        let mut changed = false;
        let snapshot: Vec<Identifier> = members.iter().cloned().collect();
        for name in &snapshot {
            let thorn = &world.thorns[name];
            for Need { domain, name: key, .. } in needs(thorn) {
                let cands = providers(world, domain, key);
                if cands.contains(name) || cands.iter().any(|c| members.contains(c)) {
                    continue;
                }
                let admit = match cands.len() {
                    0 => {
                        return Err(ResolveError::UnsatisfiedRequirement {
                            requirement: key.to_string(),
                            domain,
                            chain: provenance_chain(&provenance, name),
                        })
                    }
                    1 => cands.into_iter().next().unwrap(),
                    _ => match choices.get(key) {
                        Some(choice) => cands.get(choice).cloned().ok_or_else(|| ResolveError::InvalidChoice {
                            key: key.to_string(),
                            thorn: choice.clone(),
                        })?,
                        None => {
                            pending.insert(
                                (domain, key.to_ascii_lowercase()),
                                Ambiguity { key: key.to_string(), domain, candidates: cands.into_iter().collect() },
                            );
                            continue;
                        }
                    },
                };
                provenance
                    .entry(admit.clone())
                    .or_insert_with(|| Reason::RequiredBy { thorn: name.clone(), via: key.to_string() });
                members.insert(admit);
                changed = true;
            }
        }
        if !changed {
            if !pending.is_empty() {
                return Err(ResolveError::Ambiguous(AmbiguityReport { unresolved: pending.into_values().collect() }));
            }
            break;
        }
    }

    if let Err((capability, first, second)) = check_capability_uniqueness(world, &members) {
        return Err(ResolveError::CapabilityConflict { capability, first, second });
    }
    Ok(Thornlist { thorns: members.into_iter().collect(), provenance })
}

/// Everything `thorn` needs, transitively, excluding itself.
pub fn transitive_dependencies(
    world: &World,
    thorn: &Identifier,
    choices: &ChoiceMap,
) -> Result<BTreeSet<Identifier>, ResolveError> {
    let list = resolve(world, std::slice::from_ref(thorn), choices)?;
    Ok(list.thorns.into_iter().filter(|t| t != thorn).collect())
}
