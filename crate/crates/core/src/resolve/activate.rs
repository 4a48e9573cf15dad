//! Activation of a runtime configuration and parameter steering.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{check_capability_uniqueness, check_closure, Reason, Thornlist};
use crate::graph::Domain;
use crate::ident::Identifier;
use crate::model::{validate_parameter_value, ParamOrigin, ParamValue, Parameter, ValueError, World};
use crate::parse::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamEntry {
    /// Thorn that declares the parameter.
    pub owner: Identifier,
    /// Declaration with the effective ranges: its own plus those added by
    /// active extending thorns.
    pub parameter: Parameter,
    pub value: String,
    pub typed: ParamValue,
    pub is_default: bool,
}

impl ParamEntry {
    pub fn steerable(&self) -> bool {
        self.parameter.steerable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActiveConfiguration {
    pub thornlist: Thornlist,
    /// Keyed by (implementation, parameter).
    pub parameter_table: BTreeMap<(Identifier, Identifier), ParamEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActivationError {
    #[error("no thorns are activated")]
    NoActiveThorns,
    #[error("activated thorn `{0}` does not exist")]
    UnknownThornActivated(Identifier),
    #[error("thorns `{first}` and `{second}` both implement `{implementation}`")]
    DuplicateImplementation { implementation: Identifier, first: Identifier, second: Identifier },
    #[error("thorn `{thorn}` requires {} `{requirement}`, which no active thorn provides", .domain.label())]
    IncompleteActivation { thorn: Identifier, domain: Domain, requirement: String },
    #[error("capability `{capability}` is provided by both `{first}` and `{second}`")]
    CapabilityConflict { capability: Identifier, first: Identifier, second: Identifier },
    #[error("`{scope}` names both an implementation and an unrelated thorn")]
    AmbiguousScope { scope: Identifier },
    #[error("unknown parameter `{scope}::{parameter}`")]
    UnknownParameter { scope: Identifier, parameter: Identifier },
    #[error("`{scope}::{parameter}`: {source}")]
    ValueRejected { scope: Identifier, parameter: Identifier, source: ValueError },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SteerError {
    #[error("unknown parameter `{implementation}::{parameter}`")]
    UnknownParameter { implementation: Identifier, parameter: Identifier },
    #[error("parameter `{implementation}::{parameter}` is not steerable")]
    NotSteerable { implementation: Identifier, parameter: Identifier },
    #[error("`{implementation}::{parameter}`: {source}")]
    ValueRejected { implementation: Identifier, parameter: Identifier, source: ValueError },
}

/// Maps an assignment scope to the implementation whose table it addresses.
/// The implementation reading is tried first; a thorn of the same name that
/// implements something else makes the scope ambiguous.
fn scope_implementation(
    world: &World,
    active: &BTreeSet<Identifier>,
    scope: &Identifier,
) -> Result<Option<Identifier>, ActivationError> {
    let as_impl = active.iter().any(|t| &world.thorns[t].implements == scope);
    let as_thorn = active.get(scope).map(|t| world.thorns[t].implements.clone());
    match (as_impl, as_thorn) {
        (true, Some(imp)) if &imp != scope => Err(ActivationError::AmbiguousScope { scope: scope.clone() }),
        (true, _) => Ok(Some(scope.clone())),
        (false, thorn_impl) => Ok(thorn_impl),
    }
}

/// Activates the thorns of `runconfig`, fills the parameter table with
/// defaults and applies the assignments in file order.
pub fn activate(world: &World, runconfig: &RunConfig) -> Result<ActiveConfiguration, ActivationError> {
    if runconfig.active_thorns.is_empty() {
        return Err(ActivationError::NoActiveThorns);
    }
    let mut active = BTreeSet::new();
    for name in &runconfig.active_thorns {
        let thorn = world.thorn(name).ok_or_else(|| ActivationError::UnknownThornActivated(name.clone()))?;
        active.insert(thorn.name.clone());
    }

    let mut by_impl: BTreeMap<&Identifier, &Identifier> = BTreeMap::new();
    for name in &active {
        let imp = &world.thorns[name].implements;
        if let Some(first) = by_impl.insert(imp, name) {
            return Err(ActivationError::DuplicateImplementation {
                implementation: imp.clone(),
                first: first.clone(),
                second: name.clone(),
            });
        }
    }
    if let Err(u) = check_closure(world, &active) {
        return Err(ActivationError::IncompleteActivation {
            thorn: u.thorn,
            domain: u.domain,
            requirement: u.requirement,
        });
    }
    if let Err((capability, first, second)) = check_capability_uniqueness(world, &active) {
        return Err(ActivationError::CapabilityConflict { capability, first, second });
    }

    let mut table = BTreeMap::new();
    for name in &active {
        let thorn = &world.thorns[name];
        for p in thorn.parameters.iter().filter(|p| p.origin == ParamOrigin::Own) {
            let mut effective = p.clone();
            // An empty range list admits everything, so extensions only
            // widen a list that already restricts.
            if !effective.ranges.is_empty() {
                for other in &active {
                    for q in &world.thorns[other].parameters {
                        if q.origin == ParamOrigin::Extends(thorn.implements.clone()) && q.name == p.name {
                            effective.ranges.extend(q.ranges.iter().cloned());
                        }
                    }
                }
            }
            let typed = validate_parameter_value(&effective, &p.default).map_err(|source| {
                ActivationError::ValueRejected { scope: thorn.implements.clone(), parameter: p.name.clone(), source }
            })?;
            table.insert(
                (thorn.implements.clone(), p.name.clone()),
                ParamEntry {
                    owner: name.clone(),
                    parameter: effective,
                    value: p.default.clone(),
                    typed,
                    is_default: true,
                },
            );
        }
    }

    for a in &runconfig.assignments {
        let unknown = || ActivationError::UnknownParameter { scope: a.scope.clone(), parameter: a.parameter.clone() };
        let imp = scope_implementation(world, &active, &a.scope)?.ok_or_else(unknown)?;
        let entry = table.get_mut(&(imp, a.parameter.clone())).ok_or_else(unknown)?;
        entry.typed = validate_parameter_value(&entry.parameter, &a.value).map_err(|source| {
            ActivationError::ValueRejected { scope: a.scope.clone(), parameter: a.parameter.clone(), source }
        })?;
        entry.value = a.value.clone();
        entry.is_default = false;
    }

    let provenance = active.iter().map(|t| (t.clone(), Reason::Seed)).collect();
    Ok(ActiveConfiguration {
        thornlist: Thornlist { thorns: active.into_iter().collect(), provenance },
        parameter_table: table,
    })
}

/// Returns a copy of `config` with one steerable parameter changed.
pub fn steer(
    config: &ActiveConfiguration,
    implementation: &Identifier,
    parameter: &Identifier,
    value: &str,
) -> Result<ActiveConfiguration, SteerError> {
    let key = (implementation.clone(), parameter.clone());
    let entry = config.parameter_table.get(&key).ok_or_else(|| SteerError::UnknownParameter {
        implementation: implementation.clone(),
        parameter: parameter.clone(),
    })?;
    if !entry.steerable() {
        return Err(SteerError::NotSteerable { implementation: implementation.clone(), parameter: parameter.clone() });
    }
    let typed = validate_parameter_value(&entry.parameter, value).map_err(|source| SteerError::ValueRejected {
        implementation: implementation.clone(),
        parameter: parameter.clone(),
        source,
    })?;
    let mut next = config.clone();
    let slot = next.parameter_table.get_mut(&key).expect("entry present");
    slot.value = value.to_string();
    slot.typed = typed;
    slot.is_default = false;
    Ok(next)
}
