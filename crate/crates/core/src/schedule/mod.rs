//! Schedule tree construction and dry-run traversal.
//!
//! Items of the active thorns are placed under their time bin or group and
//! each sibling list is ordered by its BEFORE/AFTER constraints, ties going
//! to the case-insensitive (thorn, item) key.

mod oracle;
mod order;
mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ident::Identifier;
use crate::model::{DiagCode, Diagnostic, ScheduleAnchor, ScheduleItem, World};
use crate::resolve::ActiveConfiguration;

pub use oracle::{parse_oracle_file, ConditionOracle, OnesOracle, OracleContext, OracleFailure, SequenceOracle};
pub use order::order_siblings;
pub use trace::{
    storage_spans, trace_to_json, trace_to_text, traverse, MalformedTrace, TraceError, TraceEvent, WHILE_PASS_CAP,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TimeBin {
    Startup,
    Paramcheck,
    Initial,
    Prestep,
    Evol,
    Poststep,
    Analysis,
}

impl TimeBin {
    pub const ALL: [TimeBin; 7] = [
        TimeBin::Startup,
        TimeBin::Paramcheck,
        TimeBin::Initial,
        TimeBin::Prestep,
        TimeBin::Evol,
        TimeBin::Poststep,
        TimeBin::Analysis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TimeBin::Startup => "STARTUP",
            TimeBin::Paramcheck => "PARAMCHECK",
            TimeBin::Initial => "INITIAL",
            TimeBin::Prestep => "PRESTEP",
            TimeBin::Evol => "EVOL",
            TimeBin::Poststep => "POSTSTEP",
            TimeBin::Analysis => "ANALYSIS",
        }
    }

    /// Accepts the canonical names and their `CCTK_` forms, in any case.
    pub fn parse(text: &str) -> Option<TimeBin> {
        let upper = text.to_ascii_uppercase();
        let bare = upper.strip_prefix("CCTK_").unwrap_or(&upper);
        TimeBin::ALL.into_iter().find(|b| b.name() == bare)
    }

    /// Bins repeated once per iteration of the main loop.
    pub fn per_iteration(self) -> bool {
        self >= TimeBin::Prestep
    }
}

impl fmt::Display for TimeBin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleNode {
    Leaf { owner: Identifier, item: ScheduleItem },
    Group { owner: Identifier, item: ScheduleItem, children: Vec<ScheduleNode> },
}

impl ScheduleNode {
    pub fn owner(&self) -> &Identifier {
        match self {
            ScheduleNode::Leaf { owner, .. } | ScheduleNode::Group { owner, .. } => owner,
        }
    }

    pub fn item(&self) -> &ScheduleItem {
        match self {
            ScheduleNode::Leaf { item, .. } | ScheduleNode::Group { item, .. } => item,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScheduleTree {
    pub bins: BTreeMap<TimeBin, Vec<ScheduleNode>>,
    /// Ignored BEFORE/AFTER references.
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("item `{item}` of thorn `{owner}` is scheduled at unknown bin `{bin}`")]
    UnknownBin { owner: Identifier, item: Identifier, bin: Identifier },
    #[error("item `{item}` of thorn `{owner}` is scheduled in `{group}`, which is not a declared schedule group")]
    UnknownGroup { owner: Identifier, item: Identifier, group: Identifier },
    #[error("schedule item `{name}` is declared by both `{first}` and `{second}`")]
    DuplicateItem { name: Identifier, first: Identifier, second: Identifier },
    #[error("ordering cycle: {}", .items.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(" -> "))]
    CycleDetected { items: Vec<Identifier> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Parent {
    Bin(TimeBin),
    Group(usize),
}

/// Builds the tree from the schedule items of the active thorns.
pub fn build_schedule_tree(world: &World, config: &ActiveConfiguration) -> Result<ScheduleTree, ScheduleError> {
    let items = config
        .thornlist
        .thorns
        .iter()
        .filter_map(|t| world.thorn(t))
        .flat_map(|t| t.schedule.iter().map(move |item| (t.name.clone(), item.clone())))
        .collect();
    build_tree_from_items(items)
}

/// Builds the tree from (owner thorn, item) pairs.
pub fn build_tree_from_items(items: Vec<(Identifier, ScheduleItem)>) -> Result<ScheduleTree, ScheduleError> {
    let mut index: BTreeMap<Identifier, usize> = BTreeMap::new();
    for (i, (owner, item)) in items.iter().enumerate() {
        if let Some(&j) = index.get(&item.name) {
            return Err(ScheduleError::DuplicateItem {
                name: item.name.clone(),
                first: items[j].0.clone(),
                second: owner.clone(),
            });
        }
        index.insert(item.name.clone(), i);
    }

    let mut parents = Vec::with_capacity(items.len());
    for (owner, item) in &items {
        parents.push(match &item.anchor {
            ScheduleAnchor::AtBin { bin } => Parent::Bin(TimeBin::parse(bin.as_str()).ok_or_else(|| {
                ScheduleError::UnknownBin { owner: owner.clone(), item: item.name.clone(), bin: bin.clone() }
            })?),
            ScheduleAnchor::InGroup { group } => match index.get(group) {
                Some(&g) if items[g].1.is_group => Parent::Group(g),
                _ => {
                    return Err(ScheduleError::UnknownGroup {
                        owner: owner.clone(),
                        item: item.name.clone(),
                        group: group.clone(),
                    })
                }
            },
        });
    }
    check_containment(&items, &parents)?;

    let mut siblings: BTreeMap<Parent, Vec<usize>> = BTreeMap::new();
    for (i, p) in parents.iter().enumerate() {
        siblings.entry(*p).or_default().push(i);
    }
    let mut warnings = Vec::new();
    let mut ordered: BTreeMap<Parent, Vec<usize>> = BTreeMap::new();
    for (parent, members) in &siblings {
        ordered.insert(*parent, order_list(&items, members, &mut warnings)?);
    }

    fn build(i: usize, items: &[(Identifier, ScheduleItem)], ordered: &BTreeMap<Parent, Vec<usize>>) -> ScheduleNode {
        let (owner, item) = items[i].clone();
        if item.is_group {
            let children = ordered
                .get(&Parent::Group(i))
                .map(|c| c.iter().map(|&j| build(j, items, ordered)).collect())
                .unwrap_or_default();
            ScheduleNode::Group { owner, item, children }
        } else {
            ScheduleNode::Leaf { owner, item }
        }
    }
    let mut bins = BTreeMap::new();
    for (parent, members) in &ordered {
        if let Parent::Bin(bin) = parent {
            bins.insert(*bin, members.iter().map(|&i| build(i, &items, &ordered)).collect());
        }
    }
    Ok(ScheduleTree { bins, warnings })
}

/// Every chain of IN anchors must end at a bin.
fn check_containment(items: &[(Identifier, ScheduleItem)], parents: &[Parent]) -> Result<(), ScheduleError> {
    for start in 0..items.len() {
        let mut seen = vec![start];
        let mut cur = start;
        while let Parent::Group(g) = parents[cur] {
            if let Some(pos) = seen.iter().position(|&s| s == g) {
                let mut cycle: Vec<usize> = seen[pos..].to_vec();
                let min = (0..cycle.len()).min_by_key(|&k| &items[cycle[k]].1.name).unwrap();
                cycle.rotate_left(min);
                return Err(ScheduleError::CycleDetected {
                    items: cycle.into_iter().map(|i| items[i].1.name.clone()).collect(),
                });
            }
            seen.push(g);
            cur = g;
        }
    }
    Ok(())
}

fn order_list(
    items: &[(Identifier, ScheduleItem)],
    members: &[usize],
    warnings: &mut Vec<Diagnostic>,
) -> Result<Vec<usize>, ScheduleError> {
    let local: BTreeMap<&Identifier, usize> = members.iter().enumerate().map(|(k, &i)| (&items[i].1.name, k)).collect();
    let mut constraints = BTreeSet::new();
    for (k, &i) in members.iter().enumerate() {
        let (owner, item) = &items[i];
        let refs = item.before.iter().map(|r| ("BEFORE", r)).chain(item.after.iter().map(|r| ("AFTER", r)));
        for (word, other) in refs {
            match local.get(other) {
                Some(&j) if word == "BEFORE" => {
                    constraints.insert((k, j));
                }
                Some(&j) => {
                    constraints.insert((j, k));
                }
                None => warnings.push(Diagnostic::warning(
                    DiagCode::IgnoredOrdering,
                    owner,
                    format!("{word} `{other}` on `{}` names no sibling item; ignored", item.name),
                )),
            }
        }
    }
    let keys: Vec<(&Identifier, &Identifier)> = members.iter().map(|&i| (&items[i].0, &items[i].1.name)).collect();
    let constraints: Vec<(usize, usize)> = constraints.into_iter().collect();
    match order_siblings(&keys, &constraints) {
        Ok(order) => Ok(order.into_iter().map(|k| members[k]).collect()),
        Err(cycle) => Err(ScheduleError::CycleDetected {
            items: cycle.into_iter().map(|k| items[members[k]].1.name.clone()).collect(),
        }),
    }
}
