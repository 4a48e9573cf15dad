//! Dry-run traversal of a schedule tree into a flat event trace.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::oracle::{ConditionOracle, OracleContext, OracleFailure};
use super::{ScheduleNode, ScheduleTree, TimeBin};
use crate::ident::Identifier;

/// Upper bound on WHILE passes of a single item.
pub const WHILE_PASS_CAP: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TraceEvent {
    EnterBin { bin: TimeBin, iteration: u32 },
    LeaveBin { bin: TimeBin, iteration: u32 },
    Call { routine: Identifier, thorn: Identifier },
    EnterGroup { group: Identifier, thorn: Identifier },
    LeaveGroup { group: Identifier, thorn: Identifier },
    StorageOn { group: Identifier },
    StorageOff { group: Identifier },
    Sync { group: Identifier },
    SkippedIf { item: Identifier },
    LoopWhile { item: Identifier, passes: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("item `{item}`: {failure}")]
    OracleFailure { item: Identifier, failure: OracleFailure },
    #[error("item `{item}` exceeded {WHILE_PASS_CAP} WHILE passes")]
    PassCapExceeded { item: Identifier },
}

struct Walker<'a, O> {
    oracle: &'a mut O,
    requested: &'a BTreeSet<Identifier>,
    out: Vec<TraceEvent>,
    bin: TimeBin,
    iteration: u32,
}

impl<O: ConditionOracle> Walker<'_, O> {
    fn eval(&mut self, var: &Identifier, item: &Identifier, pass: u32) -> Result<i64, TraceError> {
        let ctx = OracleContext { bin: self.bin, iteration: self.iteration, pass, item };
        self.oracle.evaluate(var, &ctx).map_err(|failure| TraceError::OracleFailure { item: item.clone(), failure })
    }

    /// All of `vars` nonzero, evaluated left to right and stopping at the first zero.
    fn all_hold(&mut self, vars: &[Identifier], item: &Identifier, pass: u32) -> Result<bool, TraceError> {
        for v in vars {
            if self.eval(v, item, pass)? == 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn node(&mut self, node: &ScheduleNode) -> Result<(), TraceError> {
        let item = node.item();
        let is_leaf = matches!(node, ScheduleNode::Leaf { .. });
        if is_leaf && self.bin == TimeBin::Analysis && !self.requested.contains(&item.name) {
            self.out.push(TraceEvent::SkippedIf { item: item.name.clone() });
            return Ok(());
        }
        if !self.all_hold(&item.if_vars, &item.name, 0)? {
            self.out.push(TraceEvent::SkippedIf { item: item.name.clone() });
            return Ok(());
        }
        for g in &item.storage {
            self.out.push(TraceEvent::StorageOn { group: g.clone() });
        }
        if item.while_vars.is_empty() {
            self.body(node)?;
        } else {
            let mut passes = 0;
            while self.all_hold(&item.while_vars, &item.name, passes)? {
                if passes == WHILE_PASS_CAP {
                    return Err(TraceError::PassCapExceeded { item: item.name.clone() });
                }
                self.body(node)?;
                passes += 1;
            }
            self.out.push(TraceEvent::LoopWhile { item: item.name.clone(), passes });
        }
        for g in item.storage.iter().rev() {
            self.out.push(TraceEvent::StorageOff { group: g.clone() });
        }
        Ok(())
    }

    /// One pass: the call or the group's children, then the syncs.
    fn body(&mut self, node: &ScheduleNode) -> Result<(), TraceError> {
        match node {
            ScheduleNode::Leaf { owner, item } => {
                self.out.push(TraceEvent::Call { routine: item.name.clone(), thorn: owner.clone() });
            }
            ScheduleNode::Group { owner, item, children } => {
                self.out.push(TraceEvent::EnterGroup { group: item.name.clone(), thorn: owner.clone() });
                for child in children {
                    self.node(child)?;
                }
                self.out.push(TraceEvent::LeaveGroup { group: item.name.clone(), thorn: owner.clone() });
            }
        }
        for g in &node.item().sync {
            self.out.push(TraceEvent::Sync { group: g.clone() });
        }
        Ok(())
    }

    fn bin(&mut self, tree: &ScheduleTree, bin: TimeBin, iteration: u32) -> Result<(), TraceError> {
        self.bin = bin;
        self.iteration = iteration;
        self.out.push(TraceEvent::EnterBin { bin, iteration });
        for node in tree.bins.get(&bin).map(Vec::as_slice).unwrap_or_default() {
            self.node(node)?;
        }
        self.out.push(TraceEvent::LeaveBin { bin, iteration });
        Ok(())
    }
}

/// Walks STARTUP, PARAMCHECK and INITIAL once, then the four loop bins
/// `iterations` times. ANALYSIS leaves run only when their name is in
/// `analysis_requested`.
pub fn traverse<O: ConditionOracle>(
    tree: &ScheduleTree,
    iterations: u32,
    oracle: &mut O,
    analysis_requested: &BTreeSet<Identifier>,
) -> Result<Vec<TraceEvent>, TraceError> {
    let mut w = Walker { oracle, requested: analysis_requested, out: Vec::new(), bin: TimeBin::Startup, iteration: 0 };
    for bin in TimeBin::ALL.into_iter().filter(|b| !b.per_iteration()) {
        w.bin(tree, bin, 0)?;
    }
    for it in 1..=iterations {
        for bin in TimeBin::ALL.into_iter().filter(|b| b.per_iteration()) {
            w.bin(tree, bin, it)?;
        }
    }
    Ok(w.out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed trace at event {index}: {reason}")]
pub struct MalformedTrace {
    pub index: usize,
    pub reason: String,
}

#[derive(Debug, PartialEq)]
enum Open<'a> {
    Bin(TimeBin, u32),
    Group(&'a Identifier),
    Storage(&'a Identifier, usize),
}

/// Pairs every StorageOn with its StorageOff. Bins, groups and storage
/// windows must nest properly.
pub fn storage_spans(trace: &[TraceEvent]) -> Result<BTreeMap<Identifier, Vec<(usize, usize)>>, MalformedTrace> {
    let mut stack: Vec<Open> = Vec::new();
    let mut spans: BTreeMap<Identifier, Vec<(usize, usize)>> = BTreeMap::new();
    for (index, ev) in trace.iter().enumerate() {
        let bad = |reason: String| MalformedTrace { index, reason };
        match ev {
            TraceEvent::EnterBin { bin, iteration } => stack.push(Open::Bin(*bin, *iteration)),
            TraceEvent::EnterGroup { group, .. } => stack.push(Open::Group(group)),
            TraceEvent::StorageOn { group } => stack.push(Open::Storage(group, index)),
            TraceEvent::LeaveBin { bin, iteration } => match stack.pop() {
                Some(Open::Bin(b, i)) if b == *bin && i == *iteration => {}
                other => return Err(bad(format!("LEAVE_BIN {bin} closes {other:?}"))),
            },
            TraceEvent::LeaveGroup { group, .. } => match stack.pop() {
                Some(Open::Group(g)) if g == group => {}
                other => return Err(bad(format!("LEAVE_GROUP {group} closes {other:?}"))),
            },
            TraceEvent::StorageOff { group } => match stack.pop() {
                Some(Open::Storage(g, start)) if g == group => {
                    spans.entry(group.clone()).or_default().push((start, index));
                }
                other => return Err(bad(format!("STORAGE_OFF {group} closes {other:?}"))),
            },
            TraceEvent::Call { .. }
            | TraceEvent::Sync { .. }
            | TraceEvent::SkippedIf { .. }
            | TraceEvent::LoopWhile { .. } => {}
        }
    }
    match stack.last() {
        Some(open) => Err(MalformedTrace { index: trace.len(), reason: format!("{open:?} never closed") }),
        None => Ok(spans),
    }
}

/// One event per line, `EVENT<TAB>args`.
pub fn trace_to_text(trace: &[TraceEvent]) -> String {
    let mut out = String::new();
    for ev in trace {
        match ev {
            TraceEvent::EnterBin { bin, iteration } => writeln!(out, "ENTER_BIN\t{bin}\t{iteration}"),
            TraceEvent::LeaveBin { bin, iteration } => writeln!(out, "LEAVE_BIN\t{bin}\t{iteration}"),
            TraceEvent::Call { routine, thorn } => writeln!(out, "CALL\t{routine}\t{thorn}"),
            TraceEvent::EnterGroup { group, thorn } => writeln!(out, "ENTER_GROUP\t{group}\t{thorn}"),
            TraceEvent::LeaveGroup { group, thorn } => writeln!(out, "LEAVE_GROUP\t{group}\t{thorn}"),
            TraceEvent::StorageOn { group } => writeln!(out, "STORAGE_ON\t{group}"),
            TraceEvent::StorageOff { group } => writeln!(out, "STORAGE_OFF\t{group}"),
            TraceEvent::Sync { group } => writeln!(out, "SYNC\t{group}"),
            TraceEvent::SkippedIf { item } => writeln!(out, "SKIPPED_IF\t{item}"),
            TraceEvent::LoopWhile { item, passes } => writeln!(out, "LOOP_WHILE\t{item}\t{passes}"),
        }
        .unwrap();
    }
    out
}

pub fn trace_to_json(trace: &[TraceEvent]) -> String {
    serde_json::to_string_pretty(trace).expect("trace serializes") + "\n"
}
