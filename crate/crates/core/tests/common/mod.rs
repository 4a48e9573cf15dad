//! Helpers shared by the integration tests: fixture paths, random worlds
//! and brute-force reference implementations that do not reuse library code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use cclkit_core::corpus::load_corpus;
use cclkit_core::graph::{DependencyGraph, EdgeKind, Target};
use cclkit_core::model::*;
use cclkit_core::schedule::TraceEvent;
use cclkit_core::Identifier;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn id(s: &str) -> Identifier {
    Identifier::new(s).unwrap()
}

pub fn load_world(rel: &str) -> World {
    build_world(load_corpus(&fixtures().join(rel)).unwrap())
}

pub fn names(set: impl IntoIterator<Item = Identifier>) -> Vec<String> {
    set.into_iter().map(|i| i.folded().to_string()).collect()
}

// ---------------------------------------------------------------------------
// Random worlds

const IMPLS: [&str; 5] = ["i0", "i1", "i2", "i3", "i4"];
const FUNCS: [&str; 3] = ["f0", "f1", "f2"];
const CAPS: [&str; 2] = ["c0", "c1"];
const FILES: [&str; 2] = ["h0.h", "h1.h"];

fn pick<'a>(rng: &mut StdRng, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).unwrap()
}

fn shared_param(imp: &str) -> Parameter {
    Parameter {
        name: id("p"),
        data_type: CctkDataType { base: BaseType::Int, size_bytes: None },
        scope: ParamScope::Private,
        ranges: vec![],
        default: String::new(),
        steerable: false,
        origin: ParamOrigin::Uses(id(imp)),
        description: String::new(),
    }
}

/// A world of `n` thorns with random declarations drawn from small name
/// pools. With `unique`, every implementation, function, capability and
/// include file has at most one provider.
pub fn random_thorns(seed: u64, n: usize, unique: bool) -> Vec<Thorn> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut thorns = Vec::new();
    let mut taken_funcs = BTreeSet::new();
    let mut taken_caps = BTreeSet::new();
    let mut taken_files = BTreeSet::new();
    for k in 0..n {
        let imp = if unique { format!("u{k}") } else { pick(&mut rng, &IMPLS).to_string() };
        let mut t = Thorn::new(id(&format!("T{k}")), id("arr"), id(&imp));
        let req_pool: Vec<String> = if unique {
            (0..n).map(|j| format!("u{j}")).chain(["ghost".to_string()]).collect()
        } else {
            IMPLS.iter().map(|s| s.to_string()).collect()
        };
        let req_pool: Vec<&str> = req_pool.iter().map(String::as_str).collect();

        for _ in 0..rng.gen_range(0..=2) {
            let i = id(pick(&mut rng, &req_pool));
            if !t.inherits.contains(&i) && i != t.implements {
                t.inherits.push(i);
            }
        }
        for f in FUNCS {
            match rng.gen_range(0..8) {
                0 => t.functions.push(AliasedFunction { name: id(f), relation: FunctionRelation::Requires }),
                1 => t.functions.push(AliasedFunction { name: id(f), relation: FunctionRelation::Uses }),
                2..=4 if !unique || taken_funcs.insert(f) => t.functions.push(AliasedFunction {
                    name: id(f),
                    relation: FunctionRelation::Provides { routine: id(&format!("{f}_{k}")), language: "C".into() },
                }),
                _ => {}
            }
        }
        for c in CAPS {
            match rng.gen_range(0..7) {
                0 => t.capabilities.push(Capability { name: id(c), relation: CapabilityRelation::Requires }),
                1..=2 if !unique || taken_caps.insert(c) => t.capabilities.push(Capability {
                    name: id(c),
                    relation: CapabilityRelation::Provides { script: "s.sh".into(), language: "bash".into() },
                }),
                _ => {}
            }
        }
        for file in FILES {
            match rng.gen_range(0..7) {
                0 => t.includes.push(IncludeDecl::Uses { file: file.into() }),
                1..=2 if !unique || taken_files.insert(file) => {
                    t.includes.push(IncludeDecl::ProvidesInto { fragment: format!("frag{k}.h"), target: file.into() })
                }
                _ => {}
            }
        }
        if rng.gen_bool(0.3) {
            t.requires_thorns.push(id(&format!("T{}", rng.gen_range(0..n + 1))));
        }
        if rng.gen_bool(0.3) {
            t.parameters.push(shared_param(pick(&mut rng, &req_pool)));
        }
        thorns.push(t);
    }
    thorns
}

// ---------------------------------------------------------------------------
// Graph oracle

pub type EdgeTuple = (String, String, EdgeKind, String);

/// Edge kind, target domain label, folded requirement name and a test
/// for whether a thorn satisfies the requirement.
type Declaration = (EdgeKind, &'static str, String, Box<dyn Fn(&Thorn) -> bool>);

/// Enumerates every (thorn, declaration, candidate) triple directly from the
/// thorn records.
pub fn oracle_edges(thorns: &BTreeMap<Identifier, Thorn>, scope: Option<&BTreeSet<String>>) -> BTreeSet<EdgeTuple> {
    let fold = |s: &str| s.to_ascii_lowercase();
    let in_scope = |name: &str| scope.is_none_or(|s| s.contains(&fold(name)));
    let mut out = BTreeSet::new();
    for t in thorns.values().filter(|t| in_scope(t.name.as_str())) {
        let mut decls: Vec<Declaration> = Vec::new();
        for i in &t.inherits {
            let i = fold(i.as_str());
            decls.push((
                EdgeKind::Inherits,
                "implementation",
                i.clone(),
                Box::new(move |p| fold(p.implements.as_str()) == i),
            ));
        }
        for f in &t.functions {
            if f.relation == FunctionRelation::Requires {
                let n = fold(f.name.as_str());
                decls.push((
                    EdgeKind::RequiresFunction,
                    "function",
                    n.clone(),
                    Box::new(move |p| {
                        p.functions.iter().any(|g| {
                            fold(g.name.as_str()) == n && matches!(g.relation, FunctionRelation::Provides { .. })
                        })
                    }),
                ));
            }
        }
        for r in &t.requires_thorns {
            let n = fold(r.as_str());
            decls.push((EdgeKind::DirectThorn, "thorn", n.clone(), Box::new(move |p| fold(p.name.as_str()) == n)));
        }
        for inc in &t.includes {
            if let IncludeDecl::Uses { file } = inc {
                let file = file.clone();
                decls.push((
                    EdgeKind::DirectThorn,
                    "include",
                    file.to_ascii_lowercase(),
                    Box::new(move |p| {
                        p.includes
                            .iter()
                            .any(|i| matches!(i, IncludeDecl::ProvidesInto { target, .. } if *target == file))
                    }),
                ));
            }
        }
        let mut shared = BTreeSet::new();
        for p in &t.parameters {
            if let ParamOrigin::Uses(i) | ParamOrigin::Extends(i) = &p.origin {
                shared.insert(fold(i.as_str()));
            }
        }
        for i in shared {
            decls.push((
                EdgeKind::SharesParameter,
                "implementation",
                i.clone(),
                Box::new(move |p| fold(p.implements.as_str()) == i),
            ));
        }
        for c in &t.capabilities {
            if c.relation == CapabilityRelation::Requires {
                let n = fold(c.name.as_str());
                decls.push((
                    EdgeKind::RequiresCapability,
                    "capability",
                    n.clone(),
                    Box::new(move |p| {
                        p.capabilities.iter().any(|d| {
                            fold(d.name.as_str()) == n && matches!(d.relation, CapabilityRelation::Provides { .. })
                        })
                    }),
                ));
            }
        }

        let from = fold(t.name.as_str());
        for (kind, domain, key, satisfies) in decls {
            let cands: Vec<&Thorn> = thorns.values().filter(|p| in_scope(p.name.as_str()) && satisfies(p)).collect();
            if cands.iter().any(|p| p.name == t.name) {
                continue;
            }
            if cands.is_empty() {
                out.insert((from.clone(), format!("?{domain}:{key}"), kind, key.clone()));
            }
            for p in cands {
                out.insert((from.clone(), fold(p.name.as_str()), kind, key.clone()));
            }
        }
    }
    out
}

/// The library graph in the oracle's tuple form.
pub fn graph_tuples(graph: &DependencyGraph) -> BTreeSet<EdgeTuple> {
    graph
        .edges
        .iter()
        .map(|e| {
            let to = match &e.to {
                Target::Thorn(t) => t.folded().to_string(),
                Target::Unresolved { name, domain } => format!("?{}:{}", domain.label(), name.to_ascii_lowercase()),
            };
            (e.from.folded().to_string(), to, e.kind, e.via.to_ascii_lowercase())
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Resolution oracle

/// Does `set` satisfy every requirement of its members, with at most one
/// provider per capability? Computed from the oracle edge enumeration.
pub fn closed_and_unique(thorns: &BTreeMap<Identifier, Thorn>, set: &BTreeSet<String>) -> bool {
    let all = oracle_edges(thorns, None);
    let mut needs: BTreeMap<(String, EdgeKind, String), Vec<String>> = BTreeMap::new();
    for (from, to, kind, via) in &all {
        if set.contains(from) {
            needs.entry((from.clone(), *kind, via.clone())).or_default().push(to.clone());
        }
    }
    let closed = needs.values().all(|targets| targets.iter().any(|t| set.contains(t)));
    let mut cap_providers: BTreeMap<String, usize> = BTreeMap::new();
    for t in thorns.values().filter(|t| set.contains(t.name.folded())) {
        for c in &t.capabilities {
            if matches!(c.relation, CapabilityRelation::Provides { .. }) {
                *cap_providers.entry(c.name.folded().to_string()).or_default() += 1;
            }
        }
    }
    closed && cap_providers.values().all(|&n| n <= 1)
}

/// Smallest closed, capability-unique superset of `seeds` by exhaustive
/// subset enumeration.
pub fn brute_closure(thorns: &BTreeMap<Identifier, Thorn>, seeds: &[String]) -> Option<BTreeSet<String>> {
    let all: Vec<String> = thorns.keys().map(|k| k.folded().to_string()).collect();
    assert!(all.len() <= 12, "exhaustive search only for small worlds");
    let mut best: Option<BTreeSet<String>> = None;
    for mask in 0u32..(1 << all.len()) {
        let set: BTreeSet<String> =
            all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, n)| n.clone()).collect();
        if !seeds.iter().all(|s| set.contains(s)) {
            continue;
        }
        if best.as_ref().is_some_and(|b| b.len() <= set.len()) {
            continue;
        }
        if closed_and_unique(thorns, &set) {
            best = Some(set);
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Ordering oracle

/// Lexicographically least valid permutation by exhaustive enumeration.
pub fn brute_lex_least<K: Ord + Clone>(keys: &[K], constraints: &[(usize, usize)]) -> Option<Vec<usize>> {
    fn permute(rest: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            permute(rest, prefix, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut perms = Vec::new();
    permute(&mut (0..keys.len()).collect(), &mut Vec::new(), &mut perms);
    perms
        .into_iter()
        .filter(|p| {
            let pos: Vec<usize> = {
                let mut pos = vec![0; p.len()];
                for (idx, &x) in p.iter().enumerate() {
                    pos[x] = idx;
                }
                pos
            };
            constraints.iter().all(|&(a, b)| pos[a] < pos[b])
        })
        .min_by(|a, b| {
            let ka: Vec<&K> = a.iter().map(|&i| &keys[i]).collect();
            let kb: Vec<&K> = b.iter().map(|&i| &keys[i]).collect();
            ka.cmp(&kb)
        })
}

// ---------------------------------------------------------------------------
// Trace validator

/// Name of the schedule item an event belongs to, for events that open or
/// report an item.
fn item_of(ev: &TraceEvent) -> Option<String> {
    match ev {
        TraceEvent::Call { routine, .. } => Some(routine.folded().to_string()),
        TraceEvent::EnterGroup { group, .. } => Some(group.folded().to_string()),
        TraceEvent::SkippedIf { item } => Some(item.folded().to_string()),
        _ => None,
    }
}

/// Checks a trace against the schedule items it was produced from, without
/// using the scheduler. Returns one message per violation.
pub fn validate_trace(
    items: &[(Identifier, ScheduleItem)],
    trace: &[TraceEvent],
    requested: &BTreeSet<String>,
) -> Vec<String> {
    let mut problems = Vec::new();
    let by_name: BTreeMap<String, &ScheduleItem> =
        items.iter().map(|(_, i)| (i.name.folded().to_string(), i)).collect();

    // Balanced nesting of bins, groups and storage.
    let mut stack: Vec<String> = Vec::new();
    for (k, ev) in trace.iter().enumerate() {
        let (open, close) = match ev {
            TraceEvent::EnterBin { bin, iteration } => (Some(format!("bin {bin} {iteration}")), None),
            TraceEvent::LeaveBin { bin, iteration } => (None, Some(format!("bin {bin} {iteration}"))),
            TraceEvent::EnterGroup { group, .. } => (Some(format!("group {}", group.folded())), None),
            TraceEvent::LeaveGroup { group, .. } => (None, Some(format!("group {}", group.folded()))),
            TraceEvent::StorageOn { group } => (Some(format!("storage {}", group.folded())), None),
            TraceEvent::StorageOff { group } => (None, Some(format!("storage {}", group.folded()))),
            _ => (None, None),
        };
        if let Some(o) = open {
            stack.push(o);
        }
        if let Some(c) = close {
            if stack.pop().as_deref() != Some(c.as_str()) {
                problems.push(format!("event {k}: unbalanced close of {c}"));
            }
        }
    }
    if !stack.is_empty() {
        problems.push(format!("unclosed: {stack:?}"));
    }

    // Split into bin instances.
    let mut instances: Vec<(String, Vec<(usize, &TraceEvent)>)> = Vec::new();
    for (k, ev) in trace.iter().enumerate() {
        match ev {
            TraceEvent::EnterBin { bin, .. } => instances.push((bin.to_string(), Vec::new())),
            _ => {
                if let Some(last) = instances.last_mut() {
                    last.1.push((k, ev));
                }
            }
        }
    }

    for (bin, events) in &instances {
        let first: BTreeMap<String, usize> = {
            let mut m = BTreeMap::new();
            for (k, ev) in events {
                if let Some(name) = item_of(ev) {
                    m.entry(name).or_insert(*k);
                }
            }
            m
        };
        // Declared BEFORE/AFTER pairs between siblings.
        for (name, item) in &by_name {
            let pairs = item
                .before
                .iter()
                .map(|o| (name.clone(), o.folded().to_string()))
                .chain(item.after.iter().map(|o| (o.folded().to_string(), name.clone())));
            for (a, b) in pairs {
                let (Some(ia), Some(ib)) = (by_name.get(&a), by_name.get(&b)) else { continue };
                if ia.anchor != ib.anchor {
                    continue;
                }
                if let (Some(pa), Some(pb)) = (first.get(&a), first.get(&b)) {
                    if pa >= pb {
                        problems.push(format!("{bin}: `{a}` should precede `{b}`"));
                    }
                }
            }
        }
        // ANALYSIS leaves run only on request.
        if bin == "ANALYSIS" {
            for (_, ev) in events {
                if let TraceEvent::Call { routine, .. } = ev {
                    if !requested.contains(routine.folded()) {
                        problems.push(format!("unrequested analysis routine `{routine}` called"));
                    }
                }
                if let TraceEvent::SkippedIf { item } = ev {
                    let is_leaf = by_name.get(item.folded()).is_some_and(|i| !i.is_group);
                    if is_leaf && requested.contains(item.folded()) && by_name[item.folded()].if_vars.is_empty() {
                        problems.push(format!("requested analysis routine `{item}` skipped"));
                    }
                }
            }
        }
    }

    // WHILE pass counts and the placement of storage and sync events.
    for (k, ev) in trace.iter().enumerate() {
        let TraceEvent::LoopWhile { item, passes } = ev else { continue };
        let name = item.folded();
        let decl = by_name[name];
        // Walk back to the StorageOn block (or start) of this item.
        let mut depth = 0i32;
        let mut bodies = 0u32;
        let mut j = k;
        while j > 0 {
            j -= 1;
            match &trace[j] {
                TraceEvent::LeaveGroup { .. } => depth += 1,
                TraceEvent::EnterGroup { group, .. } => {
                    depth -= 1;
                    if depth < 0 {
                        break;
                    }
                    if depth == 0 && group.folded() == name {
                        bodies += 1;
                    }
                }
                TraceEvent::Call { routine, .. } if depth == 0 && routine.folded() == name => bodies += 1,
                TraceEvent::EnterBin { .. } => break,
                _ => {}
            }
        }
        if bodies != *passes {
            problems.push(format!("`{item}` reports {passes} passes but ran {bodies}"));
        }
        if !decl.storage.is_empty() {
            let offs: Vec<&TraceEvent> = trace[k + 1..k + 1 + decl.storage.len()].iter().collect();
            let expected: Vec<TraceEvent> =
                decl.storage.iter().rev().map(|g| TraceEvent::StorageOff { group: g.clone() }).collect();
            if offs.into_iter().cloned().collect::<Vec<_>>() != expected {
                problems.push(format!("`{item}` storage not released right after its loop"));
            }
        }
    }
    for (k, ev) in trace.iter().enumerate() {
        let TraceEvent::Call { routine, .. } = ev else { continue };
        let decl = by_name[routine.folded()];
        let syncs: Vec<TraceEvent> = decl.sync.iter().map(|g| TraceEvent::Sync { group: g.clone() }).collect();
        if trace.get(k + 1..k + 1 + syncs.len()).map(|s| s.to_vec()) != Some(syncs) {
            problems.push(format!("event {k}: `{routine}` not followed by its syncs"));
        }
        if decl.while_vars.is_empty() && !decl.storage.is_empty() {
            let ons: Vec<TraceEvent> =
                decl.storage.iter().map(|g| TraceEvent::StorageOn { group: g.clone() }).collect();
            if k < ons.len() || trace[k - ons.len()..k] != ons[..] {
                problems.push(format!("event {k}: `{routine}` not preceded by its storage"));
            }
        }
    }
    problems
}
