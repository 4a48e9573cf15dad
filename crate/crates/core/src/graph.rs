//! Typed inter-thorn dependency graph, leaf analysis and DOT output.
//!
//! Edges point from the dependent thorn to the thorn that satisfies the
//! dependency, so a leaf (a thorn nothing depends on) has no incoming
//! resolved edge. A requirement with several providers fans out to one
//! edge per provider; one with none points at an unresolved pseudo-node.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ident::Identifier;
use crate::model::{Thorn, World};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeKind {
    Inherits,
    RequiresFunction,
    DirectThorn,
    SharesParameter,
    RequiresCapability,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 5] = [
        EdgeKind::Inherits,
        EdgeKind::RequiresFunction,
        EdgeKind::DirectThorn,
        EdgeKind::SharesParameter,
        EdgeKind::RequiresCapability,
    ];

    pub fn dot_style(self) -> &'static str {
        match self {
            EdgeKind::Inherits => "arrowhead=normal",
            EdgeKind::RequiresFunction => "arrowhead=box",
            EdgeKind::DirectThorn => "style=dotted",
            EdgeKind::SharesParameter => "arrowhead=odot",
            EdgeKind::RequiresCapability => "arrowhead=diamond",
        }
    }
}

/// What kind of name an unresolved requirement refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Domain {
    Implementation,
    Function,
    Capability,
    Thorn,
    Include,
}

impl Domain {
    pub fn label(self) -> &'static str {
        match self {
            Domain::Implementation => "implementation",
            Domain::Function => "function",
            Domain::Capability => "capability",
            Domain::Thorn => "thorn",
            Domain::Include => "include",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Thorn(Identifier),
    Unresolved { name: String, domain: Domain },
}

impl Target {
    pub fn thorn(&self) -> Option<&Identifier> {
        match self {
            Target::Thorn(t) => Some(t),
            Target::Unresolved { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Identifier,
    pub to: Target,
    pub kind: EdgeKind,
    /// Implementation, function, capability, thorn or file that induced the edge.
    pub via: String,
}

impl Edge {
    pub fn is_resolved(&self) -> bool {
        matches!(self.to, Target::Thorn(_))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<Identifier>,
    /// Sorted and free of duplicates.
    pub edges: Vec<Edge>,
    pub leaves: BTreeSet<Identifier>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("thorn `{0}` is not in the graph")]
    UnknownThorn(Identifier),
}

/// One declared dependency of a thorn, before provider lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Need<'a> {
    pub kind: EdgeKind,
    pub domain: Domain,
    pub name: &'a str,
}

/// Every hard requirement a thorn declares, in a fixed order: inherited
/// implementations, required functions, required thorns, used includes,
/// shared implementations and required capabilities. `USES FUNCTION` is
/// optional and not listed.
pub fn needs(thorn: &Thorn) -> Vec<Need<'_>> {
    let mut out = Vec::new();
    for imp in &thorn.inherits {
        out.push(Need { kind: EdgeKind::Inherits, domain: Domain::Implementation, name: imp.as_str() });
    }
    for f in thorn.required_functions() {
        out.push(Need { kind: EdgeKind::RequiresFunction, domain: Domain::Function, name: f.as_str() });
    }
    for t in &thorn.requires_thorns {
        out.push(Need { kind: EdgeKind::DirectThorn, domain: Domain::Thorn, name: t.as_str() });
    }
    for file in thorn.used_includes() {
        out.push(Need { kind: EdgeKind::DirectThorn, domain: Domain::Include, name: file });
    }
    for imp in thorn.shared_implementations() {
        out.push(Need { kind: EdgeKind::SharesParameter, domain: Domain::Implementation, name: imp.as_str() });
    }
    for c in thorn.required_capabilities() {
        out.push(Need { kind: EdgeKind::RequiresCapability, domain: Domain::Capability, name: c.as_str() });
    }
    out
}

/// Every thorn of `world` that satisfies a requirement named `name` in `domain`.
pub fn providers(world: &World, domain: Domain, name: &str) -> BTreeSet<Identifier> {
    let lookup = |index: &crate::model::ProviderIndex| {
        Identifier::new(name).ok().and_then(|id| index.get(&id).cloned()).unwrap_or_default()
    };
    match domain {
        Domain::Implementation => lookup(&world.providers_of_impl),
        Domain::Function => lookup(&world.providers_of_function),
        Domain::Capability => lookup(&world.providers_of_capability),
        Domain::Thorn => Identifier::new(name).ok().filter(|id| world.thorns.contains_key(id)).into_iter().collect(),
        Domain::Include => world.providers_of_include(name),
    }
}

/// Extracts the dependency graph, optionally restricted to a subset of thorns.
/// Names in `restrict_to` that are not thorns of the world are ignored.
pub fn extract_edges(world: &World, restrict_to: Option<&BTreeSet<Identifier>>) -> DependencyGraph {
    let in_scope = |t: &Identifier| restrict_to.is_none_or(|s| s.contains(t));
    let nodes: BTreeSet<Identifier> = world.thorns.keys().filter(|t| in_scope(t)).cloned().collect();

    let mut edges = BTreeSet::new();
    for name in &nodes {
        let thorn = &world.thorns[name];
        for need in needs(thorn) {
            let candidates: BTreeSet<Identifier> =
                providers(world, need.domain, need.name).into_iter().filter(|p| in_scope(p)).collect();
            // A thorn that satisfies its own requirement needs no edge.
            if candidates.contains(name) {
                continue;
            }
            if candidates.is_empty() {
                edges.insert(Edge {
                    from: name.clone(),
                    to: Target::Unresolved { name: need.name.to_string(), domain: need.domain },
                    kind: need.kind,
                    via: need.name.to_string(),
                });
            }
            for provider in candidates {
                edges.insert(Edge {
                    from: name.clone(),
                    to: Target::Thorn(provider),
                    kind: need.kind,
                    via: need.name.to_string(),
                });
            }
        }
    }

    let depended_on: BTreeSet<&Identifier> = edges.iter().filter_map(|e| e.to.thorn()).collect();
    let leaves = nodes.iter().filter(|n| !depended_on.contains(n)).cloned().collect();
    DependencyGraph { nodes, edges: edges.into_iter().collect(), leaves }
}

/// Thorns with a resolved edge pointing at `thorn`.
pub fn dependents(graph: &DependencyGraph, thorn: &Identifier) -> Result<BTreeSet<Identifier>, GraphError> {
    if !graph.nodes.contains(thorn) {
        return Err(GraphError::UnknownThorn(thorn.clone()));
    }
    Ok(graph.edges.iter().filter(|e| e.to.thorn() == Some(thorn)).map(|e| e.from.clone()).collect())
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn unresolved_id(name: &str, domain: Domain) -> String {
    format!("?{}:{}", domain.label(), name.to_ascii_lowercase())
}

/// Renders the graph as a DOT digraph. Node names are lowercased and every
/// statement list is sorted, so equal graphs give byte-identical text.
pub fn emit_dot(graph: &DependencyGraph, shade_leaves: bool) -> String {
    let mut nodes: Vec<String> = Vec::new();
    for n in &graph.nodes {
        let id = dot_id(n.folded());
        if shade_leaves && graph.leaves.contains(n) {
            nodes.push(format!("{id} [style=filled, fillcolor=gray85];"));
        } else {
            nodes.push(format!("{id};"));
        }
    }
    let mut unresolved: BTreeSet<(String, String)> = BTreeSet::new();
    let mut edge_lines: BTreeSet<String> = BTreeSet::new();
    for e in &graph.edges {
        let to = match &e.to {
            Target::Thorn(t) => t.folded().to_string(),
            Target::Unresolved { name, domain } => {
                let id = unresolved_id(name, *domain);
                unresolved.insert((id.clone(), format!("?{name}")));
                id
            }
        };
        edge_lines.insert(format!("{} -> {} [{}];", dot_id(e.from.folded()), dot_id(&to), e.kind.dot_style()));
    }
    for (id, label) in unresolved {
        nodes.push(format!("{} [shape=octagon, label={}];", dot_id(&id), dot_id(&label)));
    }
    nodes.sort_by_key(|l| l.to_ascii_lowercase());

    let mut out = String::from("digraph thorns {\n");
    for line in nodes.iter().chain(edge_lines.iter()) {
        writeln!(out, "  {line}").unwrap();
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    pub via: String,
    pub resolved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<JsonEdge>,
    pub leaves: Vec<String>,
}

impl DependencyGraph {
    pub fn to_json_value(&self) -> JsonGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let (to, domain) = match &e.to {
                    Target::Thorn(t) => (t.to_string(), None),
                    Target::Unresolved { name, domain } => (name.clone(), Some(*domain)),
                };
                JsonEdge {
                    from: e.from.to_string(),
                    to,
                    kind: e.kind,
                    via: e.via.clone(),
                    resolved: e.is_resolved(),
                    domain,
                }
            })
            .collect();
        JsonGraph {
            nodes: self.nodes.iter().map(ToString::to_string).collect(),
            edges,
            leaves: self.leaves.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("graph serializes") + "\n"
    }
}
