//! Toolkit for Cactus Configuration Language (CCL) thorn metadata.
//!
//! The crate parses the per-thorn CCL files into a semantic model, checks
//! cross-thorn consistency, extracts typed dependency graphs, resolves
//! thornlists from seed thorns and plans the rule-based schedule tree.

pub mod corpus;
pub mod graph;
pub mod ident;
pub mod model;
pub mod parse;
pub mod resolve;
pub mod schedule;

pub use ident::Identifier;
