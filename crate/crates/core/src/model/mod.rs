//! Semantic domain types for CCL constructs and the World builder.

mod types;
mod value;
mod world;

pub use types::*;
pub use value::{
    check_range, parse_bool, validate_against, validate_parameter_value, MalformedRange, ParamValue, ValueError,
};
pub use world::{
    build_world, check_implementation_consistency, index_thorns, DiagCode, Diagnostic, Indices, ProviderIndex,
    Severity, World,
};
