//! Typed graphs over a shared element registry, and monomorphism search.

mod matcher;
mod model;
mod store;
mod types;

pub use matcher::{find_in_index, find_monomorphisms, pcheck, HostIndex, Match, Pattern};
pub(crate) use matcher::{raw_matches, RawMatch};
pub use model::{graph_union, validate_model, Model};
pub use store::{EdgeIx, ElementStore, NodeIx, StoreBuilder};
pub(crate) use types::string_id;
pub use types::{EdgeId, EdgeTypeDecl, NodeId, TypeGraph, TypeId};
