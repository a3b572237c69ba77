use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(
            Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

pub(crate) use string_id;

string_id!(
    /// Globally unique node identity.
    NodeId
);
string_id!(
    /// Globally unique edge identity. Disjoint from node ids within a store.
    EdgeId
);
string_id!(
    /// Name of a node or edge type in a [`TypeGraph`].
    TypeId
);

/// Declared endpoints of an edge type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeTypeDecl {
    pub source: TypeId,
    pub target: TypeId,
}

/// A type graph: node types plus edge types with declared endpoint types.
///
/// Node and edge type names share one namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeGraph {
    node_types: Vec<TypeId>,
    edge_types: BTreeMap<TypeId, EdgeTypeDecl>,
}

impl TypeGraph {
    pub fn new(
        node_types: impl IntoIterator<Item = TypeId>,
        edge_types: impl IntoIterator<Item = (TypeId, EdgeTypeDecl)>,
    ) -> Result<Self, GraphError> {
        let mut nodes: Vec<TypeId> = Vec::new();
        for t in node_types {
            if nodes.contains(&t) {
                return Err(GraphError::DuplicateType(t.0));
            }
            nodes.push(t);
        }
        nodes.sort();
        let mut edges = BTreeMap::new();
        for (t, decl) in edge_types {
            if nodes.binary_search(&t).is_ok() || edges.contains_key(&t) {
                return Err(GraphError::DuplicateType(t.0));
            }
            for end in [&decl.source, &decl.target] {
                if nodes.binary_search(end).is_err() {
                    return Err(GraphError::UndeclaredEndpointType {
                        edge_type: t.0.clone(),
                        node_type: end.0.clone(),
                    });
                }
            }
            edges.insert(t, decl);
        }
        Ok(Self {
            node_types: nodes,
            edge_types: edges,
        })
    }

    pub fn empty() -> Self {
        Self {
            node_types: Vec::new(),
            edge_types: BTreeMap::new(),
        }
    }

    /// Sorted node types.
    pub fn node_types(&self) -> &[TypeId] {
        &self.node_types
    }

    pub fn edge_types(&self) -> &BTreeMap<TypeId, EdgeTypeDecl> {
        &self.edge_types
    }

    pub fn has_node_type(&self, t: &str) -> bool {
        self.node_types
            .binary_search_by(|x| x.as_str().cmp(t))
            .is_ok()
    }

    pub fn edge_type(&self, t: &str) -> Option<&EdgeTypeDecl> {
        self.edge_types.get(t)
    }
}
