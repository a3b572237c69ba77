use thiserror::Error;

use crate::graph::{EdgeId, NodeId};
use crate::versioning::VersionId;

/// Errors raised while building or checking typed graphs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),
    #[error("unknown element id `{0}`")]
    UnknownElement(String),
    #[error("edge `{edge}` references undeclared node `{node}`")]
    UnknownEndpoint { edge: String, node: String },
    #[error("duplicate type id `{0}`")]
    DuplicateType(String),
    #[error("edge type `{edge_type}` references undeclared node type `{node_type}`")]
    UndeclaredEndpointType {
        edge_type: String,
        node_type: String,
    },
    #[error("edge `{0}` has an endpoint outside the model")]
    DanglingEdge(EdgeId),
    #[error("element `{0}` violates its declared typing")]
    TypeMismatch(String),
    #[error("element `{0}` has a type not declared in the type graph")]
    UnknownType(String),
    #[error("pattern and host are typed over different type graphs")]
    TypeGraphMismatch,
    #[error("models do not share one element store and type graph")]
    StoreMismatch,
    #[error("union of an empty model list")]
    EmptyUnion,
    #[error("pattern `{0}` is empty")]
    EmptyPattern(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VersioningError {
    #[error("duplicate version id `{0}`")]
    DuplicateVersion(VersionId),
    #[error("unknown version `{0}`")]
    UnknownVersion(VersionId),
    #[error("version graph contains a cycle through {}", join(.0))]
    CycleDetected(Vec<VersionId>),
    #[error("no root version precedes every other version")]
    NoCommonRoot,
    #[error("version `{version}` is not a valid model: {source}")]
    InvalidVersion {
        version: VersionId,
        #[source]
        source: GraphError,
    },
    #[error("latest common predecessors of `{0}` with itself are undefined")]
    SameVersion(VersionId),
    #[error("version `{0}` is not over the versioning's element store")]
    StoreMismatch(VersionId),
}

fn join(ids: &[VersionId]) -> String {
    ids.iter()
        .map(|v| v.as_str())
        .collect::<Vec<_>>()
        .join(" -> ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("modifications do not share a common source model")]
    SourceMismatch,
    #[error("strategy does not decide exactly the insert-delete conflicts (missing or extra: edge `{edge}`, node `{node}`)")]
    IncompleteStrategy { edge: EdgeId, node: NodeId },
    #[error("strategy yields an improper merge: edge `{0}` is dangling")]
    ImproperResult(EdgeId),
    #[error("more than {0} insert-delete conflicts; strategy enumeration refused")]
    TooManyConflicts(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MvmError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Versioning(#[from] VersioningError),
    #[error("mv-node `{0}` is not a structural node")]
    NotStructural(String),
    #[error("element `{0}` is both created and deleted entering the same version")]
    InconsistentPresence(String),
    #[error("type name `{0}` is derived twice in the multi-version type graph")]
    TypeNameClash(String),
}
