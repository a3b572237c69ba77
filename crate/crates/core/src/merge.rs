//! Three-way merge of two modifications sharing a source model.
//!
//! The default rules keep an element of the common source iff both sides
//! keep it, delete it iff either side deletes it and add every element
//! created by either side. An edge created on one side whose endpoint is
//! deleted on the other is an insert-delete conflict; a resolution reverts
//! either the edge creation or the node deletion for each such conflict.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::MergeError;
use crate::graph::{EdgeId, EdgeIx, Model, NodeId, NodeIx};
use crate::versioning::{ModelModification, VersionId};

/// Default cap on insert-delete conflicts for [`enumerate_strategies`].
pub const DEFAULT_STRATEGY_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    Node(NodeId),
    Edge(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Conflict {
    /// `edge` is created by one modification, its endpoint `node` deleted by the other.
    InsertDelete { edge: EdgeId, node: NodeId },
    /// Deleted by both sides; reported for information, never needs resolving.
    DeleteDelete(Element),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Decision {
    RevertEdgeCreation,
    RevertNodeDeletion,
}

/// One decision per insert-delete conflict, keyed by `(edge, node)`.
pub type Resolution = BTreeMap<(EdgeId, NodeId), Decision>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeResult {
    /// `common source <- K_m -> merged`.
    pub modification: ModelModification,
    pub applied: Resolution,
}

impl MergeResult {
    pub fn merged(&self) -> &Model {
        self.modification.target()
    }
}

fn check_source(m1: &ModelModification, m2: &ModelModification) -> Result<(), MergeError> {
    if m1.source() == m2.source() {
        Ok(())
    } else {
        Err(MergeError::SourceMismatch)
    }
}

/// Insert-delete pairs in `(edge, node)` id order; one pair per deleted endpoint.
pub(crate) fn insert_delete_pairs(
    m1: &ModelModification,
    m2: &ModelModification,
) -> Vec<(EdgeIx, NodeIx)> {
    let store = m1.source().store();
    let mut out = Vec::new();
    for (creator, deleter) in [(m1, m2), (m2, m1)] {
        for e in creator.created_edges() {
            let (s, t) = (store.source(e), store.target(e));
            if deleter.deletes_node(s) {
                out.push((e, s));
            }
            if t != s && deleter.deletes_node(t) {
                out.push((e, t));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// All conflicts between two modifications with a common source.
pub fn mcheck(m1: &ModelModification, m2: &ModelModification) -> Result<Vec<Conflict>, MergeError> {
    check_source(m1, m2)?;
    let store = m1.source().store();
    let mut out: Vec<Conflict> = insert_delete_pairs(m1, m2)
        .into_iter()
        .map(|(e, v)| Conflict::InsertDelete {
            edge: store.edge_id(e).clone(),
            node: store.node_id(v).clone(),
        })
        .collect();
    out.extend(
        m1.deleted_nodes()
            .filter(|&n| m2.deletes_node(n))
            .map(|n| Conflict::DeleteDelete(Element::Node(store.node_id(n).clone()))),
    );
    out.extend(
        m1.deleted_edges()
            .filter(|&e| !m2.target().contains_edge(e))
            .map(|e| Conflict::DeleteDelete(Element::Edge(store.edge_id(e).clone()))),
    );
    out.sort();
    Ok(out)
}

/// The merge under the default rules before any conflict handling (possibly improper).
fn default_merge(m1: &ModelModification, m2: &ModelModification) -> Model {
    let common = m1.source();
    let kept = m1
        .target()
        .intersection(m2.target())
        .expect("modifications share a store");
    let created1 = m1.target().difference(common).expect("shared store");
    let created2 = m2.target().difference(common).expect("shared store");
    kept.union(&created1)
        .and_then(|m| m.union(&created2))
        .expect("shared store")
}

fn merged_id(m1: &ModelModification, m2: &ModelModification) -> VersionId {
    let (a, b) = if m1.target_version <= m2.target_version {
        (&m1.target_version, &m2.target_version)
    } else {
        (&m2.target_version, &m1.target_version)
    };
    VersionId::new(format!("merge({a},{b})"))
}

fn apply(
    m1: &ModelModification,
    m2: &ModelModification,
    conflicts: &[(EdgeIx, NodeIx)],
    decide: impl Fn(usize) -> Decision,
) -> Model {
    let mut merged = default_merge(m1, m2);
    for (k, &(e, v)) in conflicts.iter().enumerate() {
        match decide(k) {
            Decision::RevertEdgeCreation => merged.remove_edge(e),
            Decision::RevertNodeDeletion => merged.insert_node(v),
        }
    }
    merged
}

fn finish(
    m1: &ModelModification,
    m2: &ModelModification,
    merged: Model,
    applied: Resolution,
) -> MergeResult {
    let modification = ModelModification::between(
        m1.source_version.clone(),
        m1.source().clone(),
        merged_id(m1, m2),
        merged,
    )
    .expect("shared store");
    MergeResult {
        modification,
        applied,
    }
}

/// Merges two modifications, resolving each insert-delete conflict as `strategy` says.
pub fn merge(
    m1: &ModelModification,
    m2: &ModelModification,
    strategy: &Resolution,
) -> Result<MergeResult, MergeError> {
    check_source(m1, m2)?;
    let store = m1.source().store();
    let conflicts = insert_delete_pairs(m1, m2);
    let keys: Vec<(EdgeId, NodeId)> = conflicts
        .iter()
        .map(|&(e, v)| (store.edge_id(e).clone(), store.node_id(v).clone()))
        .collect();
    if let Some((edge, node)) = keys
        .iter()
        .find(|k| !strategy.contains_key(*k))
        .or_else(|| strategy.keys().find(|k| !keys.contains(k)))
    {
        return Err(MergeError::IncompleteStrategy {
            edge: edge.clone(),
            node: node.clone(),
        });
    }
    let merged = apply(m1, m2, &conflicts, |k| strategy[&keys[k]]);
    if let Some(e) = merged.first_dangling_edge() {
        return Err(MergeError::ImproperResult(store.edge_id(e).clone()));
    }
    Ok(finish(m1, m2, merged, strategy.clone()))
}

/// Merge that reverts every conflicting edge creation, yielding the smallest result.
pub fn merge_min(
    m1: &ModelModification,
    m2: &ModelModification,
) -> Result<MergeResult, MergeError> {
    check_source(m1, m2)?;
    let store = m1.source().store();
    let conflicts = insert_delete_pairs(m1, m2);
    let merged = apply(m1, m2, &conflicts, |_| Decision::RevertEdgeCreation);
    debug_assert!(merged.is_proper());
    let applied = conflicts
        .iter()
        .map(|&(e, v)| {
            (
                (store.edge_id(e).clone(), store.node_id(v).clone()),
                Decision::RevertEdgeCreation,
            )
        })
        .collect();
    Ok(finish(m1, m2, merged, applied))
}

/// Every per-conflict decision vector whose merge is proper.
///
/// Vectors are produced in binary counting order over conflicts sorted by
/// `(edge, node)`, with `RevertEdgeCreation` as the zero digit; the first
/// entry is therefore the [`merge_min`] strategy.
pub fn enumerate_strategies(
    m1: &ModelModification,
    m2: &ModelModification,
    bound: usize,
) -> Result<Vec<Resolution>, MergeError> {
    check_source(m1, m2)?;
    let store = m1.source().store();
    let conflicts = insert_delete_pairs(m1, m2);
    if conflicts.len() > bound || conflicts.len() >= usize::BITS as usize {
        return Err(MergeError::TooManyConflicts(bound));
    }
    let decision = |mask: u64, k: usize| {
        if mask >> k & 1 == 1 {
            Decision::RevertNodeDeletion
        } else {
            Decision::RevertEdgeCreation
        }
    };
    let mut out = Vec::new();
    for mask in 0..(1u64 << conflicts.len()) {
        let merged = apply(m1, m2, &conflicts, |k| decision(mask, k));
        if merged.is_proper() {
            out.push(
                conflicts
                    .iter()
                    .enumerate()
                    .map(|(k, &(e, v))| {
                        (
                            (store.edge_id(e).clone(), store.node_id(v).clone()),
                            decision(mask, k),
                        )
                    })
                    .collect(),
            );
        }
    }
    Ok(out)
}
