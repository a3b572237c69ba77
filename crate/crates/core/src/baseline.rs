//! Single-version counterparts of the folded analyses: every version, every
//! version pair and every merge result is materialized and checked on its own.

use crate::analysis::{LcpMode, MergeConflictReport, MergeViolationReport, VersionedViolation};
use crate::error::GraphError;
use crate::graph::{find_in_index, HostIndex, Pattern};
use crate::merge::{insert_delete_pairs, merge_min};
use crate::versioning::{ModelModification, ModelVersioning};

pub fn pcheck_svm(
    v: &ModelVersioning,
    phi: &Pattern,
) -> Result<Vec<VersionedViolation>, GraphError> {
    let mut out = Vec::new();
    for (id, m) in v.models() {
        let host = HostIndex::new(m);
        out.extend(
            find_in_index(phi, &host)?
                .into_iter()
                .map(|matched| VersionedViolation {
                    version: id.clone(),
                    matched,
                }),
        );
    }
    Ok(out)
}

/// `(i, j, c)` with `i < j` and `c` a merge base under `mode`, plus the two
/// modifications `c => i` and `c => j`.
fn merges(
    v: &ModelVersioning,
    mode: LcpMode,
) -> impl Iterator<Item = (usize, usize, usize, ModelModification, ModelModification)> + '_ {
    let dag = v.dag();
    let table = dag.lcp_table();
    table.pairs().flat_map(move |(i, j, _)| {
        mode.bases(table, i, j)
            .iter()
            .map(move |&c| (i, j, c, v.mod_at(c, i), v.mod_at(c, j)))
    })
}

pub fn mcheck_svm(v: &ModelVersioning, mode: LcpMode) -> Vec<MergeConflictReport> {
    let dag = v.dag();
    let store = v.store();
    let mut out = Vec::new();
    for (i, j, c, m1, m2) in merges(v, mode) {
        for (e, n) in insert_delete_pairs(&m1, &m2) {
            out.push(MergeConflictReport {
                i: dag.id(i).clone(),
                j: dag.id(j).clone(),
                c: dag.id(c).clone(),
                edge: store.edge_id(e).clone(),
                node: store.node_id(n).clone(),
            });
        }
    }
    out
}

pub fn pcheck_m_svm(
    v: &ModelVersioning,
    phi: &Pattern,
    mode: LcpMode,
) -> Result<Vec<MergeViolationReport>, GraphError> {
    let dag = v.dag();
    let mut out = Vec::new();
    for (i, j, c, m1, m2) in merges(v, mode) {
        let merged = merge_min(&m1, &m2).expect("modifications share their source");
        let host = HostIndex::new(merged.merged());
        for matched in find_in_index(phi, &host)? {
            out.push(MergeViolationReport {
                i: dag.id(i).clone(),
                j: dag.id(j).clone(),
                c: dag.id(c).clone(),
                matched,
            });
        }
    }
    Ok(out)
}
