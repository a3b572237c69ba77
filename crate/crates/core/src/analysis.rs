//! Analyses answered directly on a [`MultiVersionModel`]: violations in every
//! version, insert-delete conflicts for every mergeable version pair, and
//! violations no conflict resolution can avoid in those merges.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{raw_matches, EdgeId, HostIndex, Match, NodeId, NodeIx, Pattern, RawMatch};
use crate::mvm::{reach_avoiding, trans_mv, Encoding, MultiVersionModel, Origin};
use crate::versioning::{LcpTable, VersionDag, VersionId};

/// Which latest common predecessors serve as merge bases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LcpMode {
    /// Every latest common predecessor.
    All,
    /// Only the smallest one by version id.
    Single,
}

impl LcpMode {
    pub(crate) fn bases<'t>(&self, table: &'t LcpTable, i: usize, j: usize) -> &'t [usize] {
        let all = table.get(i, j);
        match self {
            LcpMode::All => all,
            LcpMode::Single => &all[..all.len().min(1)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VersionedViolation {
    pub version: VersionId,
    #[serde(rename = "match")]
    pub matched: Match,
}

/// An insert-delete conflict between versions `i < j` merged over base `c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MergeConflictReport {
    pub i: VersionId,
    pub j: VersionId,
    pub c: VersionId,
    pub edge: EdgeId,
    pub node: NodeId,
}

/// A violation present in the deletion-favouring merge of `i < j` over base `c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MergeViolationReport {
    pub i: VersionId,
    pub j: VersionId,
    pub c: VersionId,
    #[serde(rename = "match")]
    pub matched: Match,
}

/// Matches of the translated pattern in the structural graph, with the
/// translated pattern for mapping them back.
fn mv_matches(
    mvm: &MultiVersionModel,
    phi: &Pattern,
) -> Result<(Encoding, Vec<RawMatch>), GraphError> {
    let q = trans_mv(phi.graph(), mvm.adapted())?;
    let host = HostIndex::new(mvm.structural().graph());
    let raws = raw_matches(q.graph(), &host)?;
    Ok((q, raws))
}

/// `origin ∘ m_mv ∘ origin_Q⁻¹` as an id-keyed match into the union of versions.
fn to_base_match(mvm: &MultiVersionModel, phi: &Pattern, q: &Encoding, raw: &RawMatch) -> Match {
    let pattern = phi.graph();
    let ps = pattern.store();
    let base = mvm.base_store();
    // q's graph is the full model of its store, so positions equal indices
    let image = |rep: NodeIx| mvm.structural().origin(raw.nodes[rep.index()]);
    Match {
        node_map: pattern
            .nodes()
            .map(|n| {
                let Origin::Node(h) = image(q.rep_of_node(n).expect("translated")) else {
                    unreachable!("node representatives map to node representatives")
                };
                (ps.node_id(n).clone(), base.node_id(h).clone())
            })
            .collect(),
        edge_map: pattern
            .edges()
            .map(|e| {
                let Origin::Edge(h) = image(q.rep_of_edge(e).expect("translated")) else {
                    unreachable!("edge representatives map to edge representatives")
                };
                (ps.edge_id(e).clone(), base.edge_id(h).clone())
            })
            .collect(),
    }
}

/// Violations of `phi` in every version, as `(version, match)` pairs.
pub fn pcheck_mv(
    mvm: &MultiVersionModel,
    phi: &Pattern,
) -> Result<Vec<VersionedViolation>, GraphError> {
    let (q, raws) = mv_matches(mvm, phi)?;
    let dag = mvm.dag();
    let mut out = Vec::new();
    for raw in &raws {
        let mut present = mvm.presence_bits(raw.nodes[0]).clone();
        for &h in &raw.nodes[1..] {
            present.intersect_with(mvm.presence_bits(h));
        }
        if present.is_clear() {
            continue;
        }
        let m = to_base_match(mvm, phi, &q, raw);
        out.extend(present.ones().map(|i| (i, m.clone())));
    }
    out.sort();
    Ok(out
        .into_iter()
        .map(|(i, matched)| VersionedViolation {
            version: dag.id(i).clone(),
            matched,
        })
        .collect())
}

/// Insert-delete conflicts for every version pair and merge base.
pub fn mcheck_mv(mvm: &MultiVersionModel, mode: LcpMode) -> Vec<MergeConflictReport> {
    let dag = mvm.dag();
    let table = dag.lcp_table();
    let enc = mvm.structural();
    let mv_store = enc.graph().store();
    let root = dag.root();
    let mut found: Vec<(usize, usize, usize, NodeIx, NodeIx)> = Vec::new();
    for v_e in mv_store.nodes() {
        if !matches!(enc.origin(v_e), Origin::Edge(_)) || mvm.cv(v_e).iter().all(|&c| c == root) {
            continue;
        }
        let created_in = mvm.presence_bits(v_e);
        let s = mv_store.target(enc.s_mv(v_e).expect("edge representative"));
        let t = mv_store.target(enc.t_mv(v_e).expect("edge representative"));
        let ends: &[NodeIx] = if s == t { &[s][..] } else { &[s, t][..] };
        for &v_s in ends {
            let endpoint_in = mvm.presence_bits(v_s);
            if created_in == endpoint_in {
                continue;
            }
            let deleted_in = reach_avoiding(dag, mvm.dv(v_s), mvm.cv(v_s));
            for i in created_in.ones() {
                for j in deleted_in.ones() {
                    if i == j {
                        continue;
                    }
                    for &c in mode.bases(table, i, j) {
                        if endpoint_in.contains(c) && !created_in.contains(c) {
                            found.push((i.min(j), i.max(j), c, v_e, v_s));
                        }
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found.dedup();
    found
        .into_iter()
        .map(|(i, j, c, v_e, v_s)| {
            let (Origin::Edge(e), Origin::Node(n)) = (enc.origin(v_e), enc.origin(v_s)) else {
                unreachable!("edge representative and endpoint")
            };
            MergeConflictReport {
                i: dag.id(i).clone(),
                j: dag.id(j).clone(),
                c: dag.id(c).clone(),
                edge: mvm.base_store().edge_id(e).clone(),
                node: mvm.base_store().node_id(n).clone(),
            }
        })
        .collect()
}

/// Candidate merges `(i, j, c)` in which every matched element survives.
fn merge_triples(
    dag: &VersionDag,
    table: &LcpTable,
    mode: LcpMode,
    sets: &[&FixedBitSet],
) -> Vec<(usize, usize, usize)> {
    let min_card = sets.iter().map(|s| s.count_ones(..)).min().unwrap_or(0);
    let mut firsts = FixedBitSet::with_capacity(dag.len());
    let mut seconds = FixedBitSet::with_capacity(dag.len());
    for s in sets {
        if s.count_ones(..) == min_card {
            firsts.union_with(s);
        }
        seconds.union_with(s);
    }
    let mut everywhere = FixedBitSet::with_capacity(dag.len());
    everywhere.insert_range(..);
    let mut out = Vec::new();
    for i in firsts.ones() {
        // when `i` holds the whole match the other side may hold none of it
        let partners = if sets.iter().all(|s| s.contains(i)) {
            &everywhere
        } else {
            &seconds
        };
        for j in partners.ones() {
            if i == j || !sets.iter().all(|s| s.contains(i) || s.contains(j)) {
                continue;
            }
            for &c in mode.bases(table, i, j) {
                if sets
                    .iter()
                    .all(|s| !s.contains(c) || (s.contains(i) && s.contains(j)))
                {
                    out.push((i.min(j), i.max(j), c));
                }
            }
        }
    }
    out
}

/// Violations of `phi` in the deletion-favouring merge result of every
/// version pair and merge base. These are exactly the violations that no
/// conflict resolution strategy avoids.
pub fn pcheck_m_mv(
    mvm: &MultiVersionModel,
    phi: &Pattern,
    mode: LcpMode,
) -> Result<Vec<MergeViolationReport>, GraphError> {
    let (q, raws) = mv_matches(mvm, phi)?;
    let dag = mvm.dag();
    let table = dag.lcp_table();
    let mut found: Vec<(usize, usize, usize, Match)> = Vec::new();
    for raw in &raws {
        let sets: Vec<&FixedBitSet> = raw.nodes.iter().map(|&h| mvm.presence_bits(h)).collect();
        let triples = merge_triples(dag, table, mode, &sets);
        if triples.is_empty() {
            continue;
        }
        let m = to_base_match(mvm, phi, &q, raw);
        found.extend(triples.into_iter().map(|(i, j, c)| (i, j, c, m.clone())));
    }
    found.sort();
    found.dedup();
    Ok(found
        .into_iter()
        .map(|(i, j, c, matched)| MergeViolationReport {
            i: dag.id(i).clone(),
            j: dag.id(j).clone(),
            c: dag.id(c).clone(),
            matched,
        })
        .collect())
}
