//! Version DAGs of models over one element store.
//!
//! Modifications are stored as `(from, to)` version pairs only. Because a
//! correct versioning uses maximally preserving spans with partial
//! identities, the preserved graph of every modification is the
//! intersection of its endpoint models and is derived on demand.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::{Arc, OnceLock};

use fixedbitset::FixedBitSet;

use crate::error::{GraphError, VersioningError};
use crate::graph::{string_id, validate_model, EdgeIx, ElementStore, Model, NodeIx, TypeGraph};

string_id!(
    /// Identity of a model version. Ordered lexicographically.
    VersionId
);

/// A span `source <- preserved -> target` whose morphisms are partial identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelModification {
    pub source_version: VersionId,
    pub target_version: VersionId,
    source: Model,
    target: Model,
    preserved: Model,
}

impl ModelModification {
    /// The maximally preserving modification between two models.
    pub fn between(
        source_version: VersionId,
        source: Model,
        target_version: VersionId,
        target: Model,
    ) -> Result<Self, GraphError> {
        let preserved = source.intersection(&target)?;
        Ok(Self {
            source_version,
            target_version,
            source,
            target,
            preserved,
        })
    }

    pub fn source(&self) -> &Model {
        &self.source
    }

    pub fn target(&self) -> &Model {
        &self.target
    }

    pub fn preserved(&self) -> &Model {
        &self.preserved
    }

    pub fn deleted_nodes(&self) -> impl Iterator<Item = NodeIx> + '_ {
        self.source
            .nodes()
            .filter(|&n| !self.preserved.contains_node(n))
    }

    pub fn deleted_edges(&self) -> impl Iterator<Item = EdgeIx> + '_ {
        self.source
            .edges()
            .filter(|&e| !self.preserved.contains_edge(e))
    }

    pub fn created_nodes(&self) -> impl Iterator<Item = NodeIx> + '_ {
        self.target
            .nodes()
            .filter(|&n| !self.preserved.contains_node(n))
    }

    pub fn created_edges(&self) -> impl Iterator<Item = EdgeIx> + '_ {
        self.target
            .edges()
            .filter(|&e| !self.preserved.contains_edge(e))
    }

    pub fn deletes_node(&self, n: NodeIx) -> bool {
        self.source.contains_node(n) && !self.target.contains_node(n)
    }

    pub fn creates_edge(&self, e: EdgeIx) -> bool {
        self.target.contains_edge(e) && !self.source.contains_edge(e)
    }
}

/// Latest common predecessors for every unordered version pair, keyed by index.
#[derive(Debug, Clone)]
pub struct LcpTable {
    n: usize,
    entries: Vec<Vec<usize>>,
}

impl LcpTable {
    fn slot(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // row-major upper triangle without the diagonal
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// Latest common predecessors of two distinct versions, sorted.
    pub fn get(&self, i: usize, j: usize) -> &[usize] {
        assert_ne!(i, j, "no entry for a version paired with itself");
        &self.entries[self.slot(i, j)]
    }

    /// The lexicographically smallest latest common predecessor, if any.
    pub fn first(&self, i: usize, j: usize) -> Option<usize> {
        self.get(i, j).first().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(i, j, pre_c(i, j))` for all `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, &[usize])> + '_ {
        (0..self.n).flat_map(move |i| {
            (i + 1..self.n).map(move |j| (i, j, self.entries[self.slot(i, j)].as_slice()))
        })
    }
}

/// Version identities, succession edges and predecessor sets.
///
/// Versions are indexed in id order, so comparing indices compares ids.
#[derive(Debug)]
pub struct VersionDag {
    ids: Vec<VersionId>,
    index: HashMap<VersionId, usize>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    root: usize,
    ancestors: Vec<FixedBitSet>,
    lcp: OnceLock<LcpTable>,
}

impl VersionDag {
    fn new(ids: Vec<VersionId>, modifications: &[(usize, usize)], root: usize) -> Self {
        let n = ids.len();
        let index = ids
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b) in modifications {
            succs[a].push(b);
            preds[b].push(a);
        }
        // reverse BFS from each version's direct predecessors
        let ancestors = (0..n)
            .map(|i| {
                let mut seen = FixedBitSet::with_capacity(n);
                let mut queue: VecDeque<usize> = preds[i].iter().copied().collect();
                while let Some(x) = queue.pop_front() {
                    if seen.put(x) {
                        continue;
                    }
                    queue.extend(preds[x].iter().copied());
                }
                seen
            })
            .collect();
        Self {
            ids,
            index,
            preds,
            succs,
            root,
            ancestors,
            lcp: OnceLock::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[VersionId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &VersionId {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Result<usize, VersioningError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| VersioningError::UnknownVersion(VersionId::from(id)))
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succs[i]
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    /// Modification pairs in (source, target) index order.
    pub fn modifications(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succs
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    /// All versions with a nonempty modification path into `i`.
    pub fn pre(&self, i: usize) -> &FixedBitSet {
        &self.ancestors[i]
    }

    pub fn pre_c(&self, i: usize, j: usize) -> Vec<usize> {
        if self.ancestors[j].contains(i) || self.ancestors[i].contains(j) {
            return Vec::new();
        }
        let mut common = self.ancestors[i].clone();
        common.intersect_with(&self.ancestors[j]);
        common
            .ones()
            .filter(|&c| !common.ones().any(|x| self.ancestors[x].contains(c)))
            .collect()
    }

    /// Memoized `pre_c` over all unordered pairs.
    pub fn lcp_table(&self) -> &LcpTable {
        self.lcp.get_or_init(|| {
            let n = self.len();
            let mut entries = Vec::with_capacity(n * n.saturating_sub(1) / 2);
            for i in 0..n {
                for j in i + 1..n {
                    entries.push(self.pre_c(i, j));
                }
            }
            LcpTable { n, entries }
        })
    }

    /// Versions on a cycle, if the succession relation has one.
    fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut done = FixedBitSet::with_capacity(n);
        while let Some(x) = queue.pop_front() {
            done.insert(x);
            for &y in &self.succs[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    queue.push_back(y);
                }
            }
        }
        let start = (0..n).find(|&i| !done.contains(i))?;
        // every remaining version has a remaining predecessor; walk back until a repeat
        let mut path = vec![start];
        let mut cur = start;
        loop {
            let p = *self.preds[cur]
                .iter()
                .filter(|&&p| !done.contains(p))
                .min()
                .expect("remaining version has a remaining predecessor");
            if let Some(at) = path.iter().position(|&x| x == p) {
                let mut cycle = path.split_off(at);
                cycle.reverse();
                let min_at = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &v)| v)
                    .map(|(k, _)| k)
                    .unwrap_or(0);
                cycle.rotate_left(min_at);
                return Some(cycle);
            }
            path.push(p);
            cur = p;
        }
    }
}

/// A DAG of model versions over one element store with a designated root.
#[derive(Debug, Clone)]
pub struct ModelVersioning {
    store: Arc<ElementStore>,
    type_graph: Arc<TypeGraph>,
    models: Vec<Model>,
    dag: Arc<VersionDag>,
}

impl ModelVersioning {
    /// Assembles a versioning, checking only that references resolve.
    /// Use [`validate_versioning`] for the full correctness check.
    pub fn new(
        store: Arc<ElementStore>,
        type_graph: Arc<TypeGraph>,
        versions: impl IntoIterator<Item = (VersionId, Model)>,
        modifications: impl IntoIterator<Item = (VersionId, VersionId)>,
        root: VersionId,
    ) -> Result<Self, VersioningError> {
        let mut versions: Vec<(VersionId, Model)> = versions.into_iter().collect();
        versions.sort_by(|a, b| a.0.cmp(&b.0));
        for w in versions.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(VersioningError::DuplicateVersion(w[0].0.clone()));
            }
        }
        for (id, m) in &versions {
            if !Arc::ptr_eq(m.store(), &store) || m.type_graph() != &type_graph {
                return Err(VersioningError::StoreMismatch(id.clone()));
            }
        }
        let (ids, models): (Vec<_>, Vec<_>) = versions.into_iter().unzip();
        let lookup = |v: &VersionId| {
            ids.binary_search(v)
                .map_err(|_| VersioningError::UnknownVersion(v.clone()))
        };
        let mut mods = Vec::new();
        for (a, b) in modifications {
            mods.push((lookup(&a)?, lookup(&b)?));
        }
        mods.sort_unstable();
        mods.dedup();
        let root = lookup(&root)?;
        Ok(Self {
            store,
            type_graph,
            models,
            dag: Arc::new(VersionDag::new(ids, &mods, root)),
        })
    }

    pub fn store(&self) -> &Arc<ElementStore> {
        &self.store
    }

    pub fn type_graph(&self) -> &Arc<TypeGraph> {
        &self.type_graph
    }

    pub fn dag(&self) -> &Arc<VersionDag> {
        &self.dag
    }

    pub fn version_ids(&self) -> &[VersionId] {
        self.dag.ids()
    }

    pub fn root(&self) -> &VersionId {
        self.dag.id(self.dag.root())
    }

    pub fn model(&self, id: &str) -> Result<&Model, VersioningError> {
        Ok(&self.models[self.dag.index_of(id)?])
    }

    pub fn model_at(&self, i: usize) -> &Model {
        &self.models[i]
    }

    pub fn models(&self) -> impl Iterator<Item = (&VersionId, &Model)> + '_ {
        self.dag.ids().iter().zip(&self.models)
    }

    pub fn modifications(&self) -> impl Iterator<Item = (&VersionId, &VersionId)> + '_ {
        self.dag
            .modifications()
            .map(|(a, b)| (self.dag.id(a), self.dag.id(b)))
    }

    pub fn max_preserving_mod(
        &self,
        i: &str,
        j: &str,
    ) -> Result<ModelModification, VersioningError> {
        let (a, b) = (self.dag.index_of(i)?, self.dag.index_of(j)?);
        Ok(self.mod_at(a, b))
    }

    pub(crate) fn mod_at(&self, a: usize, b: usize) -> ModelModification {
        ModelModification::between(
            self.dag.id(a).clone(),
            self.models[a].clone(),
            self.dag.id(b).clone(),
            self.models[b].clone(),
        )
        .expect("versions share one store")
    }

    pub fn pre(&self, i: &str) -> Result<BTreeSet<VersionId>, VersioningError> {
        let i = self.dag.index_of(i)?;
        Ok(self.ids_of(self.dag.pre(i).ones()))
    }

    pub fn pre_c(&self, i: &str, j: &str) -> Result<BTreeSet<VersionId>, VersioningError> {
        let (a, b) = self.distinct_pair(i, j)?;
        Ok(self.ids_of(self.dag.pre_c(a, b)))
    }

    pub fn pre_c1(&self, i: &str, j: &str) -> Result<Option<VersionId>, VersioningError> {
        let (a, b) = self.distinct_pair(i, j)?;
        Ok(self
            .dag
            .pre_c(a, b)
            .first()
            .map(|&c| self.dag.id(c).clone()))
    }

    /// `pre_c` for every unordered pair `(i, j)` with `i < j` in id order.
    pub fn pre_c_all(&self) -> Vec<((VersionId, VersionId), BTreeSet<VersionId>)> {
        self.dag
            .lcp_table()
            .pairs()
            .map(|(i, j, cs)| {
                (
                    (self.dag.id(i).clone(), self.dag.id(j).clone()),
                    self.ids_of(cs.iter().copied()),
                )
            })
            .collect()
    }

    fn distinct_pair(&self, i: &str, j: &str) -> Result<(usize, usize), VersioningError> {
        let (a, b) = (self.dag.index_of(i)?, self.dag.index_of(j)?);
        if a == b {
            return Err(VersioningError::SameVersion(VersionId::from(i)));
        }
        Ok((a, b))
    }

    fn ids_of(&self, ix: impl IntoIterator<Item = usize>) -> BTreeSet<VersionId> {
        ix.into_iter().map(|i| self.dag.id(i).clone()).collect()
    }
}

/// Checks that every version is a valid model, succession is acyclic and
/// the root precedes every other version.
pub fn validate_versioning(v: &ModelVersioning) -> Result<(), VersioningError> {
    for (id, m) in v.models() {
        validate_model(m).map_err(|source| VersioningError::InvalidVersion {
            version: id.clone(),
            source,
        })?;
    }
    let dag = v.dag();
    if let Some(cycle) = dag.find_cycle() {
        return Err(VersioningError::CycleDetected(
            cycle.into_iter().map(|i| dag.id(i).clone()).collect(),
        ));
    }
    let root = dag.root();
    if (0..dag.len()).any(|i| i != root && !dag.pre(i).contains(root)) {
        return Err(VersioningError::NoCommonRoot);
    }
    Ok(())
}
