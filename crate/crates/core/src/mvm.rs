//! Multi-version models: a whole versioning folded into one typed graph.
//!
//! Every node and every edge of the union of all versions becomes a node of
//! the structural graph; an edge's incidence becomes two encoding edges from
//! its representative to the representatives of its endpoints. Version nodes,
//! succession and the creation/deletion (`cv`/`dv`) links are kept as
//! adjacency sets indexed by version; [`MultiVersionModel::typed_view`]
//! rebuilds the fully typed-edge form for export.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{GraphError, MvmError};
use crate::graph::{
    graph_union, EdgeIx, EdgeTypeDecl, ElementStore, Model, NodeIx, TypeGraph, TypeId,
};
use crate::versioning::{
    validate_versioning, ModelModification, ModelVersioning, VersionDag, VersionId,
};

/// Suffix of the mv node type representing a base node or edge type.
pub const MV_TYPE_SUFFIX: &str = "_mv";
pub const SOURCE_ENCODING_SUFFIX: &str = "_src";
pub const TARGET_ENCODING_SUFFIX: &str = "_tgt";
pub const VERSION_TYPE: &str = "version";
pub const SUC_TYPE: &str = "suc";
/// Separator between an edge id and the role of its encoding edges (`e#src`, `e#tgt`).
pub const ENCODING_ID_SEPARATOR: char = '#';

/// The type graph of multi-version models derived from a base type graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptedTypeGraph {
    base: Arc<TypeGraph>,
    mv: Arc<TypeGraph>,
    corr: BTreeMap<TypeId, TypeId>,
    corr_s: BTreeMap<TypeId, TypeId>,
    corr_t: BTreeMap<TypeId, TypeId>,
    cv: BTreeMap<TypeId, TypeId>,
    dv: BTreeMap<TypeId, TypeId>,
}

impl AdaptedTypeGraph {
    pub fn base(&self) -> &Arc<TypeGraph> {
        &self.base
    }

    /// The full adapted type graph, version node and cv/dv/suc edge types included.
    pub fn mv(&self) -> &Arc<TypeGraph> {
        &self.mv
    }

    /// Mv node type representing a base node or edge type.
    pub fn corr(&self, t: &str) -> Option<&TypeId> {
        self.corr.get(t)
    }

    pub fn corr_s(&self, edge_type: &str) -> Option<&TypeId> {
        self.corr_s.get(edge_type)
    }

    pub fn corr_t(&self, edge_type: &str) -> Option<&TypeId> {
        self.corr_t.get(edge_type)
    }

    /// The `cv` edge type of a non-version mv node type.
    pub fn cv(&self, mv_node_type: &str) -> Option<&TypeId> {
        self.cv.get(mv_node_type)
    }

    pub fn dv(&self, mv_node_type: &str) -> Option<&TypeId> {
        self.dv.get(mv_node_type)
    }
}

/// Fails when a derived type name coincides with another one, e.g. node type
/// `X` and edge type `cv_X` both yield `cv_X_mv`.
pub fn adapt_type_graph(tm: &Arc<TypeGraph>) -> Result<AdaptedTypeGraph, MvmError> {
    let mv_name = |t: &TypeId| TypeId::new(format!("{t}{MV_TYPE_SUFFIX}"));
    let mut corr = BTreeMap::new();
    let mut corr_s = BTreeMap::new();
    let mut corr_t = BTreeMap::new();
    let mut edge_types: Vec<(TypeId, EdgeTypeDecl)> = Vec::new();
    for t in tm.node_types() {
        corr.insert(t.clone(), mv_name(t));
    }
    for (e, decl) in tm.edge_types() {
        let rep = mv_name(e);
        corr.insert(e.clone(), rep.clone());
        let s = TypeId::new(format!("{e}{SOURCE_ENCODING_SUFFIX}"));
        let t = TypeId::new(format!("{e}{TARGET_ENCODING_SUFFIX}"));
        edge_types.push((
            s.clone(),
            EdgeTypeDecl {
                source: rep.clone(),
                target: mv_name(&decl.source),
            },
        ));
        edge_types.push((
            t.clone(),
            EdgeTypeDecl {
                source: rep,
                target: mv_name(&decl.target),
            },
        ));
        corr_s.insert(e.clone(), s);
        corr_t.insert(e.clone(), t);
    }
    let version = TypeId::from(VERSION_TYPE);
    edge_types.push((
        TypeId::from(SUC_TYPE),
        EdgeTypeDecl {
            source: version.clone(),
            target: version.clone(),
        },
    ));
    let mut cv = BTreeMap::new();
    let mut dv = BTreeMap::new();
    for rep in corr.values() {
        for (prefix, table) in [("cv_", &mut cv), ("dv_", &mut dv)] {
            let name = TypeId::new(format!("{prefix}{rep}"));
            edge_types.push((
                name.clone(),
                EdgeTypeDecl {
                    source: rep.clone(),
                    target: version.clone(),
                },
            ));
            table.insert(rep.clone(), name);
        }
    }
    let node_types = corr.values().cloned().chain([version]);
    let mv = TypeGraph::new(node_types, edge_types).map_err(|e| match e {
        GraphError::DuplicateType(t) => MvmError::TypeNameClash(t),
        other => other.into(),
    })?;
    Ok(AdaptedTypeGraph {
        base: tm.clone(),
        mv: Arc::new(mv),
        corr,
        corr_s,
        corr_t,
        cv,
        dv,
    })
}

/// The base element an mv-node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Node(NodeIx),
    Edge(EdgeIx),
}

/// Result of translating a model into mv form, with the origin bijection.
#[derive(Debug, Clone)]
pub struct Encoding {
    graph: Model,
    origin: Vec<Origin>,
    node_rep: Vec<Option<NodeIx>>,
    edge_rep: Vec<Option<NodeIx>>,
    endpoints: Vec<Option<(EdgeIx, EdgeIx)>>,
}

impl Encoding {
    /// The translated graph, typed over the adapted type graph.
    pub fn graph(&self) -> &Model {
        &self.graph
    }

    pub fn origin(&self, n: NodeIx) -> Origin {
        self.origin[n.index()]
    }

    pub fn rep_of_node(&self, n: NodeIx) -> Option<NodeIx> {
        self.node_rep.get(n.index()).copied().flatten()
    }

    pub fn rep_of_edge(&self, e: EdgeIx) -> Option<NodeIx> {
        self.edge_rep.get(e.index()).copied().flatten()
    }

    /// Source-encoding edge of an edge representative (`s_mv`).
    pub fn s_mv(&self, n: NodeIx) -> Option<EdgeIx> {
        self.endpoints[n.index()].map(|(s, _)| s)
    }

    /// Target-encoding edge of an edge representative (`t_mv`).
    pub fn t_mv(&self, n: NodeIx) -> Option<EdgeIx> {
        self.endpoints[n.index()].map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.origin.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origin.is_empty()
    }
}

/// Translates `g` into the structural mv form.
///
/// Encoding edges are typed by the edge's type: `corr_s(type(e))` and
/// `corr_t(type(e))`.
pub fn trans_mv(g: &Model, adapted: &AdaptedTypeGraph) -> Result<Encoding, GraphError> {
    if g.type_graph() != adapted.base() {
        return Err(GraphError::TypeGraphMismatch);
    }
    let store = g.store();
    let corr = |t: &TypeId| {
        adapted
            .corr(t.as_str())
            .cloned()
            .ok_or_else(|| GraphError::UnknownType(t.to_string()))
    };
    let mut b = ElementStore::builder();
    for n in g.nodes() {
        b.add_node(store.node_id(n).as_str(), corr(store.node_type(n))?)?;
    }
    for e in g.edges() {
        let id = store.edge_id(e).as_str();
        let ty = store.edge_type(e);
        b.add_node(id, corr(ty)?)?;
        let missing = || GraphError::UnknownType(id.to_owned());
        let (s, t) = (
            adapted.corr_s(ty.as_str()).ok_or_else(missing)?,
            adapted.corr_t(ty.as_str()).ok_or_else(missing)?,
        );
        b.add_edge(
            format!("{id}{ENCODING_ID_SEPARATOR}src"),
            s.clone(),
            id,
            store.node_id(store.source(e)).as_str(),
        )?;
        b.add_edge(
            format!("{id}{ENCODING_ID_SEPARATOR}tgt"),
            t.clone(),
            id,
            store.node_id(store.target(e)).as_str(),
        )?;
    }
    let mv_store = b.build()?;
    let mut origin = Vec::with_capacity(mv_store.node_count());
    let mut node_rep = vec![None; store.node_count()];
    let mut edge_rep = vec![None; store.edge_count()];
    let mut endpoints = vec![None; mv_store.node_count()];
    for n in mv_store.nodes() {
        let id = mv_store.node_id(n).as_str();
        let o = match store.node(id) {
            Some(x) => {
                node_rep[x.index()] = Some(n);
                Origin::Node(x)
            }
            None => {
                let x = store.edge(id).expect("mv node ids are base element ids");
                edge_rep[x.index()] = Some(n);
                Origin::Edge(x)
            }
        };
        origin.push(o);
    }
    for ee in mv_store.edges() {
        let rep = mv_store.source(ee);
        let slot = endpoints[rep.index()].get_or_insert((ee, ee));
        if mv_store.edge_id(ee).as_str().ends_with("#src") {
            slot.0 = ee;
        } else {
            slot.1 = ee;
        }
    }
    let graph = Model::full(mv_store, adapted.mv().clone());
    Ok(Encoding {
        graph,
        origin,
        node_rep,
        edge_rep,
        endpoints,
    })
}

/// A correct versioning encoded as a single graph plus version structure.
#[derive(Debug, Clone)]
pub struct MultiVersionModel {
    adapted: Arc<AdaptedTypeGraph>,
    base_store: Arc<ElementStore>,
    structural: Encoding,
    dag: Arc<VersionDag>,
    cv: Vec<Vec<usize>>,
    dv: Vec<Vec<usize>>,
    presence: Vec<FixedBitSet>,
}

/// Builds the multi-version model of a versioning (validating it first).
pub fn comb(v: &ModelVersioning) -> Result<MultiVersionModel, MvmError> {
    validate_versioning(v)?;
    let adapted = Arc::new(adapt_type_graph(v.type_graph())?);
    let union = graph_union(v.models().map(|(_, m)| m))?;
    let structural = trans_mv(&union, &adapted)?;
    let dag = v.dag().clone();
    let n = structural.len();
    let mut cv = vec![Vec::new(); n];
    let mut dv = vec![Vec::new(); n];
    let rep = |o: Origin| {
        match o {
            Origin::Node(x) => structural.rep_of_node(x),
            Origin::Edge(x) => structural.rep_of_edge(x),
        }
        .expect("union covers every version")
        .index()
    };

    let root = dag.root();
    let root_model = v.model_at(root);
    for x in root_model
        .nodes()
        .map(Origin::Node)
        .chain(root_model.edges().map(Origin::Edge))
    {
        cv[rep(x)].push(root);
    }
    for (a, b) in dag.modifications() {
        let m = v.mod_at(a, b);
        for x in m
            .created_nodes()
            .map(Origin::Node)
            .chain(m.created_edges().map(Origin::Edge))
        {
            cv[rep(x)].push(b);
        }
        for x in m
            .deleted_nodes()
            .map(Origin::Node)
            .chain(m.deleted_edges().map(Origin::Edge))
        {
            dv[rep(x)].push(b);
        }
    }
    for list in cv.iter_mut().chain(dv.iter_mut()) {
        list.sort_unstable();
        list.dedup();
    }
    let mv_store = structural.graph().store().clone();
    for k in 0..n {
        if cv[k].iter().any(|c| dv[k].binary_search(c).is_ok()) {
            return Err(MvmError::InconsistentPresence(
                mv_store.node_id(NodeIx(k as u32)).to_string(),
            ));
        }
    }
    let presence = (0..n)
        .map(|k| reach_avoiding(&dag, &cv[k], &dv[k]))
        .collect();
    Ok(MultiVersionModel {
        adapted,
        base_store: v.store().clone(),
        structural,
        dag,
        cv,
        dv,
        presence,
    })
}

/// Versions reachable over succession from any of `starts` along paths that
/// visit no version of `barriers` (path endpoints included). One visited set
/// is shared by all searches.
pub(crate) fn reach_avoiding(
    dag: &VersionDag,
    starts: &[usize],
    barriers: &[usize],
) -> FixedBitSet {
    let mut blocked = FixedBitSet::with_capacity(dag.len());
    for &b in barriers {
        blocked.insert(b);
    }
    let mut seen = FixedBitSet::with_capacity(dag.len());
    let mut queue = VecDeque::new();
    for &s in starts {
        if blocked.contains(s) || seen.put(s) {
            continue;
        }
        queue.push_back(s);
        while let Some(x) = queue.pop_front() {
            for &y in dag.successors(x) {
                if !blocked.contains(y) && !seen.put(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen
}

impl MultiVersionModel {
    pub fn adapted(&self) -> &Arc<AdaptedTypeGraph> {
        &self.adapted
    }

    pub fn dag(&self) -> &Arc<VersionDag> {
        &self.dag
    }

    pub fn base_store(&self) -> &Arc<ElementStore> {
        &self.base_store
    }

    pub fn structural(&self) -> &Encoding {
        &self.structural
    }

    /// Creation versions of a structural mv-node.
    pub fn cv(&self, n: NodeIx) -> &[usize] {
        &self.cv[n.index()]
    }

    /// Deletion versions of a structural mv-node.
    pub fn dv(&self, n: NodeIx) -> &[usize] {
        &self.dv[n.index()]
    }

    /// `p(n)` as a bitset over version indices.
    pub fn presence_bits(&self, n: NodeIx) -> &FixedBitSet {
        &self.presence[n.index()]
    }

    /// `p(n)` for the mv-node representing the element with id `element`.
    pub fn presence(&self, element: &str) -> Result<BTreeSet<VersionId>, MvmError> {
        let n = self
            .structural
            .graph()
            .store()
            .node(element)
            .ok_or_else(|| MvmError::NotStructural(element.to_owned()))?;
        Ok(self.presence[n.index()]
            .ones()
            .map(|i| self.dag.id(i).clone())
            .collect())
    }

    fn base_type_graph(&self) -> &Arc<TypeGraph> {
        self.adapted.base()
    }

    pub(crate) fn proj_at(&self, i: usize) -> Model {
        let mut m = Model::empty(self.base_store.clone(), self.base_type_graph().clone());
        let mv_store = self.structural.graph().store();
        for (k, p) in self.presence.iter().enumerate() {
            if !p.contains(i) {
                continue;
            }
            let n = NodeIx(k as u32);
            match self.structural.origin(n) {
                Origin::Node(x) => m.insert_node(x),
                Origin::Edge(x) => {
                    debug_assert_eq!(
                        self.structural
                            .origin(mv_store.target(self.structural.s_mv(n).unwrap())),
                        Origin::Node(self.base_store.source(x))
                    );
                    debug_assert_eq!(
                        self.structural
                            .origin(mv_store.target(self.structural.t_mv(n).unwrap())),
                        Origin::Node(self.base_store.target(x))
                    );
                    m.insert_edge(x)
                }
            }
        }
        m
    }

    /// Extracts a single version.
    pub fn proj(&self, version: &str) -> Result<Model, MvmError> {
        Ok(self.proj_at(self.dag.index_of(version)?))
    }

    /// Extracts the maximally preserving modification between two versions.
    pub fn proj_delta(&self, i: &str, j: &str) -> Result<ModelModification, MvmError> {
        let (a, b) = (self.dag.index_of(i)?, self.dag.index_of(j)?);
        Ok(self.proj_delta_at(a, b))
    }

    pub(crate) fn proj_delta_at(&self, a: usize, b: usize) -> ModelModification {
        ModelModification::between(
            self.dag.id(a).clone(),
            self.proj_at(a),
            self.dag.id(b).clone(),
            self.proj_at(b),
        )
        .expect("projections share the base store")
    }

    /// Fully typed view: structural graph plus version nodes and
    /// `suc`/`cv`/`dv` edges, in that order, for export.
    pub fn typed_view(&self) -> TypedView {
        let mv_store = self.structural.graph().store();
        let version_node = |i: usize| format!("{VERSION_TYPE}:{}", self.dag.id(i));
        let mut nodes: Vec<(String, TypeId)> = mv_store
            .nodes()
            .map(|n| {
                (
                    mv_store.node_id(n).to_string(),
                    mv_store.node_type(n).clone(),
                )
            })
            .collect();
        nodes.extend((0..self.dag.len()).map(|i| (version_node(i), TypeId::from(VERSION_TYPE))));
        let mut edges: Vec<TypedEdge> = mv_store
            .edges()
            .map(|e| TypedEdge {
                id: mv_store.edge_id(e).to_string(),
                ty: mv_store.edge_type(e).clone(),
                source: mv_store.node_id(mv_store.source(e)).to_string(),
                target: mv_store.node_id(mv_store.target(e)).to_string(),
            })
            .collect();
        for (a, b) in self.dag.modifications() {
            edges.push(TypedEdge {
                id: format!("{SUC_TYPE}:{}->{}", self.dag.id(a), self.dag.id(b)),
                ty: TypeId::from(SUC_TYPE),
                source: version_node(a),
                target: version_node(b),
            });
        }
        for n in mv_store.nodes() {
            let id = mv_store.node_id(n);
            let ty = mv_store.node_type(n);
            for (kind, versions, table) in [
                ("cv", &self.cv[n.index()], &self.adapted.cv),
                ("dv", &self.dv[n.index()], &self.adapted.dv),
            ] {
                for &v in versions {
                    edges.push(TypedEdge {
                        id: format!("{kind}:{id}->{}", self.dag.id(v)),
                        ty: table[ty].clone(),
                        source: id.to_string(),
                        target: version_node(v),
                    });
                }
            }
        }
        TypedView { nodes, edges }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedEdge {
    pub id: String,
    pub ty: TypeId,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedView {
    pub nodes: Vec<(String, TypeId)>,
    pub edges: Vec<TypedEdge>,
}
