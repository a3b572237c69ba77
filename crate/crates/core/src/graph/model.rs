use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::GraphError;

use super::store::{EdgeIx, ElementStore, NodeIx};
use super::types::{EdgeId, NodeId, TypeGraph};

/// A typed graph: a subset of an [`ElementStore`]'s elements typed over a [`TypeGraph`].
///
/// Two models over the same store are equal iff their node and edge sets are equal.
#[derive(Clone)]
pub struct Model {
    store: Arc<ElementStore>,
    type_graph: Arc<TypeGraph>,
    nodes: FixedBitSet,
    edges: FixedBitSet,
}

impl Model {
    pub fn empty(store: Arc<ElementStore>, type_graph: Arc<TypeGraph>) -> Self {
        let nodes = FixedBitSet::with_capacity(store.node_count());
        let edges = FixedBitSet::with_capacity(store.edge_count());
        Self {
            store,
            type_graph,
            nodes,
            edges,
        }
    }

    /// The model containing every element of the store.
    pub fn full(store: Arc<ElementStore>, type_graph: Arc<TypeGraph>) -> Self {
        let mut m = Self::empty(store, type_graph);
        m.nodes.insert_range(..);
        m.edges.insert_range(..);
        m
    }

    pub fn from_ids<N, E>(
        store: Arc<ElementStore>,
        type_graph: Arc<TypeGraph>,
        nodes: impl IntoIterator<Item = N>,
        edges: impl IntoIterator<Item = E>,
    ) -> Result<Self, GraphError>
    where
        N: AsRef<str>,
        E: AsRef<str>,
    {
        let mut m = Self::empty(store, type_graph);
        for n in nodes {
            let n = n.as_ref();
            let ix = m
                .store
                .node(n)
                .ok_or_else(|| GraphError::UnknownElement(n.to_owned()))?;
            m.nodes.insert(ix.index());
        }
        for e in edges {
            let e = e.as_ref();
            let ix = m
                .store
                .edge(e)
                .ok_or_else(|| GraphError::UnknownElement(e.to_owned()))?;
            m.edges.insert(ix.index());
        }
        Ok(m)
    }

    pub fn store(&self) -> &Arc<ElementStore> {
        &self.store
    }

    pub fn type_graph(&self) -> &Arc<TypeGraph> {
        &self.type_graph
    }

    pub fn contains_node(&self, n: NodeIx) -> bool {
        self.nodes.contains(n.index())
    }

    pub fn contains_edge(&self, e: EdgeIx) -> bool {
        self.edges.contains(e.index())
    }

    pub fn insert_node(&mut self, n: NodeIx) {
        self.nodes.insert(n.index());
    }

    pub fn insert_edge(&mut self, e: EdgeIx) {
        self.edges.insert(e.index());
    }

    pub fn remove_node(&mut self, n: NodeIx) {
        self.nodes.set(n.index(), false);
    }

    pub fn remove_edge(&mut self, e: EdgeIx) {
        self.edges.set(e.index(), false);
    }

    /// Nodes in id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeIx> + '_ {
        self.nodes.ones().map(|i| NodeIx(i as u32))
    }

    /// Edges in id order.
    pub fn edges(&self) -> impl Iterator<Item = EdgeIx> + '_ {
        self.edges.ones().map(|i| EdgeIx(i as u32))
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> + '_ {
        self.nodes().map(|n| self.store.node_id(n))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> + '_ {
        self.edges().map(|e| self.store.edge_id(e))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_clear() && self.edges.is_clear()
    }

    pub fn same_store(&self, other: &Model) -> bool {
        Arc::ptr_eq(&self.store, &other.store)
    }

    pub fn is_subgraph_of(&self, other: &Model) -> bool {
        self.same_store(other)
            && self.nodes.is_subset(&other.nodes)
            && self.edges.is_subset(&other.edges)
    }

    /// Element-wise intersection. Both models must share a store.
    pub fn intersection(&self, other: &Model) -> Result<Model, GraphError> {
        self.check_compatible(other)?;
        let mut m = self.clone();
        m.nodes.intersect_with(&other.nodes);
        m.edges.intersect_with(&other.edges);
        Ok(m)
    }

    /// Elements of `self` not in `other`.
    pub fn difference(&self, other: &Model) -> Result<Model, GraphError> {
        self.check_compatible(other)?;
        let mut m = self.clone();
        m.nodes.difference_with(&other.nodes);
        m.edges.difference_with(&other.edges);
        Ok(m)
    }

    pub fn union(&self, other: &Model) -> Result<Model, GraphError> {
        self.check_compatible(other)?;
        let mut m = self.clone();
        m.nodes.union_with(&other.nodes);
        m.edges.union_with(&other.edges);
        Ok(m)
    }

    fn check_compatible(&self, other: &Model) -> Result<(), GraphError> {
        if self.same_store(other) && self.type_graph == other.type_graph {
            Ok(())
        } else {
            Err(GraphError::StoreMismatch)
        }
    }

    /// First edge (in id order) with an endpoint outside the node set.
    pub fn first_dangling_edge(&self) -> Option<EdgeIx> {
        self.edges().find(|&e| {
            !self.contains_node(self.store.source(e)) || !self.contains_node(self.store.target(e))
        })
    }

    pub fn is_proper(&self) -> bool {
        self.first_dangling_edge().is_none()
    }
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.same_store(other)
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.type_graph == other.type_graph
    }
}

impl Eq for Model {}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("nodes", &self.node_ids().collect::<Vec<_>>())
            .field("edges", &self.edge_ids().collect::<Vec<_>>())
            .finish()
    }
}

/// Checks properness and type conformance, reporting the first offending
/// element: nodes in id order first, then edges in id order.
pub fn validate_model(m: &Model) -> Result<(), GraphError> {
    let store = m.store();
    let tg = m.type_graph();
    for n in m.nodes() {
        if !tg.has_node_type(store.node_type(n).as_str()) {
            return Err(GraphError::UnknownType(store.node_id(n).to_string()));
        }
    }
    for e in m.edges() {
        let id = store.edge_id(e);
        let decl = tg
            .edge_type(store.edge_type(e).as_str())
            .ok_or_else(|| GraphError::UnknownType(id.to_string()))?;
        let (s, t) = (store.source(e), store.target(e));
        if !m.contains_node(s) || !m.contains_node(t) {
            return Err(GraphError::DanglingEdge(id.clone()));
        }
        if store.node_type(s) != &decl.source || store.node_type(t) != &decl.target {
            return Err(GraphError::TypeMismatch(id.to_string()));
        }
    }
    Ok(())
}

/// Set union of models sharing one store and type graph.
pub fn graph_union<'a>(models: impl IntoIterator<Item = &'a Model>) -> Result<Model, GraphError> {
    let mut it = models.into_iter();
    let mut acc = it.next().ok_or(GraphError::EmptyUnion)?.clone();
    for m in it {
        acc.check_compatible(m)?;
        acc.nodes.union_with(&m.nodes);
        acc.edges.union_with(&m.edges);
    }
    Ok(acc)
}
