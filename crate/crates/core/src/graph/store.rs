use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::error::GraphError;

use super::types::{EdgeId, NodeId, TypeId};

/// Dense index of a node inside its [`ElementStore`]. Index order equals id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeIx(pub(crate) u32);

/// Dense index of an edge inside its [`ElementStore`]. Index order equals id order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIx(pub(crate) u32);

impl NodeIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeIx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned type name local to one store.
pub(crate) type TypeIx = u32;

#[derive(Debug, Clone)]
pub(crate) struct NodeRecord {
    pub id: NodeId,
    pub ty: TypeIx,
}

#[derive(Debug, Clone)]
pub(crate) struct EdgeRecord {
    pub id: EdgeId,
    pub ty: TypeIx,
    pub source: NodeIx,
    pub target: NodeIx,
}

/// Registry of every node and edge identity that any model may contain.
///
/// Edge endpoints and element types are fixed at registration, so two models
/// over the same store can never disagree about an edge's source or target.
#[derive(Debug)]
pub struct ElementStore {
    type_names: Vec<TypeId>,
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    node_index: HashMap<NodeId, NodeIx>,
    edge_index: HashMap<EdgeId, EdgeIx>,
}

impl ElementStore {
    pub fn builder() -> StoreBuilder {
        StoreBuilder::default()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, id: &str) -> Option<NodeIx> {
        self.node_index.get(id).copied()
    }

    pub fn edge(&self, id: &str) -> Option<EdgeIx> {
        self.edge_index.get(id).copied()
    }

    pub fn node_id(&self, n: NodeIx) -> &NodeId {
        &self.nodes[n.index()].id
    }

    pub fn edge_id(&self, e: EdgeIx) -> &EdgeId {
        &self.edges[e.index()].id
    }

    pub fn node_type(&self, n: NodeIx) -> &TypeId {
        &self.type_names[self.nodes[n.index()].ty as usize]
    }

    pub fn edge_type(&self, e: EdgeIx) -> &TypeId {
        &self.type_names[self.edges[e.index()].ty as usize]
    }

    pub fn source(&self, e: EdgeIx) -> NodeIx {
        self.edges[e.index()].source
    }

    pub fn target(&self, e: EdgeIx) -> NodeIx {
        self.edges[e.index()].target
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeIx> {
        (0..self.nodes.len() as u32).map(NodeIx)
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeIx> {
        (0..self.edges.len() as u32).map(EdgeIx)
    }

    pub(crate) fn node_type_ix(&self, n: NodeIx) -> TypeIx {
        self.nodes[n.index()].ty
    }

    pub(crate) fn edge_type_ix(&self, e: EdgeIx) -> TypeIx {
        self.edges[e.index()].ty
    }

    pub(crate) fn type_ix(&self, name: &str) -> Option<TypeIx> {
        self.type_names
            .binary_search_by(|t| t.as_str().cmp(name))
            .ok()
            .map(|i| i as TypeIx)
    }
}

/// Collects element registrations; [`StoreBuilder::build`] assigns indices in id order.
#[derive(Debug, Default, Clone)]
pub struct StoreBuilder {
    nodes: BTreeMap<NodeId, TypeId>,
    edges: BTreeMap<EdgeId, (TypeId, NodeId, NodeId)>,
}

impl StoreBuilder {
    pub fn add_node(
        &mut self,
        id: impl Into<NodeId>,
        ty: impl Into<TypeId>,
    ) -> Result<&mut Self, GraphError> {
        let id = id.into();
        if self.nodes.contains_key(&id) || self.edges.contains_key(id.as_str()) {
            return Err(GraphError::DuplicateId(id.as_str().to_owned()));
        }
        self.nodes.insert(id, ty.into());
        Ok(self)
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<EdgeId>,
        ty: impl Into<TypeId>,
        source: impl Into<NodeId>,
        target: impl Into<NodeId>,
    ) -> Result<&mut Self, GraphError> {
        let id = id.into();
        if self.edges.contains_key(&id) || self.nodes.contains_key(id.as_str()) {
            return Err(GraphError::DuplicateId(id.as_str().to_owned()));
        }
        self.edges
            .insert(id, (ty.into(), source.into(), target.into()));
        Ok(self)
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.nodes.contains_key(id)
    }

    pub fn contains_edge(&self, id: &str) -> bool {
        self.edges.contains_key(id)
    }

    pub fn build(self) -> Result<Arc<ElementStore>, GraphError> {
        let mut type_names: Vec<TypeId> = self
            .nodes
            .values()
            .chain(self.edges.values().map(|(t, _, _)| t))
            .cloned()
            .collect();
        type_names.sort();
        type_names.dedup();
        let ty_ix = |t: &TypeId| type_names.binary_search(t).expect("interned") as TypeIx;

        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut node_index = HashMap::with_capacity(self.nodes.len());
        for (i, (id, ty)) in self.nodes.iter().enumerate() {
            node_index.insert(id.clone(), NodeIx(i as u32));
            nodes.push(NodeRecord {
                id: id.clone(),
                ty: ty_ix(ty),
            });
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut edge_index = HashMap::with_capacity(self.edges.len());
        for (i, (id, (ty, s, t))) in self.edges.iter().enumerate() {
            let lookup = |n: &NodeId| {
                node_index
                    .get(n)
                    .copied()
                    .ok_or_else(|| GraphError::UnknownEndpoint {
                        edge: id.as_str().to_owned(),
                        node: n.as_str().to_owned(),
                    })
            };
            let source = lookup(s)?;
            let target = lookup(t)?;
            edge_index.insert(id.clone(), EdgeIx(i as u32));
            edges.push(EdgeRecord {
                id: id.clone(),
                ty: ty_ix(ty),
                source,
                target,
            });
        }
        Ok(Arc::new(ElementStore {
            type_names,
            nodes,
            edges,
            node_index,
            edge_index,
        }))
    }
}
