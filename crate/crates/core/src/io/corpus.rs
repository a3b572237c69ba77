use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeTypeDecl, ElementStore, Model, TypeGraph, TypeId};
use crate::mvm::MultiVersionModel;
use crate::versioning::{validate_versioning, ModelVersioning, VersionId};

use super::{to_canonical_json, FormatError};

pub const CORPUS_FORMAT: &str = "mvgraph-corpus/1";
pub const MVM_EXPORT_FORMAT: &str = "mvgraph-mvm/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TypeGraphDoc {
    pub node_types: BTreeSet<String>,
    #[serde(default)]
    pub edge_types: BTreeMap<String, EndpointsDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct EndpointsDoc {
    pub source: String,
    pub target: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct EdgeDoc {
    #[serde(rename = "type")]
    pub ty: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VersionDoc {
    #[serde(default)]
    nodes: BTreeSet<String>,
    #[serde(default)]
    edges: BTreeSet<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorpusDoc {
    format: String,
    type_graph: TypeGraphDoc,
    nodes: BTreeMap<String, String>,
    #[serde(default)]
    edges: BTreeMap<String, EdgeDoc>,
    versions: BTreeMap<String, VersionDoc>,
    #[serde(default)]
    modifications: BTreeSet<(String, String)>,
    root: String,
}

#[derive(Debug, Serialize)]
struct MvmDoc {
    format: &'static str,
    type_graph: TypeGraphDoc,
    nodes: BTreeMap<String, String>,
    edges: BTreeMap<String, EdgeDoc>,
}

impl TypeGraphDoc {
    pub fn from_type_graph(tg: &TypeGraph) -> Self {
        Self {
            node_types: tg.node_types().iter().map(|t| t.to_string()).collect(),
            edge_types: tg
                .edge_types()
                .iter()
                .map(|(t, d)| {
                    (
                        t.to_string(),
                        EndpointsDoc {
                            source: d.source.to_string(),
                            target: d.target.to_string(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn to_type_graph(&self) -> Result<TypeGraph, FormatError> {
        Ok(TypeGraph::new(
            self.node_types.iter().map(|t| TypeId::from(t.as_str())),
            self.edge_types.iter().map(|(t, d)| {
                (
                    TypeId::from(t.as_str()),
                    EdgeTypeDecl {
                        source: d.source.as_str().into(),
                        target: d.target.as_str().into(),
                    },
                )
            }),
        )?)
    }
}

pub(crate) fn check_format(found: &str, expected: &'static str) -> Result<(), FormatError> {
    if found == expected {
        Ok(())
    } else {
        Err(FormatError::FormatTag {
            found: found.to_owned(),
            expected,
        })
    }
}

/// Parses and validates a corpus document.
pub fn parse_corpus(bytes: &[u8]) -> Result<ModelVersioning, FormatError> {
    let doc: CorpusDoc = serde_json::from_slice(bytes)?;
    check_format(&doc.format, CORPUS_FORMAT)?;
    let type_graph = Arc::new(doc.type_graph.to_type_graph()?);
    let mut b = ElementStore::builder();
    for (id, ty) in &doc.nodes {
        b.add_node(id.as_str(), ty.as_str())?;
    }
    for (id, e) in &doc.edges {
        b.add_edge(
            id.as_str(),
            e.ty.as_str(),
            e.source.as_str(),
            e.target.as_str(),
        )?;
    }
    let store = b.build()?;
    let mut versions = Vec::with_capacity(doc.versions.len());
    for (id, v) in &doc.versions {
        let m = Model::from_ids(store.clone(), type_graph.clone(), &v.nodes, &v.edges)?;
        versions.push((VersionId::from(id.as_str()), m));
    }
    let versioning = ModelVersioning::new(
        store,
        type_graph,
        versions,
        doc.modifications
            .into_iter()
            .map(|(a, b)| (VersionId::from(a), VersionId::from(b))),
        VersionId::from(doc.root),
    )?;
    validate_versioning(&versioning)?;
    Ok(versioning)
}

/// Canonical serialization of a versioning.
pub fn write_corpus(v: &ModelVersioning) -> Vec<u8> {
    let store = v.store();
    let doc = CorpusDoc {
        format: CORPUS_FORMAT.to_owned(),
        type_graph: TypeGraphDoc::from_type_graph(v.type_graph()),
        nodes: store
            .nodes()
            .map(|n| (store.node_id(n).to_string(), store.node_type(n).to_string()))
            .collect(),
        edges: store
            .edges()
            .map(|e| {
                (
                    store.edge_id(e).to_string(),
                    EdgeDoc {
                        ty: store.edge_type(e).to_string(),
                        source: store.node_id(store.source(e)).to_string(),
                        target: store.node_id(store.target(e)).to_string(),
                    },
                )
            })
            .collect(),
        versions: v
            .models()
            .map(|(id, m)| {
                (
                    id.to_string(),
                    VersionDoc {
                        nodes: m.node_ids().map(|n| n.to_string()).collect(),
                        edges: m.edge_ids().map(|e| e.to_string()).collect(),
                    },
                )
            })
            .collect(),
        modifications: v
            .modifications()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        root: v.root().to_string(),
    };
    to_canonical_json(&doc)
}

/// The multi-version encoding with cv/dv/suc as typed edges.
pub fn export_mvm(mvm: &MultiVersionModel) -> Vec<u8> {
    let view = mvm.typed_view();
    let doc = MvmDoc {
        format: MVM_EXPORT_FORMAT,
        type_graph: TypeGraphDoc::from_type_graph(mvm.adapted().mv()),
        nodes: view
            .nodes
            .into_iter()
            .map(|(id, ty)| (id, ty.to_string()))
            .collect(),
        edges: view
            .edges
            .into_iter()
            .map(|e| {
                (
                    e.id,
                    EdgeDoc {
                        ty: e.ty.to_string(),
                        source: e.source,
                        target: e.target,
                    },
                )
            })
            .collect(),
    };
    to_canonical_json(&doc)
}
