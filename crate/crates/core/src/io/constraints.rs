use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::{ElementStore, Model, Pattern, TypeGraph};

use super::corpus::{check_format, EdgeDoc};
use super::{to_canonical_json, FormatError};

pub const CONSTRAINTS_FORMAT: &str = "mvgraph-constraints/1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    nodes: BTreeMap<String, String>,
    #[serde(default)]
    edges: BTreeMap<String, EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintsDoc {
    format: String,
    patterns: BTreeMap<String, PatternDoc>,
}

/// Parses named violation patterns typed over `type_graph`, sorted by name.
pub fn parse_constraints(
    bytes: &[u8],
    type_graph: &Arc<TypeGraph>,
) -> Result<Vec<Pattern>, FormatError> {
    let doc: ConstraintsDoc = serde_json::from_slice(bytes)?;
    check_format(&doc.format, CONSTRAINTS_FORMAT)?;
    let mut out = Vec::with_capacity(doc.patterns.len());
    for (name, p) in doc.patterns {
        let mut b = ElementStore::builder();
        for (id, ty) in &p.nodes {
            b.add_node(id.as_str(), ty.as_str())?;
        }
        for (id, e) in &p.edges {
            b.add_edge(
                id.as_str(),
                e.ty.as_str(),
                e.source.as_str(),
                e.target.as_str(),
            )?;
        }
        let graph = Model::full(b.build()?, type_graph.clone());
        out.push(Pattern::new(name, graph)?);
    }
    Ok(out)
}

pub fn write_constraints(patterns: &[Pattern]) -> Vec<u8> {
    let doc = ConstraintsDoc {
        format: CONSTRAINTS_FORMAT.to_owned(),
        patterns: patterns
            .iter()
            .map(|p| {
                let g = p.graph();
                let s = g.store();
                (
                    p.name().to_owned(),
                    PatternDoc {
                        nodes: g
                            .nodes()
                            .map(|n| (s.node_id(n).to_string(), s.node_type(n).to_string()))
                            .collect(),
                        edges: g
                            .edges()
                            .map(|e| {
                                (
                                    s.edge_id(e).to_string(),
                                    EdgeDoc {
                                        ty: s.edge_type(e).to_string(),
                                        source: s.node_id(s.source(e)).to_string(),
                                        target: s.node_id(s.target(e)).to_string(),
                                    },
                                )
                            })
                            .collect(),
                    },
                )
            })
            .collect(),
    };
    to_canonical_json(&doc)
}
