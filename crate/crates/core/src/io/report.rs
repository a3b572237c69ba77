//! Line-oriented and JSON renderings of analysis results.

use std::fmt::Write;

use serde::Serialize;

use crate::analysis::{MergeConflictReport, MergeViolationReport, VersionedViolation};
use crate::graph::{Match, Model};

/// `{p=h, ...; pe=he, ...}` with pattern ids in order.
pub fn format_match(m: &Match) -> String {
    let nodes: Vec<String> = m.node_map.iter().map(|(p, h)| format!("{p}={h}")).collect();
    let edges: Vec<String> = m.edge_map.iter().map(|(p, h)| format!("{p}={h}")).collect();
    if edges.is_empty() {
        format!("{{{}}}", nodes.join(", "))
    } else {
        format!("{{{}; {}}}", nodes.join(", "), edges.join(", "))
    }
}

pub fn violation_line(pattern: &str, v: &VersionedViolation) -> String {
    format!(
        "violation {pattern} {} {}",
        v.version,
        format_match(&v.matched)
    )
}

pub fn conflict_line(c: &MergeConflictReport) -> String {
    format!("conflict {} {} {} {} {}", c.i, c.j, c.c, c.edge, c.node)
}

pub fn merge_violation_line(pattern: &str, v: &MergeViolationReport) -> String {
    format!(
        "merge-violation {pattern} {} {} {} {}",
        v.i,
        v.j,
        v.c,
        format_match(&v.matched)
    )
}

/// A report tagged with the constraint it belongs to.
#[derive(Debug, Serialize)]
pub struct Tagged<'a, T: Serialize> {
    pub pattern: &'a str,
    #[serde(flatten)]
    pub report: &'a T,
}

#[derive(Debug, Serialize)]
struct ModelEdge<'a> {
    id: &'a str,
    #[serde(rename = "type")]
    ty: &'a str,
    source: &'a str,
    target: &'a str,
}

#[derive(Debug, Serialize)]
struct ModelNode<'a> {
    id: &'a str,
    #[serde(rename = "type")]
    ty: &'a str,
}

#[derive(Debug, Serialize)]
pub struct ModelView<'a> {
    version: &'a str,
    nodes: Vec<ModelNode<'a>>,
    edges: Vec<ModelEdge<'a>>,
}

pub fn model_view<'a>(version: &'a str, m: &'a Model) -> ModelView<'a> {
    let s = m.store();
    ModelView {
        version,
        nodes: m
            .nodes()
            .map(|n| ModelNode {
                id: s.node_id(n).as_str(),
                ty: s.node_type(n).as_str(),
            })
            .collect(),
        edges: m
            .edges()
            .map(|e| ModelEdge {
                id: s.edge_id(e).as_str(),
                ty: s.edge_type(e).as_str(),
                source: s.node_id(s.source(e)).as_str(),
                target: s.node_id(s.target(e)).as_str(),
            })
            .collect(),
    }
}

pub fn model_text(version: &str, m: &Model) -> String {
    let view = model_view(version, m);
    let mut out = format!("version {version}\n");
    for n in &view.nodes {
        let _ = writeln!(out, "node {} {}", n.id, n.ty);
    }
    for e in &view.edges {
        let _ = writeln!(out, "edge {} {} {} {}", e.id, e.ty, e.source, e.target);
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    super::to_canonical_json(value)
}

/// Per-pattern results flattened into one JSON array of tagged reports.
pub fn tagged_json<T: Serialize>(results: &[(&str, Vec<T>)]) -> Vec<u8> {
    let tagged: Vec<_> = results
        .iter()
        .flat_map(|(name, r)| {
            r.iter().map(move |x| Tagged {
                pattern: name,
                report: x,
            })
        })
        .collect();
    to_json(&tagged)
}
