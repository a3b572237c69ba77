//! Seeded synthetic versionings over a small object-oriented type graph.
//!
//! The root version holds `base_size` nodes plus random typed edges. Every
//! further version branches from a random existing version (at most
//! `branch_factor` children each), optionally merges a second unrelated
//! version into it, and then applies a handful of random edits. Edits keep
//! each version proper: deleting a node also deletes its incident edges and
//! new edges only connect nodes present in the version being built.

use std::collections::BTreeSet;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeTypeDecl, ElementStore, Model, Pattern, TypeGraph, TypeId};
use crate::versioning::{validate_versioning, ModelVersioning, VersionId};

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("version_count must be at least 1")]
    NoVersions,
    #[error("branch_factor must be at least 1")]
    NoBranching,
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("root_edge_ratio must be a finite non-negative number, got {0}")]
    EdgeRatio(f64),
    #[error("max_out_degree must be at least 1")]
    OutDegree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    pub seed: u64,
    /// Nodes in the root version.
    pub base_size: usize,
    /// Maximum number of direct successors per version.
    pub branch_factor: usize,
    pub version_count: usize,
    /// Element creations plus deletions per new version. Edges removed
    /// along with a deleted node are not counted.
    pub edits_per_modification: usize,
    /// Probability that an edit deletes rather than creates.
    pub deletion_bias: f64,
    /// Root edges per root node.
    #[serde(default = "default_root_edge_ratio")]
    pub root_edge_ratio: f64,
    /// Probability that a new version also has a second, unrelated parent.
    #[serde(default)]
    pub merge_prob: f64,
    /// Probability that a creation revives an element absent from the parent.
    #[serde(default = "default_recreate_prob")]
    pub recreate_prob: f64,
    /// Probability that a new version extends the mainline (the chain grown
    /// this way from the root) instead of branching from a random version.
    /// High values give a long mainline with short side branches.
    #[serde(default)]
    pub linear_bias: f64,
    /// Cap on outgoing edges of one type per node within a version.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_out_degree: Option<usize>,
}

fn default_root_edge_ratio() -> f64 {
    1.0
}

fn default_recreate_prob() -> f64 {
    0.1
}

impl GeneratorParams {
    pub fn new(seed: u64, base_size: usize, version_count: usize) -> Self {
        Self {
            seed,
            base_size,
            branch_factor: 2,
            version_count,
            edits_per_modification: 4,
            deletion_bias: 0.4,
            root_edge_ratio: default_root_edge_ratio(),
            merge_prob: 0.0,
            recreate_prob: default_recreate_prob(),
            linear_bias: 0.0,
            max_out_degree: None,
        }
    }

    pub fn check(&self) -> Result<(), ParamError> {
        if self.version_count == 0 {
            return Err(ParamError::NoVersions);
        }
        if self.branch_factor == 0 {
            return Err(ParamError::NoBranching);
        }
        for (name, value) in [
            ("deletion_bias", self.deletion_bias),
            ("merge_prob", self.merge_prob),
            ("recreate_prob", self.recreate_prob),
            ("linear_bias", self.linear_bias),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ParamError::Probability { name, value });
            }
        }
        if !self.root_edge_ratio.is_finite() || self.root_edge_ratio < 0.0 {
            return Err(ParamError::EdgeRatio(self.root_edge_ratio));
        }
        if self.max_out_degree == Some(0) {
            return Err(ParamError::OutDegree);
        }
        Ok(())
    }
}

const NODE_TYPES: [&str; 3] = ["Class", "Method", "TypeRef"];
const NODE_TYPE_WEIGHTS: [u32; 3] = [2, 2, 1];
// (name, source type, target type) as indices into NODE_TYPES
const EDGE_TYPES: [(&str, usize, usize); 4] = [
    ("overrides", 1, 1),
    ("owns", 0, 1),
    ("returnType", 1, 2),
    ("superclass", 0, 0),
];

/// Class, Method and TypeRef with superclass, owns, returnType and overrides.
pub fn oo_type_graph() -> Arc<TypeGraph> {
    let tg = TypeGraph::new(
        NODE_TYPES.iter().map(|&t| TypeId::from(t)),
        EDGE_TYPES.iter().map(|&(name, s, t)| {
            (
                TypeId::from(name),
                EdgeTypeDecl {
                    source: NODE_TYPES[s].into(),
                    target: NODE_TYPES[t].into(),
                },
            )
        }),
    )
    .expect("static type graph is consistent");
    Arc::new(tg)
}

/// The three well-formedness constraints of the OO type graph:
/// `consistent_override`, `unique_return_type` and `unique_superclass`.
pub fn oo_constraints(tg: &Arc<TypeGraph>) -> Vec<Pattern> {
    let pattern = |name: &str, nodes: &[(&str, &str)], edges: &[(&str, &str, &str, &str)]| {
        let mut b = ElementStore::builder();
        for &(id, ty) in nodes {
            b.add_node(id, ty).expect("fresh id");
        }
        for &(id, ty, s, t) in edges {
            b.add_edge(id, ty, s, t).expect("fresh id");
        }
        let graph = Model::full(b.build().expect("closed pattern"), tg.clone());
        Pattern::new(name, graph).expect("pattern conforms to the OO type graph")
    };
    vec![
        pattern(
            "consistent_override",
            &[
                ("m1", "Method"),
                ("m2", "Method"),
                ("t1", "TypeRef"),
                ("t2", "TypeRef"),
            ],
            &[
                ("o", "overrides", "m1", "m2"),
                ("r1", "returnType", "m1", "t1"),
                ("r2", "returnType", "m2", "t2"),
            ],
        ),
        pattern(
            "unique_return_type",
            &[("m", "Method"), ("t1", "TypeRef"), ("t2", "TypeRef")],
            &[
                ("r1", "returnType", "m", "t1"),
                ("r2", "returnType", "m", "t2"),
            ],
        ),
        pattern(
            "unique_superclass",
            &[("c", "Class"), ("s1", "Class"), ("s2", "Class")],
            &[
                ("e1", "superclass", "c", "s1"),
                ("e2", "superclass", "c", "s2"),
            ],
        ),
    ]
}

/// Element universe plus per-version membership, built up before the store.
struct Draft {
    node_types: Vec<usize>,
    edges: Vec<(usize, usize, usize)>,
    // per-version nodes and edges
    versions: Vec<(FixedBitSet, FixedBitSet)>,
}

struct Builder<'p> {
    p: &'p GeneratorParams,
    rng: ChaCha8Rng,
    draft: Draft,
}

impl Builder<'_> {
    fn new_node(&mut self) -> usize {
        let ty = pick_weighted(&mut self.rng, &NODE_TYPE_WEIGHTS);
        self.draft.node_types.push(ty);
        self.draft.node_types.len() - 1
    }

    fn admits_edge(
        &self,
        nodes: &FixedBitSet,
        edges: &FixedBitSet,
        ty: usize,
        s: usize,
        t: usize,
    ) -> bool {
        if s == t || !nodes.contains(s) || !nodes.contains(t) {
            return false;
        }
        let mut out = 0;
        for e in edges.ones() {
            let (ety, es, et) = self.draft.edges[e];
            if ety == ty && es == s {
                if et == t {
                    return false;
                }
                out += 1;
            }
        }
        self.p.max_out_degree.is_none_or(|cap| out < cap)
    }

    /// Adds a fresh random edge between present nodes, if one fits.
    fn fresh_edge(&mut self, nodes: &FixedBitSet, edges: &mut FixedBitSet) -> bool {
        let ty = self.rng.gen_range(0..EDGE_TYPES.len());
        let (_, st, tt) = EDGE_TYPES[ty];
        let of_type = |want: usize| -> Vec<usize> {
            nodes
                .ones()
                .filter(|&n| self.draft.node_types[n] == want)
                .collect()
        };
        let (sources, targets) = (of_type(st), of_type(tt));
        if sources.is_empty() || targets.is_empty() {
            return false;
        }
        for _ in 0..8 {
            let s = *sources.choose(&mut self.rng).expect("nonempty");
            let t = *targets.choose(&mut self.rng).expect("nonempty");
            if self.admits_edge(nodes, edges, ty, s, t) {
                self.draft.edges.push((ty, s, t));
                let e = self.draft.edges.len() - 1;
                edges.grow(e + 1);
                edges.insert(e);
                return true;
            }
        }
        false
    }

    /// Re-adds an element known to the store but absent from this version,
    /// sampling a few candidates.
    fn revive(&mut self, nodes: &mut FixedBitSet, edges: &mut FixedBitSet) -> bool {
        nodes.grow(self.draft.node_types.len());
        edges.grow(self.draft.edges.len());
        for _ in 0..16 {
            if self.rng.gen_bool(0.5) {
                let n = self.rng.gen_range(0..self.draft.node_types.len().max(1));
                if n < self.draft.node_types.len() && !nodes.contains(n) {
                    nodes.insert(n);
                    return true;
                }
            } else if !self.draft.edges.is_empty() {
                let e = self.rng.gen_range(0..self.draft.edges.len());
                let (ty, s, t) = self.draft.edges[e];
                if !edges.contains(e) && self.admits_edge(nodes, edges, ty, s, t) {
                    edges.insert(e);
                    return true;
                }
            }
        }
        false
    }

    fn create(&mut self, nodes: &mut FixedBitSet, edges: &mut FixedBitSet) -> bool {
        if self.rng.gen_bool(self.p.recreate_prob) && self.revive(nodes, edges) {
            return true;
        }
        if self.rng.gen_bool(0.7) && self.fresh_edge(nodes, edges) {
            return true;
        }
        let n = self.new_node();
        nodes.grow(n + 1);
        nodes.insert(n);
        true
    }

    fn delete(&mut self, nodes: &mut FixedBitSet, edges: &mut FixedBitSet) -> bool {
        let present_edges: Vec<usize> = edges.ones().collect();
        if !present_edges.is_empty() && self.rng.gen_bool(0.7) {
            edges.set(
                *present_edges.choose(&mut self.rng).expect("nonempty"),
                false,
            );
            return true;
        }
        let present_nodes: Vec<usize> = nodes.ones().collect();
        let Some(&n) = present_nodes.choose(&mut self.rng) else {
            return false;
        };
        nodes.set(n, false);
        for e in present_edges {
            let (_, s, t) = self.draft.edges[e];
            if s == n || t == n {
                edges.set(e, false);
            }
        }
        true
    }

    fn edit(
        &mut self,
        mut nodes: FixedBitSet,
        mut edges: FixedBitSet,
    ) -> (FixedBitSet, FixedBitSet) {
        for _ in 0..self.p.edits_per_modification {
            let delete = self.rng.gen_bool(self.p.deletion_bias);
            let done = if delete {
                self.delete(&mut nodes, &mut edges)
            } else {
                false
            };
            if !done {
                self.create(&mut nodes, &mut edges);
            }
        }
        (nodes, edges)
    }
}

fn pick_weighted(rng: &mut ChaCha8Rng, weights: &[u32]) -> usize {
    let mut x = rng.gen_range(0..weights.iter().sum::<u32>());
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    unreachable!("x is below the weight total")
}

fn width(count: usize) -> usize {
    count.saturating_sub(1).to_string().len().max(3)
}

/// Generates a correct versioning over [`oo_type_graph`]. Equal parameters
/// give equal versionings.
pub fn generate_versioning(p: &GeneratorParams) -> Result<ModelVersioning, ParamError> {
    p.check()?;
    let mut b = Builder {
        p,
        rng: ChaCha8Rng::seed_from_u64(p.seed),
        draft: Draft {
            node_types: Vec::new(),
            edges: Vec::new(),
            versions: Vec::new(),
        },
    };

    let mut nodes = FixedBitSet::new();
    for _ in 0..p.base_size {
        let n = b.new_node();
        nodes.grow(n + 1);
        nodes.insert(n);
    }
    let mut edges = FixedBitSet::new();
    let wanted = (p.root_edge_ratio * p.base_size as f64).round() as usize;
    let mut placed = 0;
    for _ in 0..wanted.saturating_mul(4) {
        if placed == wanted {
            break;
        }
        if b.fresh_edge(&nodes, &mut edges) {
            placed += 1;
        }
    }
    b.draft.versions.push((nodes, edges));

    let mut children = vec![0usize];
    let mut ancestors = vec![FixedBitSet::with_capacity(p.version_count)];
    let mut mods: Vec<(usize, usize)> = Vec::new();
    let mut tip = 0;
    for v in 1..p.version_count {
        let open: Vec<usize> = (0..v).filter(|&u| children[u] < p.branch_factor).collect();
        let extend = b.rng.gen_bool(p.linear_bias) && children[tip] < p.branch_factor;
        let first = if extend {
            tip
        } else {
            *open
                .choose(&mut b.rng)
                .expect("the newest version has no children")
        };
        let mut parents = vec![first];
        if b.rng.gen_bool(p.merge_prob) {
            let unrelated: Vec<usize> = open
                .iter()
                .copied()
                .filter(|&u| {
                    u != first && !ancestors[first].contains(u) && !ancestors[u].contains(first)
                })
                .collect();
            if let Some(&second) = unrelated.choose(&mut b.rng) {
                parents.push(second);
            }
        }
        let (mut nodes, mut edges) = b.draft.versions[first].clone();
        let mut anc = FixedBitSet::with_capacity(p.version_count);
        for &u in &parents {
            let (n, e) = &b.draft.versions[u];
            nodes.grow(n.len());
            nodes.union_with(n);
            edges.grow(e.len());
            edges.union_with(e);
            anc.insert(u);
            anc.union_with(&ancestors[u]);
            children[u] += 1;
            mods.push((u, v));
        }
        let version = b.edit(nodes, edges);
        b.draft.versions.push(version);
        children.push(0);
        ancestors.push(anc);
        if first == tip {
            tip = v;
        }
    }

    Ok(assemble(b.draft, &mods, p.version_count))
}

fn assemble(draft: Draft, mods: &[(usize, usize)], version_count: usize) -> ModelVersioning {
    let node_id = |n: usize| format!("n{n:06}");
    let edge_id = |e: usize| format!("e{e:06}");
    let w = width(version_count);
    let version_id = |v: usize| VersionId::from(format!("v{v:0w$}"));

    let mut sb = ElementStore::builder();
    for (n, &ty) in draft.node_types.iter().enumerate() {
        sb.add_node(node_id(n), NODE_TYPES[ty])
            .expect("fresh node id");
    }
    for (e, &(ty, s, t)) in draft.edges.iter().enumerate() {
        sb.add_edge(edge_id(e), EDGE_TYPES[ty].0, node_id(s), node_id(t))
            .expect("fresh edge id");
    }
    let store = sb.build().expect("endpoints are declared");
    let tg = oo_type_graph();
    let versions = draft.versions.iter().enumerate().map(|(v, (ns, es))| {
        let m = Model::from_ids(
            store.clone(),
            tg.clone(),
            ns.ones().map(node_id),
            es.ones().map(edge_id),
        )
        .expect("ids come from the store");
        (version_id(v), m)
    });
    let versions: Vec<_> = versions.collect();
    let mods: BTreeSet<_> = mods
        .iter()
        .map(|&(a, b)| (version_id(a), version_id(b)))
        .collect();
    let v = ModelVersioning::new(store, tg, versions, mods, version_id(0))
        .expect("generated versions are consistent");
    debug_assert!(validate_versioning(&v).is_ok());
    v
}
