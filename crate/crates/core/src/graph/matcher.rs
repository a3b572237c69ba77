//! Typed monomorphism enumeration.
//!
//! Backtracking over pattern nodes in a static order (highest degree first,
//! then nodes adjacent to already placed ones). Candidates come from the
//! adjacency of an already mapped neighbour when one exists, otherwise from
//! the host's per-type node list, and are pruned by type, degree and the
//! number of parallel edges required towards mapped nodes. Edge images are
//! enumerated once a full node assignment is found.

use std::collections::{BTreeMap, HashSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

use super::model::{validate_model, Model};
use super::store::{EdgeIx, NodeIx, TypeIx};
use super::types::{EdgeId, NodeId};

/// A violation pattern: the constraint is violated wherever this graph occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    name: String,
    graph: Model,
}

impl Pattern {
    pub fn new(name: impl Into<String>, graph: Model) -> Result<Self, GraphError> {
        let name = name.into();
        if graph.node_count() == 0 {
            return Err(GraphError::EmptyPattern(name));
        }
        validate_model(&graph)?;
        Ok(Self { name, graph })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn graph(&self) -> &Model {
        &self.graph
    }
}

/// A typed monomorphism from a pattern into a host, keyed by element ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Match {
    pub node_map: BTreeMap<NodeId, NodeId>,
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl Match {
    /// Re-checks injectivity, typing and incidence against pattern and host.
    pub fn is_monomorphism(&self, pattern: &Model, host: &Model) -> bool {
        let (ps, hs) = (pattern.store(), host.store());
        if self.node_map.len() != pattern.node_count()
            || self.edge_map.len() != pattern.edge_count()
        {
            return false;
        }
        let mut images = HashSet::new();
        for (p, h) in &self.node_map {
            let (Some(pn), Some(hn)) = (ps.node(p.as_str()), hs.node(h.as_str())) else {
                return false;
            };
            if !pattern.contains_node(pn)
                || !host.contains_node(hn)
                || ps.node_type(pn) != hs.node_type(hn)
                || !images.insert(hn)
            {
                return false;
            }
        }
        let mut edge_images = HashSet::new();
        for (p, h) in &self.edge_map {
            let (Some(pe), Some(he)) = (ps.edge(p.as_str()), hs.edge(h.as_str())) else {
                return false;
            };
            if !pattern.contains_edge(pe)
                || !host.contains_edge(he)
                || ps.edge_type(pe) != hs.edge_type(he)
                || !edge_images.insert(he)
            {
                return false;
            }
            let img = |n: NodeIx| self.node_map.get(ps.node_id(n)).map(|h| h.as_str());
            if img(ps.source(pe)) != Some(hs.node_id(hs.source(he)).as_str())
                || img(ps.target(pe)) != Some(hs.node_id(hs.target(he)).as_str())
            {
                return false;
            }
        }
        true
    }
}

/// Index-level match: images of pattern nodes and edges, both in pattern id order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct RawMatch {
    pub nodes: Vec<NodeIx>,
    pub edges: Vec<EdgeIx>,
}

impl RawMatch {
    pub fn to_match(&self, pattern: &Model, host: &Model) -> Match {
        let (ps, hs) = (pattern.store(), host.store());
        Match {
            node_map: pattern
                .nodes()
                .zip(&self.nodes)
                .map(|(p, &h)| (ps.node_id(p).clone(), hs.node_id(h).clone()))
                .collect(),
            edge_map: pattern
                .edges()
                .zip(&self.edges)
                .map(|(p, &h)| (ps.edge_id(p).clone(), hs.edge_id(h).clone()))
                .collect(),
        }
    }
}

/// Adjacency view of a host model, reusable across many pattern searches.
pub struct HostIndex<'a> {
    model: &'a Model,
    by_type: Vec<Vec<NodeIx>>,
    out: Vec<Vec<EdgeIx>>,
    inc: Vec<Vec<EdgeIx>>,
}

impl<'a> HostIndex<'a> {
    pub fn new(model: &'a Model) -> Self {
        let store = model.store();
        let mut by_type = vec![Vec::new(); count_types(model)];
        let mut out = vec![Vec::new(); store.node_count()];
        let mut inc = vec![Vec::new(); store.node_count()];
        for n in model.nodes() {
            by_type[store.node_type_ix(n) as usize].push(n);
        }
        for e in model.edges() {
            out[store.source(e).index()].push(e);
            inc[store.target(e).index()].push(e);
        }
        Self {
            model,
            by_type,
            out,
            inc,
        }
    }

    pub fn model(&self) -> &'a Model {
        self.model
    }

    fn count_parallel(&self, ty: TypeIx, s: NodeIx, t: NodeIx) -> usize {
        let store = self.model.store();
        self.out[s.index()]
            .iter()
            .filter(|&&e| store.edge_type_ix(e) == ty && store.target(e) == t)
            .count()
    }
}

fn count_types(model: &Model) -> usize {
    let store = model.store();
    store
        .nodes()
        .map(|n| store.node_type_ix(n) as usize + 1)
        .chain(store.edges().map(|e| store.edge_type_ix(e) as usize + 1))
        .max()
        .unwrap_or(0)
}

/// Pattern edges sharing type and endpoints; all must map to distinct host edges.
struct EdgeGroup {
    ty: TypeIx,
    source: usize,
    target: usize,
    members: Vec<usize>,
}

struct Step {
    node: usize,
    /// Group used to derive candidates from an already mapped neighbour,
    /// with `true` when `node` is the group's source.
    anchor: Option<(usize, bool)>,
    /// Groups between `node` and previously placed nodes (loops included).
    checks: Vec<usize>,
}

struct Plan {
    node_types: Vec<TypeIx>,
    out_deg: Vec<usize>,
    in_deg: Vec<usize>,
    groups: Vec<EdgeGroup>,
    steps: Vec<Step>,
    edge_count: usize,
}

impl Plan {
    /// `None` when some pattern type does not occur in the host store at all.
    fn compile(pattern: &Model, host: &Model) -> Option<Plan> {
        let (ps, hs) = (pattern.store(), host.store());
        let pnodes: Vec<NodeIx> = pattern.nodes().collect();
        let pos = |n: NodeIx| pnodes.binary_search(&n).expect("pattern is proper");
        let mut node_types = Vec::with_capacity(pnodes.len());
        for &n in &pnodes {
            node_types.push(hs.type_ix(ps.node_type(n).as_str())?);
        }
        let mut out_deg = vec![0; pnodes.len()];
        let mut in_deg = vec![0; pnodes.len()];
        let mut groups: Vec<EdgeGroup> = Vec::new();
        let mut edge_count = 0;
        for (i, e) in pattern.edges().enumerate() {
            let ty = hs.type_ix(ps.edge_type(e).as_str())?;
            let (s, t) = (pos(ps.source(e)), pos(ps.target(e)));
            out_deg[s] += 1;
            in_deg[t] += 1;
            match groups
                .iter_mut()
                .find(|g| g.ty == ty && g.source == s && g.target == t)
            {
                Some(g) => g.members.push(i),
                None => groups.push(EdgeGroup {
                    ty,
                    source: s,
                    target: t,
                    members: vec![i],
                }),
            }
            edge_count += 1;
        }

        let n = pnodes.len();
        let mut placed = vec![false; n];
        let mut steps = Vec::with_capacity(n);
        for _ in 0..n {
            let links = |p: usize| {
                groups
                    .iter()
                    .filter(|g| {
                        (g.source == p && placed[g.target]) || (g.target == p && placed[g.source])
                    })
                    .count()
            };
            let next = (0..n)
                .filter(|&p| !placed[p])
                .max_by(|&a, &b| {
                    (links(a), out_deg[a] + in_deg[a])
                        .cmp(&(links(b), out_deg[b] + in_deg[b]))
                        .then(b.cmp(&a))
                })
                .expect("unplaced node remains");
            placed[next] = true;
            let checks: Vec<usize> = groups
                .iter()
                .enumerate()
                .filter(|(_, g)| {
                    (g.source == next && placed[g.target]) || (g.target == next && placed[g.source])
                })
                .map(|(i, _)| i)
                .collect();
            let anchor = checks.iter().find_map(|&gi| {
                let g = &groups[gi];
                if g.source == next && g.target != next {
                    Some((gi, true))
                } else if g.target == next && g.source != next {
                    Some((gi, false))
                } else {
                    None
                }
            });
            steps.push(Step {
                node: next,
                anchor,
                checks,
            });
        }
        Some(Plan {
            node_types,
            out_deg,
            in_deg,
            groups,
            steps,
            edge_count,
        })
    }
}

struct Search<'p, 'h> {
    plan: &'p Plan,
    host: &'p HostIndex<'h>,
    assign: Vec<NodeIx>,
    used: FixedBitSet,
    out: Vec<RawMatch>,
}

impl Search<'_, '_> {
    fn run(&mut self, depth: usize) {
        if depth == self.plan.steps.len() {
            self.emit_edge_maps();
            return;
        }
        let step = &self.plan.steps[depth];
        let p = step.node;
        let store = self.host.model.store();
        let ty = self.plan.node_types[p];
        let candidates: Vec<NodeIx> = match step.anchor {
            Some((gi, is_source)) => {
                let g = &self.plan.groups[gi];
                let mut c: Vec<NodeIx> = if is_source {
                    let t = self.assign[g.target];
                    self.host.inc[t.index()]
                        .iter()
                        .filter(|&&e| store.edge_type_ix(e) == g.ty)
                        .map(|&e| store.source(e))
                        .collect()
                } else {
                    let s = self.assign[g.source];
                    self.host.out[s.index()]
                        .iter()
                        .filter(|&&e| store.edge_type_ix(e) == g.ty)
                        .map(|&e| store.target(e))
                        .collect()
                };
                c.sort_unstable();
                c.dedup();
                c
            }
            None => self
                .host
                .by_type
                .get(ty as usize)
                .cloned()
                .unwrap_or_default(),
        };
        for h in candidates {
            if self.used.contains(h.index())
                || store.node_type_ix(h) != ty
                || self.host.out[h.index()].len() < self.plan.out_deg[p]
                || self.host.inc[h.index()].len() < self.plan.in_deg[p]
            {
                continue;
            }
            self.assign[p] = h;
            let ok = step.checks.iter().all(|&gi| {
                let g = &self.plan.groups[gi];
                self.host
                    .count_parallel(g.ty, self.assign[g.source], self.assign[g.target])
                    >= g.members.len()
            });
            if !ok {
                continue;
            }
            self.used.insert(h.index());
            self.run(depth + 1);
            self.used.set(h.index(), false);
        }
    }

    fn emit_edge_maps(&mut self) {
        let store = self.host.model.store();
        let options: Vec<Vec<EdgeIx>> = self
            .plan
            .groups
            .iter()
            .map(|g| {
                let (s, t) = (self.assign[g.source], self.assign[g.target]);
                self.host.out[s.index()]
                    .iter()
                    .copied()
                    .filter(|&e| store.edge_type_ix(e) == g.ty && store.target(e) == t)
                    .collect()
            })
            .collect();
        let mut edges = vec![EdgeIx(u32::MAX); self.plan.edge_count];
        let mut taken = Vec::new();
        self.assign_group(0, 0, &options, &mut edges, &mut taken);
    }

    fn assign_group(
        &mut self,
        gi: usize,
        mi: usize,
        options: &[Vec<EdgeIx>],
        edges: &mut Vec<EdgeIx>,
        taken: &mut Vec<EdgeIx>,
    ) {
        if gi == self.plan.groups.len() {
            self.out.push(RawMatch {
                nodes: self.assign.clone(),
                edges: edges.clone(),
            });
            return;
        }
        let group = &self.plan.groups[gi];
        if mi == group.members.len() {
            self.assign_group(gi + 1, 0, options, edges, taken);
            return;
        }
        let member = group.members[mi];
        for &e in &options[gi] {
            if taken.contains(&e) {
                continue;
            }
            edges[member] = e;
            taken.push(e);
            self.assign_group(gi, mi + 1, options, edges, taken);
            taken.pop();
        }
    }
}

pub(crate) fn raw_matches(
    pattern: &Model,
    host: &HostIndex<'_>,
) -> Result<Vec<RawMatch>, GraphError> {
    if pattern.type_graph() != host.model.type_graph() {
        return Err(GraphError::TypeGraphMismatch);
    }
    let Some(plan) = Plan::compile(pattern, host.model) else {
        return Ok(Vec::new());
    };
    let n = plan.node_types.len();
    let mut search = Search {
        plan: &plan,
        host,
        assign: vec![NodeIx(u32::MAX); n],
        used: FixedBitSet::with_capacity(host.model.store().node_count()),
        out: Vec::new(),
    };
    search.run(0);
    let mut out = search.out;
    out.sort_unstable();
    Ok(out)
}

/// All typed monomorphisms from `pattern` into `host`, in lexicographic order.
pub fn find_monomorphisms(pattern: &Pattern, host: &Model) -> Result<Vec<Match>, GraphError> {
    find_in_index(pattern, &HostIndex::new(host))
}

pub fn find_in_index(pattern: &Pattern, host: &HostIndex<'_>) -> Result<Vec<Match>, GraphError> {
    Ok(raw_matches(pattern.graph(), host)?
        .iter()
        .map(|m| m.to_match(pattern.graph(), host.model))
        .collect())
}

/// All violations of the constraint whose violation pattern is `phi`.
/// Empty iff `model` satisfies the constraint.
pub fn pcheck(model: &Model, phi: &Pattern) -> Result<Vec<Match>, GraphError> {
    find_monomorphisms(phi, model)
}
