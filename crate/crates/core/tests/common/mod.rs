//! Brute-force oracles and instance builders shared by the integration tests.
//!
//! The oracles work on plain id sets and never call the library's matcher,
//! DAG closure or merge code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use mvgraph::generator::{generate_versioning, oo_constraints, oo_type_graph, GeneratorParams};
use mvgraph::graph::{ElementStore, Match, Model, Pattern, TypeGraph};
use mvgraph::versioning::{ModelVersioning, VersionId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Node and edge ids of a model.
pub type Ids = (BTreeSet<String>, BTreeSet<String>);

pub fn ids(m: &Model) -> Ids {
    (
        m.node_ids().map(|n| n.to_string()).collect(),
        m.edge_ids().map(|e| e.to_string()).collect(),
    )
}

pub fn model_of(store: &Arc<ElementStore>, tg: &Arc<TypeGraph>, ids: &Ids) -> Model {
    Model::from_ids(store.clone(), tg.clone(), &ids.0, &ids.1).unwrap()
}

struct Edge {
    id: String,
    ty: String,
    source: String,
    target: String,
}

fn edges_of(m: &Model) -> Vec<Edge> {
    let s = m.store();
    m.edges()
        .map(|e| Edge {
            id: s.edge_id(e).to_string(),
            ty: s.edge_type(e).to_string(),
            source: s.node_id(s.source(e)).to_string(),
            target: s.node_id(s.target(e)).to_string(),
        })
        .collect()
}

fn nodes_of(m: &Model) -> Vec<(String, String)> {
    let s = m.store();
    m.nodes()
        .map(|n| (s.node_id(n).to_string(), s.node_type(n).to_string()))
        .collect()
}

/// Every injective, type- and incidence-preserving map from `pattern` into
/// `host`, found by trying all node assignments and then all edge assignments.
pub fn brute_matches(pattern: &Model, host: &Model) -> Vec<Match> {
    let pn = nodes_of(pattern);
    let pe = edges_of(pattern);
    let hn = nodes_of(host);
    let he = edges_of(host);
    let mut out = Vec::new();
    let mut node_map: Vec<usize> = Vec::new();
    assign_nodes(&pn, &pe, &hn, &he, &mut node_map, &mut out);
    out.sort();
    out
}

fn assign_nodes(
    pn: &[(String, String)],
    pe: &[Edge],
    hn: &[(String, String)],
    he: &[Edge],
    node_map: &mut Vec<usize>,
    out: &mut Vec<Match>,
) {
    if node_map.len() == pn.len() {
        let nm: BTreeMap<&str, &str> = pn
            .iter()
            .zip(node_map.iter())
            .map(|(p, &h)| (p.0.as_str(), hn[h].0.as_str()))
            .collect();
        let mut edge_map = Vec::new();
        assign_edges(pe, he, &nm, &mut edge_map, &mut |em| {
            out.push(Match {
                node_map: nm.iter().map(|(p, h)| ((*p).into(), (*h).into())).collect(),
                edge_map: pe
                    .iter()
                    .zip(em.iter())
                    .map(|(p, &h)| (p.id.as_str().into(), he[h].id.as_str().into()))
                    .collect(),
            })
        });
        return;
    }
    let ty = &pn[node_map.len()].1;
    for h in 0..hn.len() {
        if &hn[h].1 == ty && !node_map.contains(&h) {
            node_map.push(h);
            assign_nodes(pn, pe, hn, he, node_map, out);
            node_map.pop();
        }
    }
}

fn assign_edges(
    pe: &[Edge],
    he: &[Edge],
    nm: &BTreeMap<&str, &str>,
    edge_map: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    if edge_map.len() == pe.len() {
        emit(edge_map);
        return;
    }
    let p = &pe[edge_map.len()];
    for h in 0..he.len() {
        let e = &he[h];
        if e.ty == p.ty
            && e.source == nm[p.source.as_str()]
            && e.target == nm[p.target.as_str()]
            && !edge_map.contains(&h)
        {
            edge_map.push(h);
            assign_edges(pe, he, nm, edge_map, emit);
            edge_map.pop();
        }
    }
}

/// Strict predecessors of every version, by depth-first search over the
/// modification list.
pub fn brute_pre(v: &ModelVersioning) -> BTreeMap<String, BTreeSet<String>> {
    let mut parents: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (a, b) in v.modifications() {
        parents
            .entry(b.to_string())
            .or_default()
            .push(a.to_string());
    }
    let mut out = BTreeMap::new();
    for id in v.version_ids() {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<String> = parents.get(id.as_str()).cloned().unwrap_or_default();
        while let Some(x) = stack.pop() {
            if seen.insert(x.clone()) {
                stack.extend(parents.get(&x).cloned().unwrap_or_default());
            }
        }
        out.insert(id.to_string(), seen);
    }
    out
}

/// Latest common predecessors: empty for related versions, otherwise the
/// common predecessors that precede no other common predecessor.
pub fn brute_pre_c(pre: &BTreeMap<String, BTreeSet<String>>, i: &str, j: &str) -> BTreeSet<String> {
    if pre[i].contains(j) || pre[j].contains(i) {
        return BTreeSet::new();
    }
    let common: BTreeSet<&String> = pre[i].intersection(&pre[j]).collect();
    common
        .iter()
        .filter(|c| !common.iter().any(|x| pre[x.as_str()].contains(c.as_str())))
        .map(|c| (*c).clone())
        .collect()
}

/// All `(i, j, c)` with `i < j` and `c` a latest common predecessor.
pub fn brute_triples(v: &ModelVersioning, single: bool) -> Vec<(String, String, String)> {
    let pre = brute_pre(v);
    let ids: Vec<String> = v.version_ids().iter().map(|x| x.to_string()).collect();
    let mut out = Vec::new();
    for (a, i) in ids.iter().enumerate() {
        for j in &ids[a + 1..] {
            let cs = brute_pre_c(&pre, i, j);
            let cs: Vec<String> = if single {
                cs.into_iter().take(1).collect()
            } else {
                cs.into_iter().collect()
            };
            for c in cs {
                out.push((i.clone(), j.clone(), c));
            }
        }
    }
    out
}

fn endpoints(store: &ElementStore, e: &str) -> (String, String) {
    let ix = store.edge(e).unwrap();
    (
        store.node_id(store.source(ix)).to_string(),
        store.node_id(store.target(ix)).to_string(),
    )
}

/// `(edge, node)`: `edge` created on one side, its endpoint `node` deleted on the other.
pub fn brute_conflicts(
    store: &ElementStore,
    src: &Ids,
    t1: &Ids,
    t2: &Ids,
) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for (creator, deleter) in [(t1, t2), (t2, t1)] {
        for e in creator.1.difference(&src.1) {
            let (s, t) = endpoints(store, e);
            for n in [s, t] {
                if src.0.contains(&n) && !deleter.0.contains(&n) {
                    out.insert((e.clone(), n));
                }
            }
        }
    }
    out
}

/// Default three-way merge: keep what both keep, add what either creates.
fn default_merge(src: &Ids, t1: &Ids, t2: &Ids) -> Ids {
    let pick =
        |s: &BTreeSet<String>, a: &BTreeSet<String>, b: &BTreeSet<String>| -> BTreeSet<String> {
            a.union(b)
                .filter(|x| {
                    if s.contains(*x) {
                        a.contains(*x) && b.contains(*x)
                    } else {
                        true
                    }
                })
                .cloned()
                .collect()
        };
    (pick(&src.0, &t1.0, &t2.0), pick(&src.1, &t1.1, &t2.1))
}

fn is_proper(store: &ElementStore, m: &Ids) -> bool {
    m.1.iter().all(|e| {
        let (s, t) = endpoints(store, e);
        m.0.contains(&s) && m.0.contains(&t)
    })
}

/// Merge results of every decision vector over the conflicts that yields a
/// proper graph, in no particular order.
pub fn brute_strategy_results(store: &ElementStore, src: &Ids, t1: &Ids, t2: &Ids) -> Vec<Ids> {
    let conflicts: Vec<_> = brute_conflicts(store, src, t1, t2).into_iter().collect();
    let base = default_merge(src, t1, t2);
    let mut out = Vec::new();
    for mask in 0u32..(1 << conflicts.len()) {
        let mut m = base.clone();
        for (k, (e, n)) in conflicts.iter().enumerate() {
            if mask >> k & 1 == 1 {
                m.0.insert(n.clone());
            } else {
                m.1.remove(e);
            }
        }
        if is_proper(store, &m) {
            out.push(m);
        }
    }
    out
}

/// The default merge with every conflicting edge creation reverted.
pub fn brute_merge_min(store: &ElementStore, src: &Ids, t1: &Ids, t2: &Ids) -> Ids {
    let mut m = default_merge(src, t1, t2);
    for (e, _) in brute_conflicts(store, src, t1, t2) {
        m.1.remove(&e);
    }
    m
}

/// Small edit-based versioning from the library generator; the seed also
/// picks the shape parameters.
pub fn small_generated(seed: u64) -> ModelVersioning {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut p = GeneratorParams::new(seed, rng.gen_range(3..=20), rng.gen_range(1..=8));
    p.branch_factor = rng.gen_range(1..=3);
    p.edits_per_modification = rng.gen_range(1..=6);
    p.deletion_bias = rng.gen_range(0.2..0.7);
    p.root_edge_ratio = rng.gen_range(0.5..2.5);
    p.merge_prob = rng.gen_range(0.0..0.5);
    p.recreate_prob = rng.gen_range(0.0..0.4);
    generate_versioning(&p).unwrap()
}

/// A versioning whose versions are independent random proper subgraphs of a
/// random OO-typed store (self-loops and parallel edges included), over a
/// random DAG rooted at `v0` in which some versions have two parents.
pub fn arbitrary_versioning(seed: u64, max_versions: usize, max_nodes: usize) -> ModelVersioning {
    const NODE_TYPES: [&str; 3] = ["Class", "Method", "TypeRef"];
    const EDGE_TYPES: [(&str, usize, usize); 4] = [
        ("overrides", 1, 1),
        ("owns", 0, 1),
        ("returnType", 1, 2),
        ("superclass", 0, 0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes.max(2));
    let types: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
    let mut b = ElementStore::builder();
    for (k, &t) in types.iter().enumerate() {
        b.add_node(format!("n{k}"), NODE_TYPES[t]).unwrap();
    }
    let mut edges = Vec::new();
    for k in 0..rng.gen_range(0..=2 * n) {
        let (name, st, tt) = EDGE_TYPES[rng.gen_range(0..EDGE_TYPES.len())];
        let ss: Vec<usize> = (0..n).filter(|&x| types[x] == st).collect();
        let ts: Vec<usize> = (0..n).filter(|&x| types[x] == tt).collect();
        if let (Some(&s), Some(&t)) = (ss.choose(&mut rng), ts.choose(&mut rng)) {
            b.add_edge(format!("e{k}"), name, format!("n{s}"), format!("n{t}"))
                .unwrap();
            edges.push((format!("e{k}"), format!("n{s}"), format!("n{t}")));
        }
    }
    let store = b.build().unwrap();
    let tg = oo_type_graph();
    let count = rng.gen_range(1..=max_versions.max(1));
    let mut versions = Vec::new();
    for v in 0..count {
        let nodes: BTreeSet<String> = (0..n)
            .filter(|_| rng.gen_bool(0.7))
            .map(|k| format!("n{k}"))
            .collect();
        let es: BTreeSet<String> = edges
            .iter()
            .filter(|(_, s, t)| nodes.contains(s) && nodes.contains(t))
            .filter(|_| rng.gen_bool(0.6))
            .map(|(e, _, _)| e.clone())
            .collect();
        versions.push((
            VersionId::from(format!("v{v}")),
            Model::from_ids(store.clone(), tg.clone(), &nodes, &es).unwrap(),
        ));
    }
    let mut mods = Vec::new();
    for v in 1..count {
        let p = rng.gen_range(0..v);
        mods.push((
            VersionId::from(format!("v{p}")),
            VersionId::from(format!("v{v}")),
        ));
        if v > 1 && rng.gen_bool(0.3) {
            let q = rng.gen_range(0..v);
            if q != p {
                mods.push((
                    VersionId::from(format!("v{q}")),
                    VersionId::from(format!("v{v}")),
                ));
            }
        }
    }
    ModelVersioning::new(store, tg, versions, mods, "v0".into()).unwrap()
}

/// Copy of `v` with every element id passed through `rename`.
pub fn rename_elements(v: &ModelVersioning, rename: impl Fn(&str) -> String) -> ModelVersioning {
    let s = v.store();
    let mut b = ElementStore::builder();
    for n in s.nodes() {
        b.add_node(rename(s.node_id(n).as_str()), s.node_type(n).as_str())
            .unwrap();
    }
    for e in s.edges() {
        b.add_edge(
            rename(s.edge_id(e).as_str()),
            s.edge_type(e).as_str(),
            rename(s.node_id(s.source(e)).as_str()),
            rename(s.node_id(s.target(e)).as_str()),
        )
        .unwrap();
    }
    let store = b.build().unwrap();
    let versions = v.models().map(|(id, m)| {
        let nodes: Vec<String> = m.node_ids().map(|x| rename(x.as_str())).collect();
        let edges: Vec<String> = m.edge_ids().map(|x| rename(x.as_str())).collect();
        (
            id.clone(),
            Model::from_ids(store.clone(), v.type_graph().clone(), nodes, edges).unwrap(),
        )
    });
    let versions: Vec<_> = versions.collect();
    let mods: Vec<_> = v
        .modifications()
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect();
    ModelVersioning::new(
        store,
        v.type_graph().clone(),
        versions,
        mods,
        v.root().clone(),
    )
    .unwrap()
}

/// The OO constraints plus `owned_method`, a single-edge pattern that matches
/// in most versions, so merge decisions visibly change the violation sets.
pub fn test_patterns(tg: &Arc<TypeGraph>) -> Vec<Pattern> {
    let mut b = ElementStore::builder();
    b.add_node("c", "Class").unwrap();
    b.add_node("m", "Method").unwrap();
    b.add_edge("o", "owns", "c", "m").unwrap();
    let mut out = oo_constraints(tg);
    out.push(Pattern::new("owned_method", Model::full(b.build().unwrap(), tg.clone())).unwrap());
    out
}
