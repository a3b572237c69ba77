mod common;

use std::sync::Arc;

use mvgraph::graph::{
    find_monomorphisms, pcheck, EdgeTypeDecl, ElementStore, Model, Pattern, TypeGraph, TypeId,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn types() -> Arc<TypeGraph> {
    let decl = |s: &str, t: &str| EdgeTypeDecl {
        source: s.into(),
        target: t.into(),
    };
    Arc::new(
        TypeGraph::new(
            [TypeId::from("A"), TypeId::from("B")],
            [
                (TypeId::from("f"), decl("A", "A")),
                (TypeId::from("g"), decl("A", "B")),
                (TypeId::from("h"), decl("B", "B")),
            ],
        )
        .unwrap(),
    )
}

/// Random graph over `types()`; loops and parallel edges allowed.
fn random_graph(seed: u64, nodes: usize, edges: usize, prefix: &str) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ty: Vec<&str> = (0..nodes)
        .map(|_| if rng.gen_bool(0.6) { "A" } else { "B" })
        .collect();
    let mut b = ElementStore::builder();
    for (k, t) in ty.iter().enumerate() {
        b.add_node(format!("{prefix}{k}"), *t).unwrap();
    }
    let mut made = 0;
    for _ in 0..edges * 4 {
        if made == edges {
            break;
        }
        let (s, t) = (rng.gen_range(0..nodes), rng.gen_range(0..nodes));
        let name = match (ty[s], ty[t]) {
            ("A", "A") => "f",
            ("A", "B") => "g",
            ("B", "B") => "h",
            _ => continue,
        };
        b.add_edge(
            format!("{prefix}e{made}"),
            name,
            format!("{prefix}{s}"),
            format!("{prefix}{t}"),
        )
        .unwrap();
        made += 1;
    }
    Model::full(b.build().unwrap(), types())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn matches_equal_brute_force(
        host_seed in any::<u64>(),
        pattern_seed in any::<u64>(),
        host_nodes in 1usize..=8,
        host_edges in 0usize..=12,
        pattern_nodes in 1usize..=4,
        pattern_edges in 0usize..=4,
    ) {
        let host = random_graph(host_seed, host_nodes, host_edges, "h");
        let pattern = Pattern::new("p", random_graph(pattern_seed, pattern_nodes, pattern_edges, "p")).unwrap();
        let found = find_monomorphisms(&pattern, &host).unwrap();
        prop_assert_eq!(&found, &common::brute_matches(pattern.graph(), &host));
        for m in &found {
            prop_assert!(m.is_monomorphism(pattern.graph(), &host));
        }
    }

    #[test]
    fn matches_in_a_subgraph_are_matches_in_the_graph(
        seed in any::<u64>(),
        pattern_seed in any::<u64>(),
        keep in any::<u64>(),
    ) {
        let full = random_graph(seed, 7, 10, "h");
        let mut sub = full.clone();
        for (k, n) in full.nodes().enumerate() {
            if keep >> k & 1 == 0 {
                sub.remove_node(n);
            }
        }
        for e in full.edges() {
            let s = full.store();
            if !sub.contains_node(s.source(e)) || !sub.contains_node(s.target(e)) {
                sub.remove_edge(e);
            }
        }
        let pattern = Pattern::new("p", random_graph(pattern_seed, 3, 2, "p")).unwrap();
        let big = find_monomorphisms(&pattern, &full).unwrap();
        for m in find_monomorphisms(&pattern, &sub).unwrap() {
            prop_assert!(big.binary_search(&m).is_ok());
        }
    }
}

#[test]
fn two_parallel_pattern_edges_need_two_host_edges() {
    let mut b = ElementStore::builder();
    b.add_node("x", "A").unwrap();
    b.add_node("y", "A").unwrap();
    b.add_edge("p1", "f", "x", "y").unwrap();
    b.add_edge("p2", "f", "x", "y").unwrap();
    let pattern = Pattern::new("par", Model::full(b.build().unwrap(), types())).unwrap();

    let mut b = ElementStore::builder();
    b.add_node("a", "A").unwrap();
    b.add_node("c", "A").unwrap();
    b.add_edge("a1", "f", "a", "c").unwrap();
    let store = b.build().unwrap();
    assert!(pcheck(&Model::full(store, types()), &pattern)
        .unwrap()
        .is_empty());

    let mut b = ElementStore::builder();
    b.add_node("a", "A").unwrap();
    b.add_node("c", "A").unwrap();
    b.add_edge("a1", "f", "a", "c").unwrap();
    b.add_edge("a2", "f", "a", "c").unwrap();
    let host = Model::full(b.build().unwrap(), types());
    // both edge assignments, one node assignment
    assert_eq!(pcheck(&host, &pattern).unwrap().len(), 2);
}

#[test]
fn loop_pattern_only_matches_loops() {
    let mut b = ElementStore::builder();
    b.add_node("x", "A").unwrap();
    b.add_edge("l", "f", "x", "x").unwrap();
    let pattern = Pattern::new("loop", Model::full(b.build().unwrap(), types())).unwrap();
    let host = random_graph(3, 8, 12, "h");
    let expected = host
        .edges()
        .filter(|&e| {
            host.store().source(e) == host.store().target(e)
                && host.store().edge_type(e).as_str() == "f"
        })
        .count();
    assert_eq!(pcheck(&host, &pattern).unwrap().len(), expected);
}

#[test]
fn type_graph_mismatch_is_rejected() {
    let pattern = Pattern::new("p", random_graph(1, 2, 1, "p")).unwrap();
    let other = Model::full(
        random_graph(2, 3, 2, "h").store().clone(),
        Arc::new(TypeGraph::empty()),
    );
    assert!(find_monomorphisms(&pattern, &other).is_err());
}
