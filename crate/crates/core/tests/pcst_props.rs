use std::collections::{BTreeSet, VecDeque};

use ontokg_core::graph::{EntityNode, KnowledgeGraph, RelationEdge};
use ontokg_core::pcst::{solve_approx, solve_exact, solve_pcst, PrizeAssignment, Subgraph};
use proptest::prelude::*;

struct Instance {
    kg: KnowledgeGraph,
    prizes: Vec<f64>,
    edges: Vec<(usize, usize)>,
}

fn build(n: usize, pairs: &[(usize, usize)], prizes: &[f64]) -> Instance {
    let mut kg = KnowledgeGraph::new();
    for i in 0..n {
        kg.add_node(EntityNode::entity(format!("n{i:02}"), format!("N{i}"), "T"))
            .unwrap();
    }
    let mut edges = Vec::new();
    for &(a, b) in pairs {
        if a != b {
            kg.add_edge(RelationEdge::new(
                format!("n{a:02}"),
                "R",
                format!("n{b:02}"),
            ))
            .unwrap();
            edges.push((a.min(b), a.max(b)));
        }
    }
    Instance {
        kg,
        prizes: prizes.to_vec(),
        edges,
    }
}

fn assignment(inst: &Instance) -> PrizeAssignment {
    inst.prizes
        .iter()
        .enumerate()
        .map(|(i, &p)| (format!("n{i:02}"), p))
        .collect()
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Best objective over every node subset that is connected, by union-find.
fn brute_force(inst: &Instance, edge_cost: f64) -> f64 {
    let n = inst.prizes.len();
    let mut best = 0.0f64;
    for mask in 1u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut parent: Vec<usize> = (0..n).collect();
        for &(a, b) in &inst.edges {
            if mask >> a & 1 == 1 && mask >> b & 1 == 1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let root = find(&mut parent, members[0]);
        if members.iter().any(|&v| find(&mut parent, v) != root) {
            continue;
        }
        let total: f64 = members.iter().map(|&v| inst.prizes[v]).sum();
        let value = total - edge_cost * (members.len() - 1) as f64;
        if value > best {
            best = value;
        }
    }
    best
}

fn assert_tree(kg: &KnowledgeGraph, sub: &Subgraph) {
    let nodes: BTreeSet<&str> = sub.nodes.iter().map(String::as_str).collect();
    assert_eq!(nodes.len(), sub.nodes.len());
    if nodes.is_empty() {
        assert!(sub.edges.is_empty());
        return;
    }
    assert_eq!(sub.edges.len(), nodes.len() - 1, "a tree has |V|-1 edges");
    for e in &sub.edges {
        assert!(kg.edges.contains(e), "edge {e:?} not in graph");
        assert!(nodes.contains(e.src.as_str()) && nodes.contains(e.dst.as_str()));
    }
    for id in &nodes {
        assert!(kg.node(id).is_some());
    }
    let start = sub.nodes[0].as_str();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for e in &sub.edges {
            let other = if e.src == v {
                e.dst.as_str()
            } else if e.dst == v {
                e.src.as_str()
            } else {
                continue;
            };
            if seen.insert(other) {
                queue.push_back(other);
            }
        }
    }
    assert_eq!(seen, nodes, "subgraph is not connected");
}

fn small_instance() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<f64>)> {
    (1usize..=10).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec((0..n, 0..n), 0..=2 * n),
            prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..5.0], n),
        )
    })
}

proptest! {
    #[test]
    fn exact_matches_brute_force(
        (n, pairs, prizes) in small_instance(),
        cost in prop::sample::select(vec![0.5, 1.0, 2.0]),
    ) {
        let inst = build(n, &pairs, &prizes);
        let sub = solve_pcst(&inst.kg, &assignment(&inst), cost).unwrap();
        prop_assert_eq!(sub.objective, brute_force(&inst, cost));
        assert_tree(&inst.kg, &sub);
    }

    #[test]
    fn doubling_prizes_never_hurts(
        (n, pairs, prizes) in small_instance(),
        cost in prop::sample::select(vec![0.5, 1.0, 2.0]),
    ) {
        let inst = build(n, &pairs, &prizes);
        let doubled = build(n, &pairs, &prizes.iter().map(|p| p * 2.0).collect::<Vec<_>>());
        let a = solve_exact(&inst.kg, &assignment(&inst), cost).unwrap();
        let b = solve_exact(&doubled.kg, &assignment(&doubled), cost).unwrap();
        prop_assert!(b.objective >= a.objective);
    }

    #[test]
    fn approximation_is_a_safe_tree(
        (n, pairs, prizes) in small_instance(),
        cost in prop::sample::select(vec![0.5, 1.0, 2.0]),
    ) {
        let inst = build(n, &pairs, &prizes);
        let sub = solve_approx(&inst.kg, &assignment(&inst), cost).unwrap();
        assert_tree(&inst.kg, &sub);
        let best_single = prizes.iter().cloned().fold(0.0, f64::max);
        prop_assert!(sub.objective >= best_single);
        prop_assert!(sub.objective <= brute_force(&inst, cost) + 1e-9);
    }
}

#[test]
fn larger_graphs_use_the_approximation() {
    let n = 40;
    let pairs: Vec<(usize, usize)> = (1..n)
        .map(|i| (i - 1, i))
        .chain((0..n).map(|i| (i, (i * 7 + 3) % n)))
        .collect();
    let prizes: Vec<f64> = (0..n).map(|i| if i % 5 == 0 { 3.0 } else { 0.0 }).collect();
    let inst = build(n, &pairs, &prizes);
    let sub = solve_pcst(&inst.kg, &assignment(&inst), 1.0).unwrap();
    assert_tree(&inst.kg, &sub);
    assert!(sub.objective >= 3.0);
    assert_eq!(sub, solve_pcst(&inst.kg, &assignment(&inst), 1.0).unwrap());
}
