use std::collections::BTreeMap;

use ontokg_core::chunk::{chunk_text, reconstruct, Chunk, ChunkingConfig};
use ontokg_core::graph::{
    validate_graph, EntityNode, KnowledgeGraph, NodeKind, RelationEdge, MENTIONED_IN,
};
use ontokg_core::kg::{
    assemble_graph, attach_chunks, ChunkExtraction, ExtractedEdge, ExtractedNode, ExtractionResult,
};
use proptest::prelude::*;

fn document() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        4 => "[a-zA-Z]{1,12}",
        2 => Just(" ".to_string()),
        1 => Just(". ".to_string()),
        1 => Just("\n".to_string()),
        1 => Just("\n\n".to_string()),
        1 => "[çãé€😀]{1,3}",
    ];
    prop::collection::vec(piece, 0..120).prop_map(|p| p.concat())
}

fn config() -> impl Strategy<Value = ChunkingConfig> {
    (1usize..80)
        .prop_flat_map(|size| (Just(size), 0..size))
        .prop_map(|(s, o)| ChunkingConfig::new(s, o).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn chunks_tile_the_document(doc in document(), cfg in config()) {
        let chunks = chunk_text("doc", &doc, &cfg);
        let chars: Vec<char> = doc.chars().collect();
        prop_assert_eq!(reconstruct(&chunks), doc.clone());
        let mut covered = 0;
        for (i, c) in chunks.iter().enumerate() {
            prop_assert!(c.start < c.end && c.end <= chars.len());
            prop_assert!(c.end - c.start <= cfg.chunk_size());
            prop_assert_eq!(c.text.chars().count(), c.end - c.start);
            prop_assert_eq!(c.text.clone(), chars[c.start..c.end].iter().collect::<String>());
            prop_assert!(c.start <= covered, "gap before chunk {}", i);
            prop_assert!(c.end > covered, "chunk {} adds nothing", i);
            if i > 0 {
                prop_assert!(covered - c.start <= cfg.overlap(), "overlap exceeds the configured bound");
            }
            covered = c.end;
        }
        prop_assert_eq!(covered, chars.len());
    }
}

fn small_graph() -> KnowledgeGraph {
    let mut kg = KnowledgeGraph::new();
    for i in 0..4 {
        kg.add_node(EntityNode::entity(
            format!("e{i}"),
            format!("E{i}"),
            "Thing",
        ))
        .unwrap();
    }
    kg.add_edge(RelationEdge::new("e0", "R", "e1")).unwrap();
    kg
}

proptest! {
    #[test]
    fn attach_chunks_counts(mentions in prop::collection::vec(prop::collection::btree_set(0usize..4, 0..4), 0..6)) {
        let kg = small_graph();
        let chunks: Vec<Chunk> = (0..mentions.len())
            .map(|i| Chunk { id: format!("d#{i}"), text: format!("chunk {i}"), start: i, end: i + 1, source: "d".into() })
            .collect();
        let map: BTreeMap<String, Vec<String>> = mentions
            .iter()
            .enumerate()
            .map(|(i, m)| (format!("d#{i}"), m.iter().map(|e| format!("e{e}")).collect()))
            .collect();
        let out = attach_chunks(&kg, &chunks, &map).unwrap();
        let total: usize = mentions.iter().map(|m| m.len()).sum();
        prop_assert_eq!(out.nodes.len(), kg.nodes.len() + chunks.len());
        prop_assert_eq!(out.edges.len(), kg.edges.len() + total);
        prop_assert_eq!(&out.nodes[..kg.nodes.len()], &kg.nodes[..]);
        prop_assert_eq!(&out.edges[..kg.edges.len()], &kg.edges[..]);
        prop_assert_eq!(out.entity_view(), kg);
        prop_assert!(validate_graph(&out).is_valid());
    }

    #[test]
    fn assembly_ignores_completion_order(
        picks in prop::collection::vec(prop::collection::vec((0usize..5, 0usize..2), 0..5), 1..6),
        seed in any::<u64>(),
    ) {
        let names = ["Granter.ai", "Ana", "Voucher", "Lisbon", "Granter ai"];
        let classes = ["Organization", "Person"];
        let extractions: Vec<ChunkExtraction> = picks
            .iter()
            .enumerate()
            .map(|(i, nodes)| {
                let nodes: Vec<ExtractedNode> = nodes
                    .iter()
                    .map(|&(n, c)| ExtractedNode { name: names[n].into(), class: classes[c].into() })
                    .collect();
                let edges = nodes
                    .windows(2)
                    .map(|w| ExtractedEdge { src: w[0].name.clone(), relation: "RELATED_TO".into(), dst: w[1].name.clone() })
                    .collect();
                ChunkExtraction {
                    order: i,
                    chunk: Chunk { id: format!("d#{i}"), text: format!("text {i}"), start: i, end: i + 1, source: "d".into() },
                    result: ExtractionResult { nodes, edges, rejected: Vec::new() },
                }
            })
            .collect();
        let mut shuffled = extractions.clone();
        let mut state = seed | 1;
        for i in (1..shuffled.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        for with_chunks in [false, true] {
            let a = assemble_graph(&extractions, with_chunks).unwrap();
            prop_assert_eq!(&a, &assemble_graph(&shuffled, with_chunks).unwrap());
            prop_assert!(validate_graph(&a).is_valid());
            let mut keys: Vec<(&str, &str)> = a.nodes.iter().filter(|n| n.kind == NodeKind::Entity).map(|n| (n.name.as_str(), n.class.as_str())).collect();
            let before = keys.len();
            keys.sort();
            keys.dedup();
            prop_assert_eq!(keys.len(), before, "two nodes share (name, class)");
        }
        let plain = assemble_graph(&extractions, false).unwrap();
        let rich = assemble_graph(&extractions, true).unwrap();
        prop_assert_eq!(rich.entity_view(), plain);
        prop_assert!(rich.edges.iter().filter(|e| e.relation == MENTIONED_IN).all(|e| e.dst.starts_with("d#")));
    }
}
