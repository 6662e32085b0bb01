use std::fs;

use ontokg::core::graph::{
    validate_graph, EntityNode, KnowledgeGraph, NodeKind, RelationEdge, Violation,
};
use ontokg::csv_io::{
    graph_to_csv, load_graph, load_graph_dir, save_graph, CsvError, EDGES_FILE, NODES_FILE,
};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = String> {
    prop_oneof![
        "[A-Za-z0-9 .-]{0,12}",
        "(\\PC|[,\"\n\r\t])*",
        Just("a,b".to_string()),
        Just("\"quoted\"".to_string()),
        Just("line\r\nbreak".to_string()),
    ]
}

fn node(i: usize) -> impl Strategy<Value = EntityNode> {
    let attrs = prop::collection::vec(("[a-z][a-z0-9 _,\"\\\\]{0,6}", field()), 0..3);
    (any::<bool>(), field(), "[A-Za-z]{1,10}", field(), attrs).prop_map(
        move |(chunk, name, class, text, attrs)| {
            let mut seen = std::collections::BTreeSet::new();
            let attributes = attrs
                .into_iter()
                .filter(|(k, _)| seen.insert(k.clone()))
                .collect();
            if chunk {
                EntityNode {
                    id: format!("doc,{i}#\"{i}\""),
                    name,
                    class: String::new(),
                    kind: NodeKind::Chunk,
                    text: format!("{text}x"),
                    attributes,
                }
            } else {
                EntityNode {
                    id: format!("n{i}"),
                    name,
                    class,
                    kind: NodeKind::Entity,
                    text,
                    attributes,
                }
            }
        },
    )
}

fn valid_graph() -> impl Strategy<Value = KnowledgeGraph> {
    (1usize..8)
        .prop_flat_map(|n| {
            let nodes: Vec<_> = (0..n).map(node).collect();
            let edges = prop::collection::vec((0..n, "[A-Za-z_,]{1,8}", 0..n), 0..12);
            (nodes, edges)
        })
        .prop_map(|(nodes, edges)| {
            let mut kg = KnowledgeGraph::new();
            for n in nodes {
                kg.add_node(n).unwrap();
            }
            for (s, r, d) in edges {
                let (s, d) = (kg.nodes[s].id.clone(), kg.nodes[d].id.clone());
                kg.add_edge(RelationEdge::new(s, r, d)).unwrap();
            }
            kg
        })
}

/// Like `valid_graph`, but ids, classes, texts and endpoints may break the
/// invariants.
fn any_graph() -> impl Strategy<Value = KnowledgeGraph> {
    let node = (
        prop::sample::select(vec!["", "a", "b", "c", "a,b"]),
        prop::sample::select(vec!["", "Thing"]),
        any::<bool>(),
        prop::sample::select(vec!["", "text"]),
        prop::collection::vec(
            (prop::sample::select(vec!["", "k", "k=", "j"]), "[a-z]{0,3}"),
            0..3,
        ),
    )
        .prop_map(|(id, class, chunk, text, attrs)| EntityNode {
            id: id.into(),
            name: "n".into(),
            class: class.into(),
            kind: if chunk {
                NodeKind::Chunk
            } else {
                NodeKind::Entity
            },
            text: text.into(),
            attributes: attrs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        });
    let edge = (
        prop::sample::select(vec!["a", "b", "z"]),
        prop::sample::select(vec!["", "R"]),
        prop::sample::select(vec!["a", "c", "z"]),
    )
        .prop_map(|(s, r, d)| RelationEdge::new(s, r, d));
    (
        prop::collection::vec(node, 0..5),
        prop::collection::vec(edge, 0..5),
    )
        .prop_map(|(nodes, edges)| KnowledgeGraph { nodes, edges })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn save_then_load_is_identity(kg in valid_graph()) {
        let dir = tempfile::tempdir().unwrap();
        save_graph(&kg, dir.path()).unwrap();
        prop_assert_eq!(load_graph_dir(dir.path()).unwrap(), kg.clone());
        prop_assert_eq!(graph_to_csv(&kg), graph_to_csv(&kg));
        let first = fs::read(dir.path().join(NODES_FILE)).unwrap();
        save_graph(&kg, dir.path()).unwrap();
        prop_assert_eq!(fs::read(dir.path().join(NODES_FILE)).unwrap(), first);
    }

    #[test]
    fn load_accepts_exactly_the_valid_graphs(kg in any_graph()) {
        let dir = tempfile::tempdir().unwrap();
        let (nodes, edges) = graph_to_csv(&kg);
        fs::write(dir.path().join(NODES_FILE), nodes).unwrap();
        fs::write(dir.path().join(EDGES_FILE), edges).unwrap();
        let loaded = load_graph_dir(dir.path());
        prop_assert_eq!(validate_graph(&kg).is_valid(), loaded.is_ok(), "{:?}", loaded.err());
        if let Ok(back) = loaded {
            prop_assert_eq!(back, kg);
        }
    }
}

fn write_pair(nodes: &str, edges: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(NODES_FILE), nodes).unwrap();
    fs::write(dir.path().join(EDGES_FILE), edges).unwrap();
    dir
}

#[test]
fn header_only_files_are_an_empty_graph() {
    let dir = write_pair("id,name,class,kind,text,attributes\n", "src,relation,dst\n");
    assert_eq!(load_graph_dir(dir.path()).unwrap(), KnowledgeGraph::new());

    let out = tempfile::tempdir().unwrap();
    save_graph(&KnowledgeGraph::new(), out.path()).unwrap();
    assert_eq!(
        fs::read_to_string(out.path().join(NODES_FILE)).unwrap(),
        "id,name,class,kind,text,attributes\n"
    );
    assert_eq!(
        fs::read_to_string(out.path().join(EDGES_FILE)).unwrap(),
        "src,relation,dst\n"
    );
}

#[test]
fn minimal_row_with_self_loop() {
    let dir = write_pair(
        "id,name,class,kind,text,attributes\nn1,Granter.ai,Organization,entity,\"AI grant-writing company\",\n",
        "src,relation,dst\nn1,FUNDED_BY,n1\n",
    );
    let kg = load_graph_dir(dir.path()).unwrap();
    assert_eq!(kg.nodes.len(), 1);
    assert_eq!(kg.nodes[0].text, "AI grant-writing company");
    assert_eq!(kg.edges, vec![RelationEdge::new("n1", "FUNDED_BY", "n1")]);
}

#[test]
fn commas_are_quoted() {
    let mut kg = KnowledgeGraph::new();
    kg.add_node(
        EntityNode::entity("n1", "Smith, Jones", "Organization").with_attribute("city", "Porto"),
    )
    .unwrap();
    let (nodes, _) = graph_to_csv(&kg);
    assert_eq!(
        String::from_utf8(nodes).unwrap(),
        "id,name,class,kind,text,attributes\nn1,\"Smith, Jones\",Organization,entity,,city=Porto\n"
    );
}

#[test]
fn errors_name_the_file_and_row() {
    let nodes = "id,name,class,kind,text,attributes\nn1,A,T,entity,,\nn2,B,T,entity,,\n";
    let dir = write_pair(nodes, "src,relation,dst\nn1,R,n2\nn2,R,n9\n");
    match load_graph_dir(dir.path()) {
        Err(CsvError::Invalid {
            path,
            violation: Violation::UnknownEndpoint { row, id },
        }) => {
            assert!(path.ends_with(EDGES_FILE));
            assert_eq!((row, id.as_str()), (2, "n9"));
        }
        other => panic!("unexpected {other:?}"),
    }

    let dir = write_pair(
        "id,name,class,kind,text,attributes\nn1,A,T,entity,,\nn1,B,T,entity,,\n",
        "src,relation,dst\n",
    );
    match load_graph_dir(dir.path()) {
        Err(CsvError::Invalid {
            violation: Violation::DuplicateNodeId { first_row, row, .. },
            ..
        }) => {
            assert_eq!((first_row, row), (1, 2));
        }
        other => panic!("unexpected {other:?}"),
    }

    let dir = write_pair("id,name,class,kind,text\n", "src,relation,dst\n");
    assert!(matches!(
        load_graph_dir(dir.path()),
        Err(CsvError::Header { .. })
    ));

    let dir = write_pair(
        "id,name,class,kind,text,attributes\nn1,A,T,entity\n",
        "src,relation,dst\n",
    );
    assert!(matches!(
        load_graph_dir(dir.path()),
        Err(CsvError::Row { row: 1, .. })
    ));

    let dir = write_pair(
        "id,name,class,kind,text,attributes\nn1,A,T,person,,\n",
        "src,relation,dst\n",
    );
    assert!(matches!(
        load_graph_dir(dir.path()),
        Err(CsvError::Row { row: 1, .. })
    ));

    let dir = tempfile::tempdir().unwrap();
    let missing = load_graph(&dir.path().join("nope.csv"), &dir.path().join(EDGES_FILE));
    assert!(matches!(missing, Err(CsvError::Io { .. })));
}

#[test]
fn crlf_input_is_accepted() {
    let dir = write_pair(
        "id,name,class,kind,text,attributes\r\nn1,A,T,entity,,\r\n",
        "src,relation,dst\r\n",
    );
    assert_eq!(load_graph_dir(dir.path()).unwrap().nodes.len(), 1);
}
