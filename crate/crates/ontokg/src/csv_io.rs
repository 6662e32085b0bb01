//! Two-file CSV persistence for knowledge graphs.
//!
//! `nodes.csv`: `id,name,class,kind,text,attributes`
//! `edges.csv`: `src,relation,dst`
//!
//! RFC 4180 quoting, UTF-8, LF line endings. Rows are written in graph
//! order, so output bytes depend only on the graph.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ontokg_core::graph::{
    decode_attributes, encode_attributes, validate_graph, EntityNode, KnowledgeGraph, NodeKind,
    RelationEdge, Violation,
};

pub const NODES_FILE: &str = "nodes.csv";
pub const EDGES_FILE: &str = "edges.csv";
pub const NODE_HEADER: [&str; 6] = ["id", "name", "class", "kind", "text", "attributes"];
pub const EDGE_HEADER: [&str; 3] = ["src", "relation", "dst"];

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    Header {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}: row {row}: {message}")]
    Row {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("{path}: {violation}")]
    Invalid { path: PathBuf, violation: Violation },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CsvError + '_ {
    move |source| CsvError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CsvError {
    let row = e
        .position()
        .map_or(0, |p| p.line().saturating_sub(1) as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => CsvError::Io {
            path: path.to_path_buf(),
            source,
        },
        kind => CsvError::Row {
            path: path.to_path_buf(),
            row,
            message: format!("{kind:?}"),
        },
    }
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>, CsvError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes.as_slice());
    let found = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(CsvError::Header {
            path: path.to_path_buf(),
            expected: header.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_err(path, e))?;
        if record.len() != header.len() {
            return Err(CsvError::Row {
                path: path.to_path_buf(),
                row: i + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        rows.push(record);
    }
    Ok(rows)
}

/// Reads a graph and rejects it if any invariant is broken. Row numbers in
/// errors count data rows from 1, not counting the header.
pub fn load_graph(nodes_path: &Path, edges_path: &Path) -> Result<KnowledgeGraph, CsvError> {
    let mut kg = KnowledgeGraph::new();
    for (i, r) in read_rows(nodes_path, &NODE_HEADER)?.iter().enumerate() {
        let row_err = |message: String| CsvError::Row {
            path: nodes_path.to_path_buf(),
            row: i + 1,
            message,
        };
        let kind =
            NodeKind::parse(&r[3]).ok_or_else(|| row_err(format!("unknown kind `{}`", &r[3])))?;
        let attributes = decode_attributes(&r[5]).map_err(|e| row_err(e.to_string()))?;
        kg.nodes.push(EntityNode {
            id: r[0].to_string(),
            name: r[1].to_string(),
            class: r[2].to_string(),
            kind,
            text: r[4].to_string(),
            attributes,
        });
    }
    for r in read_rows(edges_path, &EDGE_HEADER)? {
        kg.edges.push(RelationEdge::new(&r[0], &r[1], &r[2]));
    }
    if let Some(violation) = validate_graph(&kg).violations.into_iter().next() {
        let path = match violation {
            Violation::InvalidNode { .. } | Violation::DuplicateNodeId { .. } => nodes_path,
            _ => edges_path,
        };
        return Err(CsvError::Invalid {
            path: path.to_path_buf(),
            violation,
        });
    }
    Ok(kg)
}

/// [`load_graph`] on `dir/nodes.csv` and `dir/edges.csv`.
pub fn load_graph_dir(dir: &Path) -> Result<KnowledgeGraph, CsvError> {
    load_graph(&dir.join(NODES_FILE), &dir.join(EDGES_FILE))
}

/// Node and edge files as bytes.
pub fn graph_to_csv(kg: &KnowledgeGraph) -> (Vec<u8>, Vec<u8>) {
    fn writer() -> csv::Writer<Vec<u8>> {
        csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new())
    }
    // Writing into a Vec cannot fail.
    let mut nodes = writer();
    nodes.write_record(NODE_HEADER).expect("in-memory write");
    for n in &kg.nodes {
        let attributes = encode_attributes(&n.attributes);
        nodes
            .write_record([
                &n.id,
                &n.name,
                &n.class,
                n.kind.as_str(),
                &n.text,
                &attributes,
            ])
            .expect("in-memory write");
    }
    let mut edges = writer();
    edges.write_record(EDGE_HEADER).expect("in-memory write");
    for e in &kg.edges {
        edges
            .write_record([&e.src, &e.relation, &e.dst])
            .expect("in-memory write");
    }
    (
        nodes.into_inner().expect("in-memory flush"),
        edges.into_inner().expect("in-memory flush"),
    )
}

/// Writes `nodes.csv` and `edges.csv` into `dir`, creating it if needed.
pub fn save_graph(kg: &KnowledgeGraph, dir: &Path) -> Result<(PathBuf, PathBuf), CsvError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let (nodes, edges) = graph_to_csv(kg);
    let nodes_path = dir.join(NODES_FILE);
    let edges_path = dir.join(EDGES_FILE);
    fs::write(&nodes_path, nodes).map_err(io_err(&nodes_path))?;
    fs::write(&edges_path, edges).map_err(io_err(&edges_path))?;
    Ok((nodes_path, edges_path))
}
