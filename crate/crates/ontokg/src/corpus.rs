use std::fs;
use std::io;
use std::path::Path;

use ontokg_core::kg::Document;

/// Every `*.txt` file directly inside `dir`, sorted by file name. The file
/// stem becomes the document id.
pub fn load_corpus(dir: &Path) -> io::Result<Vec<Document>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Document::new(id, fs::read_to_string(&p)?))
        })
        .collect()
}
