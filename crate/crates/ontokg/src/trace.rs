//! Learning traces as JSON lines, one record per processed table or sentence.

use std::fs;
use std::io;
use std::path::Path;

use ontokg_core::learn::{LearningTrace, TraceRecord};

pub fn trace_to_jsonl(trace: &LearningTrace) -> String {
    let mut out = String::new();
    for record in trace.records() {
        // TraceRecord holds only strings, numbers and enums.
        out.push_str(&serde_json::to_string(record).expect("trace record serializes"));
        out.push('\n');
    }
    out
}

pub fn trace_from_jsonl(text: &str) -> Result<LearningTrace, serde_json::Error> {
    let mut trace = LearningTrace::default();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        trace.push(serde_json::from_str::<TraceRecord>(line)?);
    }
    Ok(trace)
}

pub fn write_trace(trace: &LearningTrace, path: &Path) -> io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, trace_to_jsonl(trace))
}
