#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_ontokg");

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Copies the pipeline fixtures (not the Turtle corpus) into `dst`.
pub fn copy_fixtures(dst: &Path) {
    let src = fixtures();
    for name in [
        "dingo.ttl",
        "schema.sql",
        "questions.tsv",
        "mock.toml",
        "experiment.toml",
    ] {
        fs::copy(src.join(name), dst.join(name)).unwrap();
    }
    fs::create_dir_all(dst.join("corpus")).unwrap();
    for entry in fs::read_dir(src.join("corpus")).unwrap() {
        let path = entry.unwrap().path();
        fs::copy(&path, dst.join("corpus").join(path.file_name().unwrap())).unwrap();
    }
}

pub fn ontokg(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(dir)
        .env_remove("LLM_ENDPOINT")
        .env_remove("EMBED_ENDPOINT")
        .args(args)
        .output()
        .expect("spawn ontokg")
}

pub fn ontokg_ok(dir: &Path, args: &[&str]) -> Output {
    let out = ontokg(dir, args);
    assert!(
        out.status.success(),
        "ontokg {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub const QUERY: &str = "Who awarded the Digital Startup Voucher to Northwind Grants?";

/// learn-rdb, build-kg (both variants), index, retrieve and eval under the
/// fixture mock. Returns every output file and the retrieval context, keyed
/// by a relative name.
pub fn run_pipeline(dir: &Path) -> Vec<(String, Vec<u8>)> {
    copy_fixtures(dir);
    let m = ["--mock", "mock.toml"];
    let with =
        |rest: &[&str]| -> Vec<String> { m.iter().chain(rest).map(|s| s.to_string()).collect() };
    let run = |args: Vec<String>| {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        ontokg_ok(dir, &refs)
    };
    run(with(&[
        "learn-rdb",
        "--schema",
        "schema.sql",
        "--reference",
        "dingo.ttl",
        "--out",
        "work/onto.ttl",
        "--trace",
        "work/trace.jsonl",
    ]));
    run(with(&[
        "build-kg",
        "--corpus",
        "corpus",
        "--ontology",
        "work/onto.ttl",
        "--out",
        "work/kg",
    ]));
    run(with(&[
        "build-kg",
        "--corpus",
        "corpus",
        "--ontology",
        "work/onto.ttl",
        "--out",
        "work/kg-chunks",
        "--with-chunks",
    ]));
    run(with(&["index", "--graph", "work/kg-chunks"]));
    let retrieved = run(with(&[
        "retrieve",
        "--graph",
        "work/kg-chunks",
        "--index",
        "work/kg-chunks/index.bin",
        "--query",
        QUERY,
        "--k",
        "4",
        "--edge-cost",
        "0.5",
    ]));
    run(with(&["eval", "--config", "experiment.toml"]));

    let mut outputs = vec![("retrieve.stdout".to_string(), retrieved.stdout)];
    let mut stack = vec![dir.join("work")];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path
                    .strip_prefix(dir)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                outputs.push((name, fs::read(&path).unwrap()));
            }
        }
    }
    outputs.sort();
    outputs
}
