//! Fixture files for driving the binary.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rle_core::synthetic::{planted_topics, PlantedTopics, PlantedTopicsConfig};

pub struct Fixture {
    pub docs: PathBuf,
    pub edges: PathBuf,
    pub labels: PathBuf,
    pub planted: PlantedTopics,
}

/// Writes a planted-topic corpus as `docs.tsv`, `edges.tsv` and `labels.tsv`.
pub fn write_fixture(dir: &Path, cfg: &PlantedTopicsConfig) -> Fixture {
    let planted = planted_topics(cfg).unwrap();
    let corpus = &planted.corpus;
    let ids = corpus.doc_ids();
    let docs: String = ids
        .iter()
        .zip(corpus.tokens())
        .map(|(id, toks)| format!("{id}\t{}\n", toks.join(" ")))
        .collect();
    let edges: String = planted
        .edges
        .edges()
        .iter()
        .map(|&(s, d)| format!("{}\t{}\n", ids[s], ids[d]))
        .collect();
    let labels = corpus.labels().unwrap();
    let label_lines: String = ids
        .iter()
        .zip(&labels.assignments)
        .map(|(id, c)| format!("{id}\t{}\n", labels.class_names[c.unwrap()]))
        .collect();
    let fx = Fixture {
        docs: dir.join("docs.tsv"),
        edges: dir.join("edges.tsv"),
        labels: dir.join("labels.tsv"),
        planted,
    };
    fs::write(&fx.docs, docs).unwrap();
    fs::write(&fx.edges, edges).unwrap();
    fs::write(&fx.labels, label_lines).unwrap();
    fx
}

impl Fixture {
    /// Input flags plus pruning loose enough for the small vocabulary.
    pub fn args(&self) -> Vec<String> {
        vec![
            "--docs".into(),
            self.docs.display().to_string(),
            "--edges".into(),
            self.edges.display().to_string(),
            "--labels".into(),
            self.labels.display().to_string(),
            "--min-count".into(),
            "1".into(),
            "--max-df".into(),
            "1".into(),
        ]
    }
}

pub fn rle(args: &[String]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rle"))
        .args(args)
        .env("RLE_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// File content with timing lines removed.
pub fn without_timing(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    if path.extension().is_some_and(|e| e == "csv") {
        // last column of report tables is wall time
        text.lines()
            .map(|l| if l.starts_with("task,") || !l.contains(',') { l.to_string() } else { l.rsplit_once(',').unwrap().0.to_string() })
            .collect::<Vec<_>>()
            .join("\n")
    } else {
        text.lines()
            .filter(|l| !l.contains("seconds"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}
