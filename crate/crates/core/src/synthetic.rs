//! Planted-topic corpora: each class owns a handful of topic terms, all
//! classes share a pool of filler terms, and links mostly stay inside a
//! class. Used by tests, benches and the acceptance suite.

use std::collections::HashSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{self, Corpus, Labels, PruningConfig, Vocabulary};
use crate::error::{Error, Result};
use crate::graph::EdgeList;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTopicsConfig {
    pub n_classes: usize,
    pub docs_per_class: usize,
    /// Topic terms owned by each class.
    pub topic_terms: usize,
    /// Size of the filler pool shared by every class.
    pub filler_terms: usize,
    pub doc_len: usize,
    /// Probability that a token is drawn from the class topic terms.
    pub topic_share: f64,
    /// Outgoing links per document.
    pub links_per_doc: usize,
    /// Probability that a link leaves the class.
    pub cross_link_prob: f64,
    pub seed: u64,
}

impl Default for PlantedTopicsConfig {
    fn default() -> Self {
        Self {
            n_classes: 4,
            docs_per_class: 40,
            topic_terms: 5,
            filler_terms: 30,
            doc_len: 40,
            topic_share: 0.5,
            links_per_doc: 3,
            cross_link_prob: 0.1,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedTopics {
    /// Labeled corpus; documents of class c are contiguous.
    pub corpus: Corpus,
    pub edges: EdgeList,
    /// Planted terms per class.
    pub topics: Vec<Vec<String>>,
}

impl PlantedTopics {
    /// Every term, unpruned; filler terms are too common for the default
    /// document-frequency cap.
    pub fn vocabulary(&self) -> Result<Vocabulary> {
        corpus::build_vocabulary(
            &self.corpus,
            &HashSet::new(),
            PruningConfig {
                min_count: 1,
                max_df_ratio: 1.0,
            },
        )
    }
}

fn topic_term(class: usize, j: usize) -> String {
    match u8::try_from(class).ok().filter(|&c| c < 26) {
        Some(c) => format!("{}{}", (b'a' + c) as char, j + 1),
        None => format!("c{class}t{}", j + 1),
    }
}

pub fn planted_topics(cfg: &PlantedTopicsConfig) -> Result<PlantedTopics> {
    if cfg.n_classes < 1 || cfg.docs_per_class < 1 || cfg.topic_terms < 1 || cfg.doc_len < 1 {
        return Err(Error::config("planted corpus needs classes, documents, topic terms and tokens"));
    }
    if cfg.filler_terms == 0 && cfg.topic_share < 1.0 {
        return Err(Error::config("filler tokens requested but the filler pool is empty"));
    }
    for (name, p) in [("topic_share", cfg.topic_share), ("cross_link_prob", cfg.cross_link_prob)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config(format!("{name} must lie in [0, 1], got {p}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let topics: Vec<Vec<String>> = (0..cfg.n_classes)
        .map(|c| (0..cfg.topic_terms).map(|j| topic_term(c, j)).collect())
        .collect();
    let filler: Vec<String> = (0..cfg.filler_terms).map(|j| format!("f{j:02}")).collect();

    let n = cfg.n_classes * cfg.docs_per_class;
    let mut ids = Vec::with_capacity(n);
    let mut tokens = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for (c, topic) in topics.iter().enumerate() {
        for k in 0..cfg.docs_per_class {
            ids.push(format!("doc{c}_{k}"));
            classes.push(c);
            tokens.push(
                (0..cfg.doc_len)
                    .map(|_| {
                        let pool = if rng.random_bool(cfg.topic_share) { topic } else { &filler };
                        pool.choose(&mut rng).expect("nonempty pool").clone()
                    })
                    .collect(),
            );
        }
    }

    let mut edges = Vec::new();
    if n > 1 {
        for (src, &c) in classes.iter().enumerate() {
            for _ in 0..cfg.links_per_doc {
                let dst = if cfg.n_classes > 1 && rng.random_bool(cfg.cross_link_prob) {
                    rng.random_range(0..n)
                } else {
                    c * cfg.docs_per_class + rng.random_range(0..cfg.docs_per_class)
                };
                if dst != src {
                    edges.push((src, dst));
                }
            }
        }
    }

    let labels = Labels {
        assignments: classes.into_iter().map(Some).collect(),
        class_names: (0..cfg.n_classes).map(|c| format!("topic_{}", topic_term(c, 0).trim_end_matches('1'))).collect(),
    };
    let corpus = Corpus::new(ids, tokens)?.with_labels(labels)?;
    let edges = EdgeList::new(n, edges)?;
    Ok(PlantedTopics { corpus, edges, topics })
}
