//! Document ingestion, vocabulary pruning and the relative-frequency
//! document-term matrix.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;
use crate::par;

/// Stopword list shipped with the crate (the common English list).
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// Lowercases, splits on every non-alphanumeric character and drops empty
/// and all-digit tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !t.chars().all(|c| c.is_ascii_digit()))
        .map(str::to_lowercase)
        .collect()
}

/// Class assignments for (a subset of) the documents.
#[derive(Debug, Clone, PartialEq)]
pub struct Labels {
    /// Class id per document, `None` for unlabeled documents.
    pub assignments: Vec<Option<usize>>,
    /// Class names, indexed by class id.
    pub class_names: Vec<String>,
}

impl Labels {
    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Labels covering every document.
    pub fn complete(ids: &[usize]) -> Self {
        let n_classes = ids.iter().max().map_or(0, |m| m + 1);
        Self {
            assignments: ids.iter().map(|&c| Some(c)).collect(),
            class_names: (0..n_classes).map(|c| c.to_string()).collect(),
        }
    }

    /// Indices of labeled documents and their classes.
    pub fn labeled(&self) -> (Vec<usize>, Vec<usize>) {
        self.assignments
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (i, c)))
            .unzip()
    }

    pub fn members(&self, class_id: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, c)| **c == Some(class_id))
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    doc_ids: Vec<String>,
    id_index: HashMap<String, usize>,
    tokens: Vec<Vec<String>>,
    labels: Option<Labels>,
}

impl Corpus {
    /// Builds a corpus from already tokenized documents.
    pub fn new(doc_ids: Vec<String>, tokens: Vec<Vec<String>>) -> Result<Self> {
        if doc_ids.len() != tokens.len() {
            return Err(Error::config("doc_ids and token lists differ in length"));
        }
        let mut id_index = HashMap::with_capacity(doc_ids.len());
        for (i, id) in doc_ids.iter().enumerate() {
            if id_index.insert(id.clone(), i).is_some() {
                return Err(Error::data(format!("duplicate document id {id:?}")));
            }
        }
        Ok(Self {
            doc_ids,
            id_index,
            tokens,
            labels: None,
        })
    }

    /// Tokenizes `(doc_id, text)` pairs.
    pub fn from_texts<I, S, T>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let (ids, tokens) = docs
            .into_iter()
            .map(|(id, text)| (id.into(), tokenize(text.as_ref())))
            .unzip();
        Self::new(ids, tokens)
    }

    /// Reads a `doc_id<TAB>text` file, one document per line.
    pub fn read(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut docs = Vec::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (id, text) = line.split_once('\t').ok_or_else(|| {
                Error::data(format!(
                    "{}:{}: expected doc_id<TAB>text",
                    path.display(),
                    lineno + 1
                ))
            })?;
            docs.push((id.trim().to_owned(), text));
        }
        Self::from_texts(docs)
    }

    pub fn with_labels(mut self, labels: Labels) -> Result<Self> {
        if labels.assignments.len() != self.n_docs() {
            return Err(Error::config(format!(
                "{} label slots for {} documents",
                labels.assignments.len(),
                self.n_docs()
            )));
        }
        if labels
            .assignments
            .iter()
            .flatten()
            .any(|&c| c >= labels.n_classes())
        {
            return Err(Error::data("class id out of range"));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Reads a `doc_id<TAB>label` file. Class ids follow first appearance.
    pub fn read_labels(&self, path: &Path) -> Result<Labels> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut assignments = vec![None; self.n_docs()];
        let mut class_names: Vec<String> = Vec::new();
        let mut class_index: HashMap<String, usize> = HashMap::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let at = || format!("{}:{}", path.display(), lineno + 1);
            let (id, label) = line
                .split_once('\t')
                .ok_or_else(|| Error::data(format!("{}: expected doc_id<TAB>label", at())))?;
            let doc = self
                .index_of(id.trim())
                .ok_or_else(|| Error::data(format!("{}: unknown document id {id:?}", at())))?;
            let label = label.trim();
            let class = *class_index.entry(label.to_owned()).or_insert_with(|| {
                class_names.push(label.to_owned());
                class_names.len() - 1
            });
            if assignments[doc].is_some_and(|c| c != class) {
                return Err(Error::data(format!("{}: conflicting label for {id:?}", at())));
            }
            assignments[doc] = Some(class);
        }
        Ok(Labels {
            assignments,
            class_names,
        })
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn index_of(&self, doc_id: &str) -> Option<usize> {
        self.id_index.get(doc_id).copied()
    }

    pub fn tokens(&self) -> &[Vec<String>] {
        &self.tokens
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    /// Maps each document to vocabulary indices, dropping unknown tokens.
    pub fn encode(&self, vocab: &Vocabulary) -> Vec<Vec<u32>> {
        par::map_range(self.n_docs(), |i| {
            self.tokens[i]
                .iter()
                .filter_map(|t| vocab.index_of(t).map(|j| j as u32))
                .collect()
        })
    }
}

/// Parses a stopword file (one token per line, `#` comments allowed).
pub fn parse_stopwords(content: &str) -> HashSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn read_stopwords(path: &Path) -> Result<HashSet<String>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&content))
}

pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// Pruning thresholds for [`build_vocabulary`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruningConfig {
    /// Minimum number of occurrences across the corpus.
    pub min_count: usize,
    /// Maximum fraction of documents a term may appear in.
    pub max_df_ratio: f64,
}

impl Default for PruningConfig {
    fn default() -> Self {
        Self {
            min_count: 10,
            max_df_ratio: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    term_to_index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    total_count: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    /// Builds a vocabulary from explicit terms, with counts taken from `corpus`.
    pub fn from_terms(corpus: &Corpus, terms: Vec<String>) -> Result<Self> {
        let mut term_to_index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if term_to_index.insert(t.clone(), i).is_some() {
                return Err(Error::data(format!("duplicate vocabulary term {t:?}")));
            }
        }
        let mut doc_freq = vec![0; terms.len()];
        let mut total_count = vec![0; terms.len()];
        let mut seen = vec![usize::MAX; terms.len()];
        for (d, doc) in corpus.tokens().iter().enumerate() {
            for t in doc {
                if let Some(&j) = term_to_index.get(t) {
                    total_count[j] += 1;
                    if seen[j] != d {
                        seen[j] = d;
                        doc_freq[j] += 1;
                    }
                }
            }
        }
        Ok(Self {
            terms,
            term_to_index,
            doc_freq,
            total_count,
            n_docs: corpus.n_docs(),
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, i: usize) -> &str {
        &self.terms[i]
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.term_to_index.get(term).copied()
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn total_count(&self) -> &[usize] {
        &self.total_count
    }

    /// Number of documents the counts were taken over.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }
}

/// Keeps a term iff it is not a stopword, occurs at least `min_count` times
/// and appears in at most `max_df_ratio · n_docs` documents. Terms are sorted
/// lexicographically.
pub fn build_vocabulary(
    corpus: &Corpus,
    stopwords: &HashSet<String>,
    pruning: PruningConfig,
) -> Result<Vocabulary> {
    let PruningConfig {
        min_count,
        max_df_ratio,
    } = pruning;
    if !(max_df_ratio > 0.0 && max_df_ratio <= 1.0) {
        return Err(Error::config(format!(
            "max_df_ratio must lie in (0, 1], got {max_df_ratio}"
        )));
    }
    if min_count < 1 {
        return Err(Error::config("min_count must be at least 1"));
    }
    let mut counts: HashMap<&str, (usize, usize, usize)> = HashMap::new();
    for (d, doc) in corpus.tokens().iter().enumerate() {
        for t in doc {
            let e = counts.entry(t.as_str()).or_insert((0, 0, usize::MAX));
            e.0 += 1;
            if e.2 != d {
                e.2 = d;
                e.1 += 1;
            }
        }
    }
    let max_df = max_df_ratio * corpus.n_docs() as f64;
    let mut kept: Vec<(&str, usize, usize)> = counts
        .into_iter()
        .filter(|(t, (total, df, _))| {
            !stopwords.contains(*t) && *total >= min_count && *df as f64 <= max_df
        })
        .map(|(t, (total, df, _))| (t, df, total))
        .collect();
    if kept.is_empty() {
        return Err(Error::data("vocabulary is empty after pruning"));
    }
    kept.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let terms: Vec<String> = kept.iter().map(|k| k.0.to_owned()).collect();
    let term_to_index = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        terms,
        term_to_index,
        doc_freq: kept.iter().map(|k| k.1).collect(),
        total_count: kept.iter().map(|k| k.2).collect(),
        n_docs: corpus.n_docs(),
    })
}

/// Raw in-vocabulary term counts, one row per document.
pub fn build_count_matrix(corpus: &Corpus, vocab: &Vocabulary) -> SparseMatrix {
    let rows = par::map_range(corpus.n_docs(), |i| {
        corpus.tokens()[i]
            .iter()
            .filter_map(|t| vocab.index_of(t).map(|j| (j, 1.0)))
            .collect()
    });
    SparseMatrix::from_rows(vocab.len(), rows).expect("vocabulary indices are in range")
}

/// The document-term matrix T: entry (i, j) is the count of term j in
/// document i divided by the number of in-vocabulary tokens of document i.
///
/// Documents without in-vocabulary tokens get empty rows; their indices are
/// returned alongside the matrix.
pub fn build_doc_term_matrix(corpus: &Corpus, vocab: &Vocabulary) -> Result<(SparseMatrix, Vec<usize>)> {
    if vocab.is_empty() {
        return Err(Error::config("vocabulary is empty"));
    }
    let counts = build_count_matrix(corpus, vocab);
    let (t, empty) = crate::matrix::row_normalize(&counts)?;
    if !empty.is_empty() {
        log::warn!(
            "{} document(s) have no in-vocabulary tokens; their term rows are empty",
            empty.len()
        );
    }
    Ok((t, empty))
}
