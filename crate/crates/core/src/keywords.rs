//! Class descriptions: the words nearest to a class centroid in embedding
//! space, next to the heaviest terms of the class-mean tf·idf vector.

use std::cmp::Ordering;
use std::fmt::Write as _;

use crate::baselines::{self, IdfKind};
use crate::corpus::{Labels, Vocabulary};
use crate::error::{Error, Result};
use crate::matrix::{self, SparseMatrix};
use crate::par;
use crate::wordvec::EmbeddingMatrix;

pub const DEFAULT_TOP_K: usize = 5;

/// Unweighted mean of the vectors of the documents in `class_id`.
pub fn class_centroid(d: &EmbeddingMatrix, labels: &Labels, class_id: usize) -> Result<Vec<f64>> {
    if labels.assignments.len() != d.len() {
        return Err(Error::config(format!(
            "{} labels for {} document vectors",
            labels.assignments.len(),
            d.len()
        )));
    }
    let members = labels.members(class_id);
    if members.is_empty() {
        return Err(Error::data(format!("class {class_id} has no documents")));
    }
    let mut c = vec![0.0; d.dim()];
    for &i in &members {
        for (acc, x) in c.iter_mut().zip(d.row(i)) {
            *acc += x;
        }
    }
    let n = members.len() as f64;
    c.iter_mut().for_each(|x| *x /= n);
    Ok(c)
}

/// Descending by score, then lexicographic by word.
fn rank(mut scored: Vec<(String, f64)>, top_k: usize) -> Vec<(String, f64)> {
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(top_k);
    scored
}

/// The `top_k` words of `u` closest to `center` by cosine. Words with zero
/// vectors are skipped.
pub fn nearest_words(center: &[f64], u: &EmbeddingMatrix, top_k: usize) -> Result<Vec<(String, f64)>> {
    if center.len() != u.dim() {
        return Err(Error::config(format!(
            "centroid has dimension {} but word vectors have {}",
            center.len(),
            u.dim()
        )));
    }
    if top_k > u.len() {
        return Err(Error::config(format!("top_k = {top_k} exceeds the {} words available", u.len())));
    }
    if matrix::norm(center) == 0.0 {
        return Err(Error::data("centroid is the zero vector; nearest words are undefined"));
    }
    let scored = (0..u.len())
        .filter(|&w| matrix::norm(u.row(w)) > 0.0)
        .map(|w| (u.labels()[w].clone(), matrix::cosine(center, u.row(w))))
        .collect();
    Ok(rank(scored, top_k))
}

/// Heaviest terms of the mean tf·idf row over `class_id`, with idf taken
/// over the whole corpus. Terms of zero weight are never returned.
pub fn tfidf_class_terms(
    t_counts: &SparseMatrix,
    vocab: &Vocabulary,
    labels: &Labels,
    class_id: usize,
    top_k: usize,
    idf: IdfKind,
) -> Result<Vec<(String, f64)>> {
    if t_counts.n_cols() != vocab.len() || t_counts.n_rows() != labels.assignments.len() {
        return Err(Error::config(format!(
            "count matrix is {:?} for {} documents and {} terms",
            t_counts.shape(),
            labels.assignments.len(),
            vocab.len()
        )));
    }
    let members = labels.members(class_id);
    if members.is_empty() {
        return Err(Error::data(format!("class {class_id} has no documents")));
    }
    let weighted = baselines::tfidf(t_counts, idf);
    let mut mean = vec![0.0; vocab.len()];
    for &i in &members {
        let (cols, vals) = weighted.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            mean[c] += v;
        }
    }
    let n = members.len() as f64;
    let scored = mean
        .into_iter()
        .enumerate()
        .filter(|&(_, w)| w > 0.0)
        .map(|(c, w)| (vocab.term(c).to_string(), w / n))
        .collect();
    Ok(rank(scored, top_k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDescription {
    pub class_name: String,
    /// Words nearest the class centroid of the document embedding.
    pub embedding_words: Vec<String>,
    pub tfidf_words: Vec<String>,
}

/// One description per class of `labels`. `d` holds document vectors in the
/// space of `u`; `t_counts` holds raw counts over `vocab`.
pub fn describe_classes(
    d: &EmbeddingMatrix,
    u: &EmbeddingMatrix,
    t_counts: &SparseMatrix,
    vocab: &Vocabulary,
    labels: &Labels,
    top_k: usize,
) -> Result<Vec<ClassDescription>> {
    let words = |v: Vec<(String, f64)>| v.into_iter().map(|(w, _)| w).collect();
    par::map_range(labels.n_classes(), |c| {
        let center = class_centroid(d, labels, c)?;
        Ok(ClassDescription {
            class_name: labels.class_names[c].clone(),
            embedding_words: words(nearest_words(&center, u, top_k)?),
            tfidf_words: words(tfidf_class_terms(t_counts, vocab, labels, c, top_k, IdfKind::Standard)?),
        })
    })
    .into_iter()
    .collect()
}

/// Plain-text tables, one per class.
pub fn descriptions_to_text(descs: &[ClassDescription], method: &str) -> String {
    let mut out = String::new();
    for (k, desc) in descs.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "[{}]", desc.class_name);
        let width = desc
            .embedding_words
            .iter()
            .map(String::len)
            .chain([method.len()])
            .max()
            .unwrap_or(0);
        let _ = writeln!(out, "{method:<width$}  tfidf");
        let rows = desc.embedding_words.len().max(desc.tfidf_words.len());
        for r in 0..rows {
            let a = desc.embedding_words.get(r).map_or("", String::as_str);
            let b = desc.tfidf_words.get(r).map_or("", String::as_str);
            let _ = writeln!(out, "{}", format!("{a:<width$}  {b}").trim_end());
        }
    }
    out
}

pub const KEYWORDS_CSV_HEADER: &str = "class,rank,embedding_word,tfidf_word";

pub fn descriptions_to_csv(descs: &[ClassDescription]) -> String {
    let mut out = format!("{KEYWORDS_CSV_HEADER}\n");
    for desc in descs {
        let rows = desc.embedding_words.len().max(desc.tfidf_words.len());
        for r in 0..rows {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                desc.class_name,
                r + 1,
                desc.embedding_words.get(r).map_or("", String::as_str),
                desc.tfidf_words.get(r).map_or("", String::as_str)
            );
        }
    }
    out
}
