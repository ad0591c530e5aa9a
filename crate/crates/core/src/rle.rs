//! Regularized linear embedding: documents are placed in the word-vector
//! space as weighted word averages, where each document's term weights are
//! pulled toward the similarity-weighted centroid of its network neighbors.
//!
//! With T the relative-frequency document-term matrix, S the network
//! similarity matrix and U the word vectors:
//!
//! ```text
//! b_i = Σ_j S_ij t_j / Σ_j S_ij
//! P   = (1 − λ) T + λ B
//! D   = P U
//! ```

use crate::corpus::{self, Corpus, Vocabulary};
use crate::error::{Error, Result};
use crate::graph::{self, EdgeList, DEFAULT_MAX_SIMILARITY_NNZ};
use crate::matrix::{self, DenseMatrix, SparseMatrix};
use crate::wordvec::EmbeddingMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct RleConfig {
    /// Smoothing intensity in [0, 1]; 0 is the plain word average.
    pub lambda: f64,
    /// Treat citations as undirected.
    pub symmetrize: bool,
    /// Abort when S would store more entries than this.
    pub max_similarity_nnz: u64,
    /// Compute D = (1−λ)TU + λBU instead of materializing P.
    pub fused: bool,
}

impl Default for RleConfig {
    fn default() -> Self {
        Self {
            lambda: 0.7,
            symmetrize: true,
            max_similarity_nnz: DEFAULT_MAX_SIMILARITY_NNZ,
            fused: true,
        }
    }
}

impl RleConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda)
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::config(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

/// The smoothing matrix B: row i is the S-weighted centroid of the rows of
/// `t`. Rows of `s` summing to zero leave the document unchanged (b_i = t_i).
pub fn smooth(t: &SparseMatrix, s: &SparseMatrix) -> Result<SparseMatrix> {
    if s.n_rows() != s.n_cols() || s.n_cols() != t.n_rows() {
        return Err(Error::config(format!(
            "smooth: S is {:?} but T is {:?}",
            s.shape(),
            t.shape()
        )));
    }
    let (s_norm, isolated) = matrix::row_normalize(s)?;
    let b = matrix::spmm(&s_norm, t)?;
    if isolated.is_empty() {
        Ok(b)
    } else {
        Ok(b.with_rows_from(t, &isolated))
    }
}

/// P = (1 − λ) T + λ B.
pub fn combine(t: &SparseMatrix, b: &SparseMatrix, lambda: f64) -> Result<SparseMatrix> {
    check_lambda(lambda)?;
    matrix::add_scaled(t, 1.0 - lambda, b, lambda)
}

/// D = P U, one row per document labeled by `doc_ids`.
pub fn project(p: &SparseMatrix, u: &EmbeddingMatrix, doc_ids: &[String]) -> Result<EmbeddingMatrix> {
    if p.n_cols() != u.len() {
        return Err(Error::config(format!(
            "weight matrix has {} columns but there are {} word vectors",
            p.n_cols(),
            u.len()
        )));
    }
    if p.n_rows() != doc_ids.len() {
        return Err(Error::config(format!(
            "{} weight rows for {} documents",
            p.n_rows(),
            doc_ids.len()
        )));
    }
    let d = matrix::sp_dense_mm(p, u.vectors())?;
    EmbeddingMatrix::new(doc_ids.to_vec(), d)
}

/// Every intermediate of the pipeline, for inspection and testing.
#[derive(Debug, Clone)]
pub struct Stages {
    pub transition: SparseMatrix,
    pub similarity: SparseMatrix,
    pub doc_term: SparseMatrix,
    pub smoothed: SparseMatrix,
    pub weights: SparseMatrix,
    pub embedding: EmbeddingMatrix,
}

/// Vocabulary whose term order follows the rows of `u`.
pub fn vocabulary_of(corpus: &Corpus, u: &EmbeddingMatrix) -> Result<Vocabulary> {
    Vocabulary::from_terms(corpus, u.labels().to_vec())
}

/// Runs the full pipeline, keeping every intermediate matrix. P is always
/// materialized here.
pub fn embed_stages(corpus: &Corpus, edges: &EdgeList, u: &EmbeddingMatrix, cfg: &RleConfig) -> Result<Stages> {
    cfg.validate()?;
    check_graph(corpus, edges)?;
    let vocab = vocabulary_of(corpus, u)?;
    let (doc_term, _) = corpus::build_doc_term_matrix(corpus, &vocab)?;
    let transition = graph::build_transition(edges, cfg.symmetrize)?;
    let similarity = graph::build_similarity(&transition, cfg.max_similarity_nnz)?;
    let smoothed = smooth(&doc_term, &similarity)?;
    let weights = combine(&doc_term, &smoothed, cfg.lambda)?;
    let embedding = project(&weights, u, corpus.doc_ids())?;
    warn_zero_rows(&weights);
    Ok(Stages {
        transition,
        similarity,
        doc_term,
        smoothed,
        weights,
        embedding,
    })
}

fn check_graph(corpus: &Corpus, edges: &EdgeList) -> Result<()> {
    if edges.n_nodes() != corpus.n_docs() {
        return Err(Error::config(format!(
            "graph has {} nodes but the corpus has {} documents",
            edges.n_nodes(),
            corpus.n_docs()
        )));
    }
    Ok(())
}

fn warn_zero_rows(p: &SparseMatrix) {
    let empty = (0..p.n_rows()).filter(|&i| p.row_nnz(i) == 0).count();
    if empty > 0 {
        log::warn!("{empty} document(s) have neither in-vocabulary words nor smoothing mass; their embeddings are zero");
    }
}

/// Document embeddings for `corpus` linked by `edges`, in the space of `u`.
///
/// The vocabulary is taken from the row labels of `u`.
pub fn embed(corpus: &Corpus, edges: &EdgeList, u: &EmbeddingMatrix, cfg: &RleConfig) -> Result<EmbeddingMatrix> {
    if !cfg.fused {
        return Ok(embed_stages(corpus, edges, u, cfg)?.embedding);
    }
    cfg.validate()?;
    check_graph(corpus, edges)?;
    let vocab = vocabulary_of(corpus, u)?;
    let (t, _) = corpus::build_doc_term_matrix(corpus, &vocab)?;
    let tu = matrix::sp_dense_mm(&t, u.vectors())?;
    if cfg.lambda == 0.0 {
        return EmbeddingMatrix::new(corpus.doc_ids().to_vec(), tu);
    }
    let a = graph::build_transition(edges, cfg.symmetrize)?;
    let s = graph::build_similarity(&a, cfg.max_similarity_nnz)?;
    let b = smooth(&t, &s)?;
    warn_zero_rows(&b);
    let bu = matrix::sp_dense_mm(&b, u.vectors())?;
    let lambda = cfg.lambda;
    let values = tu
        .values()
        .iter()
        .zip(bu.values())
        .map(|(x, y)| (1.0 - lambda) * x + lambda * y)
        .collect();
    let d = DenseMatrix::new(tu.n_rows(), tu.n_cols(), values)?;
    EmbeddingMatrix::new(corpus.doc_ids().to_vec(), d)
}

/// Plain word-average document vectors, D = T U.
pub fn word_average(corpus: &Corpus, u: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    let vocab = vocabulary_of(corpus, u)?;
    let (t, _) = corpus::build_doc_term_matrix(corpus, &vocab)?;
    project(&t, u, corpus.doc_ids())
}
