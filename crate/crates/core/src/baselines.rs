//! Reference document representations: DeepWalk, LSA and their concatenation.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::EdgeList;
use crate::matrix::{self, DenseMatrix, SparseMatrix};
use crate::par;
use crate::wordvec::{self, EmbeddingMatrix, SgnsConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct DeepWalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Skip-gram settings for the walk corpus; `sgns.window` is the walk window.
    pub sgns: SgnsConfig,
}

impl Default for DeepWalkConfig {
    fn default() -> Self {
        Self {
            walks_per_node: 40,
            walk_length: 40,
            sgns: SgnsConfig {
                window: 10,
                epochs: 1,
                ..SgnsConfig::default()
            },
        }
    }
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    // splitmix-style combination; only needs to decorrelate the streams
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform random walks over the symmetrized graph. Each round visits every
/// node once as a start, in a seeded random order. Walks stop early at nodes
/// without neighbors.
pub fn random_walks(edges: &EdgeList, walks_per_node: usize, walk_length: usize, seed: u64) -> Vec<Vec<u32>> {
    let adj = edges.adjacency_lists();
    let n = edges.n_nodes();
    let mut walks = Vec::with_capacity(n * walks_per_node);
    for round in 0..walks_per_node {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(mix(seed, round as u64, u64::MAX)));
        walks.extend(par::map_range(n, |k| {
            let start = order[k];
            let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, round as u64, start as u64));
            let mut walk = Vec::with_capacity(walk_length);
            walk.push(start as u32);
            let mut cur = start;
            while walk.len() < walk_length {
                let nb = &adj[cur];
                if nb.is_empty() {
                    break;
                }
                cur = nb[rng.random_range(0..nb.len())];
                walk.push(cur as u32);
            }
            walk
        }));
    }
    walks
}

/// Node embeddings from skip-gram over random walks. Row i is node i,
/// labeled `node_labels[i]`.
pub fn deepwalk(edges: &EdgeList, cfg: &DeepWalkConfig, node_labels: &[String]) -> Result<EmbeddingMatrix> {
    if edges.n_nodes() == 0 {
        return Err(Error::config("DeepWalk needs a nonempty graph"));
    }
    if node_labels.len() != edges.n_nodes() {
        return Err(Error::config("one label per node is required"));
    }
    let walks = random_walks(edges, cfg.walks_per_node, cfg.walk_length.max(1), cfg.sgns.seed);
    let vectors = wordvec::train_sgns(&walks, edges.n_nodes(), &cfg.sgns)?;
    EmbeddingMatrix::new(node_labels.to_vec(), vectors)
}

/// Inverse document frequency variant for tf·idf weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfKind {
    /// ln(n / df)
    #[default]
    Standard,
    /// ln((1 + n) / (1 + df)) + 1
    Smooth,
}

/// Per-column idf of a document × term count matrix.
pub fn idf(counts: &SparseMatrix, kind: IdfKind) -> Vec<f64> {
    let n = counts.n_rows() as f64;
    let mut df = vec![0usize; counts.n_cols()];
    for &c in counts.col_indices() {
        df[c] += 1;
    }
    df.into_iter()
        .map(|d| match (kind, d) {
            (_, 0) => 0.0,
            (IdfKind::Standard, d) => (n / d as f64).ln(),
            (IdfKind::Smooth, d) => ((1.0 + n) / (1.0 + d as f64)).ln() + 1.0,
        })
        .collect()
}

/// Raw counts scaled column-wise by idf.
pub fn tfidf(counts: &SparseMatrix, kind: IdfKind) -> SparseMatrix {
    let weights = idf(counts, kind);
    let rows = (0..counts.n_rows())
        .map(|i| {
            let (cols, vals) = counts.row(i);
            cols.iter().zip(vals).map(|(&c, &v)| (c, v * weights[c])).collect()
        })
        .collect();
    SparseMatrix::from_rows(counts.n_cols(), rows).expect("tf-idf keeps valid structure")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdConfig {
    pub oversampling: usize,
    pub power_iterations: usize,
    pub seed: u64,
}

impl Default for SvdConfig {
    fn default() -> Self {
        Self {
            oversampling: 10,
            power_iterations: 10,
            seed: 1,
        }
    }
}

/// Rank-k truncated SVD: `a ≈ u · diag(sigma) · vt`.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    /// n × k, orthonormal columns.
    pub u: DenseMatrix,
    /// Non-increasing, non-negative.
    pub sigma: Vec<f64>,
    /// k × m, orthonormal rows.
    pub vt: DenseMatrix,
}

fn to_na(d: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(d.n_rows(), d.n_cols(), d.values())
}

fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    let values = (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| m[(i, j)])
        .collect();
    DenseMatrix::new(m.nrows(), m.ncols(), values).expect("finite decomposition")
}

fn orthonormal_basis(y: &DenseMatrix) -> DenseMatrix {
    from_na(&to_na(y).qr().q())
}

/// Randomized range-finder SVD with power iterations.
pub fn randomized_svd(a: &SparseMatrix, k: usize, cfg: &SvdConfig) -> Result<TruncatedSvd> {
    let (n, m) = a.shape();
    if k == 0 || k > n.min(m) {
        return Err(Error::config(format!(
            "rank {k} is not in 1..={} for a {n}x{m} matrix",
            n.min(m)
        )));
    }
    let width = (k + cfg.oversampling).min(n.min(m));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let omega = DenseMatrix::new(m, width, (0..m * width).map(|_| rng.sample(StandardNormal)).collect())?;
    let at = a.transpose();

    let mut q = orthonormal_basis(&matrix::sp_dense_mm(a, &omega)?);
    for _ in 0..cfg.power_iterations {
        let z = orthonormal_basis(&matrix::sp_dense_mm(&at, &q)?);
        q = orthonormal_basis(&matrix::sp_dense_mm(a, &z)?);
    }
    // B = Qᵀ A, formed as (Aᵀ Q)ᵀ
    let b = to_na(&matrix::sp_dense_mm(&at, &q)?).transpose();
    let svd = b.svd(true, true);
    let (small_u, sv, vt) = (
        svd.u.expect("u requested"),
        svd.singular_values,
        svd.v_t.expect("v_t requested"),
    );
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]));
    order.truncate(k);

    let u_full = to_na(&q) * small_u;
    let u = DMatrix::from_fn(n, k, |i, j| u_full[(i, order[j])]);
    let vt = DMatrix::from_fn(k, m, |i, j| vt[(order[i], j)]);
    Ok(TruncatedSvd {
        u: from_na(&u),
        sigma: order.iter().map(|&i| sv[i]).collect(),
        vt: from_na(&vt),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LsaConfig {
    pub idf: IdfKind,
    pub svd: SvdConfig,
}

/// LSA document vectors: tf·idf weighting of raw counts, then rank-`dim`
/// truncated SVD; row i is `u_i · diag(sigma)`.
pub fn lsa(counts: &SparseMatrix, dim: usize, cfg: &LsaConfig, doc_labels: &[String]) -> Result<EmbeddingMatrix> {
    if doc_labels.len() != counts.n_rows() {
        return Err(Error::config("one label per document is required"));
    }
    let weighted = tfidf(counts, cfg.idf);
    let svd = randomized_svd(&weighted, dim, &cfg.svd)?;
    let mut d = svd.u;
    let sigma = svd.sigma;
    for i in 0..d.n_rows() {
        d.row_mut(i).iter_mut().zip(&sigma).for_each(|(x, s)| *x *= s);
    }
    EmbeddingMatrix::new(doc_labels.to_vec(), d)
}

/// Row-wise concatenation; rows of `b` are matched to `a` by label.
pub fn concatenate(a: &EmbeddingMatrix, b: &EmbeddingMatrix) -> Result<EmbeddingMatrix> {
    if a.len() != b.len() {
        return Err(Error::config(format!(
            "cannot concatenate embeddings of {} and {} rows",
            a.len(),
            b.len()
        )));
    }
    let b = if a.labels() == b.labels() {
        b.clone()
    } else {
        b.reindex(a.labels())?
    };
    EmbeddingMatrix::new(a.labels().to_vec(), a.vectors().hstack(b.vectors())?)
}
