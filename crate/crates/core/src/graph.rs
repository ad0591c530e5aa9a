//! Citation graph: edge lists, the transition matrix A and the similarity
//! matrix S = (A + A²)/2.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::{self, SparseMatrix};

/// Default cap on stored entries of S.
pub const DEFAULT_MAX_SIMILARITY_NNZ: u64 = 2_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeList {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(s, d)) = edges.iter().find(|(s, d)| *s >= n_nodes || *d >= n_nodes) {
            return Err(Error::data(format!(
                "edge ({s}, {d}) references a node outside 0..{n_nodes}"
            )));
        }
        Ok(Self { n_nodes, edges })
    }

    pub fn empty(n_nodes: usize) -> Self {
        Self {
            n_nodes,
            edges: Vec::new(),
        }
    }

    /// Reads a `src_doc_id<TAB>dst_doc_id` file, resolving ids against `corpus`.
    pub fn read(path: &Path, corpus: &Corpus) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut edges = Vec::new();
        for (lineno, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let at = || format!("{}:{}", path.display(), lineno + 1);
            let (src, dst) = line
                .split_once('\t')
                .ok_or_else(|| Error::data(format!("{}: expected src<TAB>dst", at())))?;
            let resolve = |id: &str| {
                corpus
                    .index_of(id.trim())
                    .ok_or_else(|| Error::data(format!("{}: unknown document id {:?}", at(), id.trim())))
            };
            edges.push((resolve(src)?, resolve(dst)?));
        }
        Ok(Self {
            n_nodes: corpus.n_docs(),
            edges,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Distinct undirected edges as `(min, max)` pairs, self-loops removed,
    /// in first-appearance order.
    pub fn undirected(&self) -> Vec<(usize, usize)> {
        let mut seen = HashSet::with_capacity(self.edges.len());
        self.edges
            .iter()
            .filter(|(s, d)| s != d)
            .map(|&(s, d)| (s.min(d), s.max(d)))
            .filter(|e| seen.insert(*e))
            .collect()
    }

    /// Neighbor lists of the symmetrized simple graph, sorted.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for (s, d) in self.undirected() {
            adj[s].push(d);
            adj[d].push(s);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }
}

/// Row-normalized adjacency. Self-loops are removed and duplicate edges
/// collapse to weight 1; with `symmetrize`, every edge is used in both
/// directions. Isolated nodes yield empty rows.
pub fn build_transition(edges: &EdgeList, symmetrize: bool) -> Result<SparseMatrix> {
    let n = edges.n_nodes();
    if n == 0 {
        return Err(Error::config("graph must have at least one node"));
    }
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(s, d) in edges.edges() {
        if s >= n || d >= n {
            return Err(Error::data(format!("edge ({s}, {d}) out of range")));
        }
        if s == d {
            continue;
        }
        rows[s].push((d, 1.0));
        if symmetrize {
            rows[d].push((s, 1.0));
        }
    }
    for r in &mut rows {
        r.sort_unstable_by_key(|e| e.0);
        r.dedup_by_key(|e| e.0);
    }
    let adjacency = SparseMatrix::from_rows(n, rows)?;
    Ok(matrix::row_normalize(&adjacency)?.0)
}

/// S = (A + A²)/2, refusing to materialize more than `max_nnz` entries.
pub fn build_similarity(a: &SparseMatrix, max_nnz: u64) -> Result<SparseMatrix> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::config(format!(
            "similarity needs a square transition matrix, got {:?}",
            a.shape()
        )));
    }
    // nnz(A + A²) ≤ nnz(A) + nnz(A²)
    let bound = matrix::spmm_nnz_upper_bound(a, a)? + a.nnz() as u64;
    if bound > max_nnz {
        let exact = matrix::spmm_symbolic_nnz(a, a)? + a.nnz() as u64;
        if exact > max_nnz {
            return Err(Error::data(format!(
                "similarity matrix would hold up to {exact} entries, above the cap of {max_nnz}"
            )));
        }
    }
    let a2 = matrix::spmm(a, a)?;
    matrix::add_scaled(a, 0.5, &a2, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;
    use proptest::prelude::*;

    fn dense(rows: &[Vec<f64>]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn assert_close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn path_graph_transition_and_similarity() {
        let g = EdgeList::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let a = build_transition(&g, true).unwrap();
        assert_close(
            &a.to_dense(),
            &dense(&[vec![0.0, 1.0, 0.0], vec![0.5, 0.0, 0.5], vec![0.0, 1.0, 0.0]]),
            1e-15,
        );
        let s = build_similarity(&a, DEFAULT_MAX_SIMILARITY_NNZ).unwrap();
        let row = vec![0.25, 0.5, 0.25];
        assert_close(&s.to_dense(), &dense(&[row.clone(), row.clone(), row]), 1e-15);
    }

    #[test]
    fn single_edge() {
        let g = EdgeList::new(2, vec![(0, 1)]).unwrap();
        let a = build_transition(&g, true).unwrap();
        assert_close(&a.to_dense(), &dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]), 0.0);
        let s = build_similarity(&a, DEFAULT_MAX_SIMILARITY_NNZ).unwrap();
        assert_close(&s.to_dense(), &dense(&[vec![0.5, 0.5], vec![0.5, 0.5]]), 1e-15);
    }

    #[test]
    fn isolated_duplicates_and_self_loops() {
        let g = EdgeList::new(3, vec![(0, 1), (0, 1), (1, 1)]).unwrap();
        let single = EdgeList::new(3, vec![(0, 1)]).unwrap();
        let a = build_transition(&g, true).unwrap();
        assert_eq!(a, build_transition(&single, true).unwrap());
        assert_eq!(a.row_nnz(2), 0);
        let s = build_similarity(&a, DEFAULT_MAX_SIMILARITY_NNZ).unwrap();
        assert_eq!(s.row_nnz(2), 0);
    }

    #[test]
    fn directed_mode() {
        let g = EdgeList::new(2, vec![(0, 1)]).unwrap();
        let a = build_transition(&g, false).unwrap();
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.row_nnz(1), 0);
    }

    #[test]
    fn empty_graph_similarity_is_empty() {
        let a = build_transition(&EdgeList::empty(4), true).unwrap();
        let s = build_similarity(&a, DEFAULT_MAX_SIMILARITY_NNZ).unwrap();
        assert_eq!(s.nnz(), 0);
        assert_eq!(s.shape(), (4, 4));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(EdgeList::new(2, vec![(0, 2)]), Err(Error::Data(_))));
    }

    #[test]
    fn memory_guard_trips() {
        // star graph: A² connects every leaf to every leaf
        let n = 50;
        let g = EdgeList::new(n, (1..n).map(|i| (0, i)).collect()).unwrap();
        let a = build_transition(&g, true).unwrap();
        let err = build_similarity(&a, 100).unwrap_err();
        assert!(matches!(err, Error::Data(ref m) if m.contains("cap")));
        assert!(build_similarity(&a, 10_000).is_ok());
    }

    #[test]
    fn read_edge_file() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = Corpus::from_texts([("a", "x"), ("b", "y"), ("c", "z")]).unwrap();
        let p = dir.path().join("edges.tsv");
        fs::write(&p, "a\tb\nc\ta\n").unwrap();
        let g = EdgeList::read(&p, &corpus).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (2, 0)]);
        fs::write(&p, "a\tq\n").unwrap();
        assert!(matches!(EdgeList::read(&p, &corpus), Err(Error::Data(_))));
    }

    fn dense_similarity_oracle(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<f64>> {
        let mut adj = vec![vec![0.0; n]; n];
        for &(s, d) in edges {
            if s != d {
                adj[s][d] = 1.0;
                adj[d][s] = 1.0;
            }
        }
        let a: Vec<Vec<f64>> = adj
            .iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.iter().map(|x| if s > 0.0 { x / s } else { 0.0 }).collect()
            })
            .collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a2: f64 = (0..n).map(|k| a[i][k] * a[k][j]).sum();
                        0.5 * a[i][j] + 0.5 * a2
                    })
                    .collect()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn similarity_matches_dense_oracle(
            (n, edges) in (1usize..=8).prop_flat_map(|n| (Just(n), proptest::collection::vec((0..n, 0..n), 0..20)))
        ) {
            let g = EdgeList::new(n, edges.clone()).unwrap();
            let a = build_transition(&g, true).unwrap();
            let s = build_similarity(&a, DEFAULT_MAX_SIMILARITY_NNZ).unwrap();
            let oracle = dense_similarity_oracle(n, &edges);
            for i in 0..n {
                for j in 0..n {
                    prop_assert!((s.get(i, j) - oracle[i][j]).abs() <= 1e-9);
                    prop_assert!((0.0..=1.0).contains(&s.get(i, j)));
                }
                if a.row_nnz(i) == 0 {
                    prop_assert_eq!(s.row_nnz(i), 0);
                } else {
                    prop_assert!((s.row_sum(i) - 1.0).abs() <= 1e-9);
                    prop_assert!((a.row_sum(i) - 1.0).abs() <= 1e-12);
                }
            }
        }
    }
}
