//! Word vectors: the labeled embedding matrix, word2vec text I/O and
//! skip-gram training with negative sampling (SGNS).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::corpus::{Corpus, Vocabulary};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Dense vectors with a string label per row (words or document ids).
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    vectors: DenseMatrix,
}

impl EmbeddingMatrix {
    pub fn new(labels: Vec<String>, vectors: DenseMatrix) -> Result<Self> {
        if labels.len() != vectors.n_rows() {
            return Err(Error::config(format!(
                "{} labels for {} vectors",
                labels.len(),
                vectors.n_rows()
            )));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::data(format!("duplicate row label {l:?}")));
            }
        }
        Ok(Self {
            labels,
            index,
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.vectors.n_cols()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vectors(&self) -> &DenseMatrix {
        &self.vectors
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }

    pub fn get(&self, label: &str) -> Option<&[f64]> {
        self.index_of(label).map(|i| self.row(i))
    }

    /// Re-orders rows to follow `labels`, failing on any missing label.
    pub fn reindex(&self, labels: &[String]) -> Result<Self> {
        let idx = labels
            .iter()
            .map(|l| {
                self.index_of(l)
                    .ok_or_else(|| Error::config(format!("label {l:?} missing from embedding")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(labels.to_vec(), self.vectors.select_rows(&idx))
    }
}

/// Formats with six significant digits, in the shortest form that parses back
/// to the rounded value.
fn fmt_value(x: f64) -> String {
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Writes `emb` in word2vec text format.
pub fn save_vectors(emb: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_vectors(emb, &mut w).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_vectors(emb: &EmbeddingMatrix, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    for (i, label) in emb.labels().iter().enumerate() {
        w.write_all(label.as_bytes())?;
        for &x in emb.row(i) {
            write!(w, " {}", fmt_value(x))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Reads a word2vec text file as-is.
pub fn read_vectors(path: &Path) -> Result<EmbeddingMatrix> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let bad = |lineno: usize, msg: &str| Error::data(format!("{}:{}: {msg}", path.display(), lineno + 1));

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::data(format!("{}: empty vector file", path.display())))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let mut fields = header.split_whitespace().map(str::parse::<usize>);
    let (n_rows, dim) = match (fields.next(), fields.next(), fields.next()) {
        (Some(Ok(n)), Some(Ok(d)), None) => (n, d),
        _ => return Err(bad(0, "expected header `<n_rows> <dim>`")),
    };

    let mut labels = Vec::with_capacity(n_rows);
    let mut values = Vec::with_capacity(n_rows * dim);
    for (lineno, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let label = parts.next().expect("non-empty line has a token");
        let before = values.len();
        for p in parts {
            let v: f64 = p
                .parse()
                .map_err(|_| bad(lineno, &format!("malformed number {p:?}")))?;
            if !v.is_finite() {
                return Err(bad(lineno, "non-finite value"));
            }
            values.push(v);
        }
        if values.len() - before != dim {
            return Err(bad(
                lineno,
                &format!("expected {dim} values, found {}", values.len() - before),
            ));
        }
        labels.push(label.to_owned());
    }
    if labels.len() != n_rows {
        return Err(Error::data(format!(
            "{}: header announces {n_rows} rows, found {}",
            path.display(),
            labels.len()
        )));
    }
    let vectors = DenseMatrix::new(n_rows, dim, values)?;
    EmbeddingMatrix::new(labels, vectors)
}

/// Restricts `emb` to the vocabulary, in vocabulary order. Terms missing
/// from `emb` get zero rows. Returns the fraction of terms found.
pub fn align_to_vocabulary(emb: &EmbeddingMatrix, vocab: &Vocabulary) -> Result<(EmbeddingMatrix, f64)> {
    let mut out = DenseMatrix::zeros(vocab.len(), emb.dim());
    let mut found = 0usize;
    for (j, term) in vocab.terms().iter().enumerate() {
        if let Some(v) = emb.get(term) {
            out.row_mut(j).copy_from_slice(v);
            found += 1;
        }
    }
    let coverage = if vocab.is_empty() {
        1.0
    } else {
        found as f64 / vocab.len() as f64
    };
    if found < vocab.len() {
        log::warn!(
            "{} of {} vocabulary terms have no pretrained vector; using zero vectors",
            vocab.len() - found,
            vocab.len()
        );
    }
    Ok((EmbeddingMatrix::new(vocab.terms().to_vec(), out)?, coverage))
}

/// Loads pretrained vectors aligned to `vocab`; see [`align_to_vocabulary`].
pub fn load_word_vectors(path: &Path, vocab: &Vocabulary) -> Result<(EmbeddingMatrix, f64)> {
    align_to_vocabulary(&read_vectors(path)?, vocab)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    /// Maximum distance between center and context.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Starting learning rate, decayed linearly to `min_learning_rate`.
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    /// Draw the effective window uniformly from `1..=window` per center word.
    pub shrink_window: bool,
    /// Frequent-word downsampling threshold; `None` disables it.
    pub subsample: Option<f64>,
    pub seed: u64,
    /// More than one worker trains with unsynchronized updates and is not
    /// reproducible.
    pub workers: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        Self {
            dim: 160,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 0.0001,
            shrink_window: true,
            subsample: None,
            seed: 1,
            workers: 1,
        }
    }
}

impl SgnsConfig {
    fn validate(&self) -> Result<()> {
        if self.dim < 1 || self.window < 1 || self.negatives < 1 || self.workers < 1 {
            return Err(Error::config(
                "SGNS dim, window, negatives and workers must all be at least 1",
            ));
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate >= 0.0) {
            return Err(Error::config("SGNS learning rates must be positive"));
        }
        Ok(())
    }
}

/// Row storage for SGNS parameters.
trait Rows {
    fn read(&mut self, row: usize, out: &mut [f32]);
    fn add(&mut self, row: usize, delta: &[f32]);
}

struct PlainRows<'a> {
    data: &'a mut [f32],
    dim: usize,
}

impl Rows for PlainRows<'_> {
    #[inline]
    fn read(&mut self, row: usize, out: &mut [f32]) {
        out.copy_from_slice(&self.data[row * self.dim..(row + 1) * self.dim]);
    }

    #[inline]
    fn add(&mut self, row: usize, delta: &[f32]) {
        for (x, d) in self.data[row * self.dim..(row + 1) * self.dim].iter_mut().zip(delta) {
            *x += d;
        }
    }
}

/// Shared rows updated without synchronization across workers. Reads and
/// writes of individual floats are atomic; read-modify-write is not.
struct SharedRows<'a> {
    data: &'a [AtomicU32],
    dim: usize,
}

impl Rows for SharedRows<'_> {
    #[inline]
    fn read(&mut self, row: usize, out: &mut [f32]) {
        for (o, x) in out.iter_mut().zip(&self.data[row * self.dim..(row + 1) * self.dim]) {
            *o = f32::from_bits(x.load(Ordering::Relaxed));
        }
    }

    #[inline]
    fn add(&mut self, row: usize, delta: &[f32]) {
        for (x, d) in self.data[row * self.dim..(row + 1) * self.dim].iter().zip(delta) {
            let v = f32::from_bits(x.load(Ordering::Relaxed)) + d;
            x.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

#[inline]
fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

/// Scratch buffers for one SGD step.
struct StepBuffers {
    center: Vec<f32>,
    output: Vec<f32>,
    center_delta: Vec<f32>,
    output_delta: Vec<f32>,
}

impl StepBuffers {
    fn new(dim: usize) -> Self {
        Self {
            center: vec![0.0; dim],
            output: vec![0.0; dim],
            center_delta: vec![0.0; dim],
            output_delta: vec![0.0; dim],
        }
    }
}

/// One SGD step on `-log σ(u_ctx·w) - Σ log σ(-u_neg·w)` for center row `center`
/// of `input` and the `(row, label)` targets of `output` (label 1 for the
/// context word, 0 for negatives). Output gradients use the center vector
/// from before the step.
fn sgd_step<I: Rows, O: Rows>(
    input: &mut I,
    output: &mut O,
    center: usize,
    targets: &[(usize, f32)],
    lr: f32,
    buf: &mut StepBuffers,
) {
    input.read(center, &mut buf.center);
    buf.center_delta.fill(0.0);
    for &(t, label) in targets {
        output.read(t, &mut buf.output);
        let score: f32 = buf.center.iter().zip(&buf.output).map(|(a, b)| a * b).sum();
        let g = (label - sigmoid(score)) * lr;
        for (d, u) in buf.center_delta.iter_mut().zip(&buf.output) {
            *d += g * u;
        }
        for (d, w) in buf.output_delta.iter_mut().zip(&buf.center) {
            *d = g * w;
        }
        output.add(t, &buf.output_delta);
    }
    input.add(center, &buf.center_delta);
}

/// Applies one SGNS step to plain row-major parameter arrays. `targets`
/// pairs an output row with its label (1 for the observed context, 0 for a
/// negative sample).
pub fn sgns_step(
    input: &mut [f32],
    output: &mut [f32],
    dim: usize,
    center: usize,
    targets: &[(usize, f32)],
    lr: f32,
) {
    let mut buf = StepBuffers::new(dim);
    sgd_step(
        &mut PlainRows { data: input, dim },
        &mut PlainRows { data: output, dim },
        center,
        targets,
        lr,
        &mut buf,
    );
}

struct Schedule {
    lr0: f64,
    lr_min: f64,
    total: u64,
}

impl Schedule {
    fn rate(&self, done: u64) -> f32 {
        let frac = (done as f64 / self.total.max(1) as f64).min(1.0);
        (self.lr0 - (self.lr0 - self.lr_min) * frac).max(self.lr_min) as f32
    }
}

struct Sampler {
    negatives: WeightedAliasIndex<f64>,
    keep_prob: Option<Vec<f64>>,
}

/// Trains one pass of `sentences` into `input`/`output`.
#[allow(clippy::too_many_arguments)]
fn train_chunk<I: Rows, O: Rows>(
    sentences: &[Vec<u32>],
    input: &mut I,
    output: &mut O,
    cfg: &SgnsConfig,
    sampler: &Sampler,
    schedule: &Schedule,
    progress: &AtomicU64,
    rng: &mut ChaCha8Rng,
) {
    let mut buf = StepBuffers::new(cfg.dim);
    let mut targets = Vec::with_capacity(cfg.negatives + 1);
    let mut kept = Vec::new();
    for sentence in sentences {
        kept.clear();
        match &sampler.keep_prob {
            Some(p) => kept.extend(
                sentence
                    .iter()
                    .filter(|&&w| p[w as usize] >= 1.0 || rng.random::<f64>() < p[w as usize]),
            ),
            None => kept.extend_from_slice(sentence),
        }
        let done = progress.fetch_add(sentence.len() as u64, Ordering::Relaxed);
        let lr = schedule.rate(done);
        for (pos, &center) in kept.iter().enumerate() {
            let reach = if cfg.shrink_window {
                rng.random_range(1..=cfg.window)
            } else {
                cfg.window
            };
            let lo = pos.saturating_sub(reach);
            let hi = (pos + reach).min(kept.len() - 1);
            for (cpos, &ctx) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                if cpos == pos {
                    continue;
                }
                targets.clear();
                targets.push((ctx as usize, 1.0));
                for _ in 0..cfg.negatives {
                    let neg = sampler.negatives.sample(rng);
                    if neg != ctx as usize {
                        targets.push((neg, 0.0));
                    }
                }
                sgd_step(input, output, center as usize, &targets, lr, &mut buf);
            }
        }
    }
}

/// Trains SGNS input vectors for `n_words` word ids over `sentences`.
///
/// Negatives follow the unigram distribution raised to 3/4. With one worker
/// the result depends only on the inputs and `cfg.seed`.
pub fn train_sgns(sentences: &[Vec<u32>], n_words: usize, cfg: &SgnsConfig) -> Result<DenseMatrix> {
    cfg.validate()?;
    let mut counts = vec![0u64; n_words];
    for s in sentences {
        for &w in s {
            let w = w as usize;
            if w >= n_words {
                return Err(Error::config(format!("word id {w} out of range for {n_words} words")));
            }
            counts[w] += 1;
        }
    }
    let total_tokens: u64 = counts.iter().sum();
    if total_tokens == 0 {
        return Err(Error::data("no in-vocabulary tokens to train on"));
    }

    let dim = cfg.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bound = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..n_words * dim)
        .map(|_| rng.random_range(-bound..=bound))
        .collect();
    let mut output = vec![0.0f32; n_words * dim];

    let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(0.75)).collect();
    let sampler = Sampler {
        negatives: WeightedAliasIndex::new(weights)
            .map_err(|e| Error::data(format!("negative sampling table: {e}")))?,
        keep_prob: cfg.subsample.map(|t| {
            counts
                .iter()
                .map(|&c| {
                    let f = c as f64 / total_tokens as f64;
                    if f == 0.0 {
                        1.0
                    } else {
                        ((f / t).sqrt() + 1.0) * t / f
                    }
                })
                .collect()
        }),
    };
    let schedule = Schedule {
        lr0: cfg.learning_rate,
        lr_min: cfg.min_learning_rate,
        total: total_tokens * cfg.epochs as u64,
    };
    let progress = AtomicU64::new(0);

    for epoch in 0..cfg.epochs {
        let epoch_seed = cfg.seed ^ (epoch as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        if cfg.workers == 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(epoch_seed);
            train_chunk(
                sentences,
                &mut PlainRows { data: &mut input, dim },
                &mut PlainRows { data: &mut output, dim },
                cfg,
                &sampler,
                &schedule,
                &progress,
                &mut rng,
            );
        } else {
            let shared_in: Vec<AtomicU32> = input.iter().map(|x| AtomicU32::new(x.to_bits())).collect();
            let shared_out: Vec<AtomicU32> = output.iter().map(|x| AtomicU32::new(x.to_bits())).collect();
            let chunk = sentences.len().div_ceil(cfg.workers).max(1);
            std::thread::scope(|scope| {
                for (worker, part) in sentences.chunks(chunk).enumerate() {
                    let (shared_in, shared_out) = (&shared_in, &shared_out);
                    let (sampler, schedule, progress) = (&sampler, &schedule, &progress);
                    scope.spawn(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(epoch_seed.wrapping_add(worker as u64));
                        train_chunk(
                            part,
                            &mut SharedRows { data: shared_in, dim },
                            &mut SharedRows { data: shared_out, dim },
                            cfg,
                            sampler,
                            schedule,
                            progress,
                            &mut rng,
                        );
                    });
                }
            });
            input = shared_in.into_iter().map(|x| f32::from_bits(x.into_inner())).collect();
            output = shared_out.into_iter().map(|x| f32::from_bits(x.into_inner())).collect();
        }
        if input.iter().chain(&output).any(|x| !x.is_finite()) {
            return Err(Error::data(format!("SGNS diverged in epoch {}", epoch + 1)));
        }
        log::debug!("sgns epoch {}/{} done", epoch + 1, cfg.epochs);
    }

    DenseMatrix::new(n_words, dim, input.into_iter().map(f64::from).collect())
}

/// Trains word vectors on the corpus, one row per vocabulary term.
pub fn train_word_vectors(corpus: &Corpus, vocab: &Vocabulary, cfg: &SgnsConfig) -> Result<EmbeddingMatrix> {
    let sentences = corpus.encode(vocab);
    let vectors = train_sgns(&sentences, vocab.len(), cfg)?;
    EmbeddingMatrix::new(vocab.terms().to_vec(), vectors)
}
