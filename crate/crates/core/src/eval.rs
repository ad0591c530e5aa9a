//! Evaluation protocols: node classification with an L2-regularized linear
//! classifier, link prediction by cosine ranking of hidden edges, and λ sweeps.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Labels};
use crate::error::{Error, Result};
use crate::graph::EdgeList;
use crate::matrix::{cosine, DenseMatrix};
use crate::par;
use crate::rle::{self, RleConfig};
use crate::wordvec::EmbeddingMatrix;

/// Fraction of positions where `pred` and `truth` agree. For single-label
/// multiclass problems this is the micro-averaged F1.
pub fn micro_f1(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::data(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::data("micro-F1 of an empty prediction set"));
    }
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / pred.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Loss {
    #[default]
    SquaredHinge,
    Logistic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierConfig {
    pub loss: Loss,
    /// Center and scale features with training-set statistics.
    pub standardize: bool,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            loss: Loss::SquaredHinge,
            standardize: true,
            max_iter: 1000,
            tol: 1e-6,
        }
    }
}

/// One-vs-rest linear model; the last weight of each class is its bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    weights: DenseMatrix,
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl LinearModel {
    pub fn n_classes(&self) -> usize {
        self.weights.n_rows()
    }

    /// Decision value of every class for one sample.
    pub fn decision(&self, x: &[f64]) -> Vec<f64> {
        let z: Vec<f64> = x
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect();
        self.weights
            .rows()
            .map(|w| {
                let (w, b) = w.split_at(z.len());
                w.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>() + b[0]
            })
            .collect()
    }

    /// Highest-scoring class; ties go to the smallest class id.
    pub fn predict_one(&self, x: &[f64]) -> usize {
        let d = self.decision(x);
        let mut best = 0;
        for (c, &v) in d.iter().enumerate() {
            if v > d[best] {
                best = c;
            }
        }
        best
    }

    pub fn predict(&self, x: &DenseMatrix) -> Vec<usize> {
        x.rows().map(|r| self.predict_one(r)).collect()
    }
}

/// Binary problem over augmented rows `[x, 1]` with targets ±1:
/// `(l2/2)‖w‖² + (1/n) Σ loss(y_i w·x_i)`.
struct BinaryProblem<'a> {
    x: &'a [f64],
    width: usize,
    y: Vec<f64>,
    l2: f64,
    loss: Loss,
}

impl BinaryProblem<'_> {
    fn n(&self) -> usize {
        self.y.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.width..(i + 1) * self.width]
    }

    fn margins(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n())
            .map(|i| self.y[i] * self.row(i).iter().zip(w).map(|(a, b)| a * b).sum::<f64>())
            .collect()
    }

    fn objective(&self, w: &[f64], margins: &[f64]) -> f64 {
        let reg = 0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>();
        let data: f64 = margins
            .iter()
            .map(|&m| match self.loss {
                Loss::SquaredHinge => (1.0 - m).max(0.0).powi(2),
                Loss::Logistic => softplus(-m),
            })
            .sum();
        reg + data / self.n() as f64
    }

    /// Gradient and per-sample curvature weights of the data term.
    fn gradient(&self, w: &[f64], margins: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n() as f64;
        let mut g: Vec<f64> = w.iter().map(|v| self.l2 * v).collect();
        let mut curv = vec![0.0; self.n()];
        for (i, &m) in margins.iter().enumerate() {
            let (coef, c) = match self.loss {
                Loss::SquaredHinge if m < 1.0 => (-2.0 * (1.0 - m), 2.0),
                Loss::SquaredHinge => (0.0, 0.0),
                Loss::Logistic => {
                    let s = sigmoid(-m);
                    (-s, s * (1.0 - s))
                }
            };
            curv[i] = c;
            if coef != 0.0 {
                let scale = coef * self.y[i] / n;
                for (gj, xj) in g.iter_mut().zip(self.row(i)) {
                    *gj += scale * xj;
                }
            }
        }
        (g, curv)
    }

    fn hessian_vec(&self, curv: &[f64], v: &[f64]) -> Vec<f64> {
        let n = self.n() as f64;
        let mut out: Vec<f64> = v.iter().map(|x| self.l2 * x).collect();
        for (i, &c) in curv.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let row = self.row(i);
            let xv: f64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            let scale = c * xv / n;
            for (o, x) in out.iter_mut().zip(row) {
                *o += scale * x;
            }
        }
        out
    }

    /// Truncated Newton with conjugate-gradient inner solves and Armijo
    /// backtracking.
    fn solve(&self, max_iter: usize, tol: f64) -> Vec<f64> {
        let mut w = vec![0.0; self.width];
        let mut margins = self.margins(&w);
        let mut f = self.objective(&w, &margins);
        for _ in 0..max_iter {
            let (g, curv) = self.gradient(&w, &margins);
            let gnorm = dot(&g, &g).sqrt();
            if gnorm < tol {
                break;
            }
            let direction = self.conjugate_gradient(&curv, &g, gnorm);
            let slope = dot(&g, &direction);
            let mut step = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<f64> = w.iter().zip(&direction).map(|(a, d)| a + step * d).collect();
                let trial_margins = self.margins(&trial);
                let trial_f = self.objective(&trial, &trial_margins);
                if trial_f <= f + 1e-4 * step * slope {
                    w = trial;
                    margins = trial_margins;
                    improved = trial_f < f;
                    f = trial_f;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        w
    }

    fn conjugate_gradient(&self, curv: &[f64], g: &[f64], gnorm: f64) -> Vec<f64> {
        let target = (0.1f64).min(gnorm.sqrt()) * gnorm;
        let mut d = vec![0.0; g.len()];
        let mut r: Vec<f64> = g.iter().map(|x| -x).collect();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        for _ in 0..(2 * g.len()).max(10) {
            if rr.sqrt() <= target {
                break;
            }
            let hp = self.hessian_vec(curv, &p);
            let php = dot(&p, &hp);
            if php <= 0.0 {
                break;
            }
            let alpha = rr / php;
            for ((di, pi), (ri, hi)) in d.iter_mut().zip(&p).zip(r.iter_mut().zip(&hp)) {
                *di += alpha * pi;
                *ri -= alpha * hi;
            }
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

/// Fits a one-vs-rest L2-regularized linear model. Class ids must lie in
/// `0..n_classes`; at least two distinct classes must be present.
pub fn train_linear_classifier(
    x: &DenseMatrix,
    y: &[usize],
    n_classes: usize,
    l2: f64,
    cfg: &ClassifierConfig,
) -> Result<LinearModel> {
    if x.n_rows() != y.len() {
        return Err(Error::config(format!("{} samples but {} labels", x.n_rows(), y.len())));
    }
    if let Some(&c) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::config(format!("class id {c} out of range")));
    }
    if y.iter().collect::<HashSet<_>>().len() < 2 {
        return Err(Error::data("training data must contain at least two classes"));
    }
    if l2.is_nan() || l2 <= 0.0 {
        return Err(Error::config(format!("l2 strength must be positive, got {l2}")));
    }
    let d = x.n_cols();
    let (mean, scale) = if cfg.standardize {
        column_stats(x)
    } else {
        (vec![0.0; d], vec![1.0; d])
    };
    let width = d + 1;
    let mut aug = Vec::with_capacity(x.n_rows() * width);
    for r in x.rows() {
        aug.extend(r.iter().zip(&mean).zip(&scale).map(|((v, m), s)| (v - m) / s));
        aug.push(1.0);
    }
    let rows = par::map_range(n_classes, |c| {
        let problem = BinaryProblem {
            x: &aug,
            width,
            y: y.iter().map(|&t| if t == c { 1.0 } else { -1.0 }).collect(),
            l2,
            loss: cfg.loss,
        };
        problem.solve(cfg.max_iter, cfg.tol)
    });
    Ok(LinearModel {
        weights: DenseMatrix::new(n_classes, width, rows.concat())?,
        mean,
        scale,
    })
}

fn column_stats(x: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let (n, d) = x.shape();
    let mut mean = vec![0.0; d];
    for r in x.rows() {
        mean.iter_mut().zip(r).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= n.max(1) as f64);
    let mut var = vec![0.0; d];
    for r in x.rows() {
        var.iter_mut().zip(r).zip(&mean).for_each(|((s, v), m)| *s += (v - m).powi(2));
    }
    let scale = var
        .into_iter()
        .map(|s| {
            let sd = (s / n.max(1) as f64).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    (mean, scale)
}

/// Default regularization grid: 10⁻³ … 10³.
pub fn default_l2_grid() -> Vec<f64> {
    (-3..=3).map(|e| 10f64.powi(e)).collect()
}

/// Fold id per sample. Samples are grouped by class and dealt round-robin
/// with one running counter, so every class spreads over the folds and no
/// fold is empty while there are at least `folds` samples.
fn stratified_folds(y: &[usize], folds: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by_key(|&i| y[i]);
    let mut fold_of = vec![0; y.len()];
    for (pos, &i) in order.iter().enumerate() {
        fold_of[i] = pos % folds;
    }
    fold_of
}

/// Grid value with the best mean cross-validated micro-F1; ties go to the
/// smallest value.
pub fn grid_search_l2(
    x: &DenseMatrix,
    y: &[usize],
    n_classes: usize,
    grid: &[f64],
    folds: usize,
    cfg: &ClassifierConfig,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::config("empty regularization grid"));
    }
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    if folds < 2 {
        return Err(Error::config("grid search needs at least two folds"));
    }
    if y.len() < folds {
        return Err(Error::data(format!(
            "{} training samples cannot fill {folds} cross-validation folds",
            y.len()
        )));
    }
    let scores = cv_scores(x, y, n_classes, grid, folds, cfg)?;
    Ok(pick_best(grid, &scores))
}

/// Mean cross-validated micro-F1 per grid value.
pub fn cv_scores(
    x: &DenseMatrix,
    y: &[usize],
    n_classes: usize,
    grid: &[f64],
    folds: usize,
    cfg: &ClassifierConfig,
) -> Result<Vec<f64>> {
    let fold_of = stratified_folds(y, folds);
    let jobs = grid.len() * folds;
    let results = par::map_range(jobs, |job| -> Result<f64> {
        let (gi, f) = (job / folds, job % folds);
        let (train, test): (Vec<usize>, Vec<usize>) = (0..y.len()).partition(|&i| fold_of[i] != f);
        if test.is_empty() {
            return Err(Error::data("a cross-validation fold is empty"));
        }
        let ytr: Vec<usize> = train.iter().map(|&i| y[i]).collect();
        let model = train_linear_classifier(&x.select_rows(&train), &ytr, n_classes, grid[gi], cfg)?;
        let yte: Vec<usize> = test.iter().map(|&i| y[i]).collect();
        micro_f1(&model.predict(&x.select_rows(&test)), &yte)
    });
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(results
        .chunks(folds)
        .map(|c| c.iter().sum::<f64>() / folds as f64)
        .collect())
}

fn pick_best(grid: &[f64], scores: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let mut best = order[0];
    for &i in &order[1..] {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    grid[best]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_ratio: f64,
    pub n_repeats: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_ratio: f64) -> Self {
        Self {
            train_ratio,
            n_repeats: 10,
            seed: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.train_ratio > 0.0 && self.train_ratio < 1.0) {
            return Err(Error::config(format!(
                "train ratio must lie in (0, 1), got {}",
                self.train_ratio
            )));
        }
        if self.n_repeats == 0 {
            return Err(Error::config("at least one repeat is required"));
        }
        Ok(())
    }
}

/// Per-class random split: each class contributes round(ratio · size)
/// members to training, keeping at least one on each side.
pub fn stratified_split(samples: &[usize], classes: &[usize], ratio: f64, rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>) {
    let n_classes = classes.iter().max().map_or(0, |m| m + 1);
    let mut by_class = vec![Vec::new(); n_classes];
    for (&s, &c) in samples.iter().zip(classes) {
        by_class[c].push(s);
    }
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for mut members in by_class.into_iter().filter(|m| !m.is_empty()) {
        members.shuffle(rng);
        let k = ((ratio * members.len() as f64).round() as usize).clamp(1, members.len().saturating_sub(1).max(1));
        train.extend_from_slice(&members[..k]);
        test.extend_from_slice(&members[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationConfig {
    pub grid: Vec<f64>,
    pub folds: usize,
    pub classifier: ClassifierConfig,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        Self {
            grid: default_l2_grid(),
            folds: 4,
            classifier: ClassifierConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classification,
    LinkPrediction,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::LinkPrediction => "link_prediction",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub task: Task,
    pub method: String,
    /// Train ratio (classification) or hidden-edge ratio (link prediction).
    pub ratio: f64,
    pub scores: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    pub wall_time_seconds: f64,
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl EvalReport {
    pub fn new(task: Task, method: impl Into<String>, ratio: f64, scores: Vec<f64>, wall_time_seconds: f64) -> Self {
        let (mean, stddev) = mean_std(&scores);
        Self {
            task,
            method: method.into(),
            ratio,
            scores,
            mean,
            stddev,
            wall_time_seconds,
        }
    }
}

pub(crate) fn repeat_seed(seed: u64, repeat: usize) -> u64 {
    seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ (repeat as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Micro-F1 over repeated stratified splits of the labeled documents, with
/// the regularization strength chosen by grid search on each training split.
pub fn classification_experiment(
    d: &EmbeddingMatrix,
    labels: &Labels,
    spec: &SplitSpec,
    cfg: &ClassificationConfig,
    method: &str,
) -> Result<EvalReport> {
    spec.validate()?;
    let start = Instant::now();
    let scores = classification_scores(d.vectors(), labels, spec, cfg)?;
    Ok(EvalReport::new(
        Task::Classification,
        method,
        spec.train_ratio,
        scores,
        start.elapsed().as_secs_f64(),
    ))
}

fn classification_scores(x: &DenseMatrix, labels: &Labels, spec: &SplitSpec, cfg: &ClassificationConfig) -> Result<Vec<f64>> {
    if labels.assignments.len() != x.n_rows() {
        return Err(Error::config("labels do not cover the embedding rows"));
    }
    let (docs, classes) = labels.labeled();
    let n_classes = labels.n_classes();
    for c in 0..n_classes {
        let size = classes.iter().filter(|&&k| k == c).count();
        if size < 2 {
            return Err(Error::data(format!(
                "class {:?} has {size} labeled document(s); at least 2 are required",
                labels.class_names[c]
            )));
        }
    }
    let runs = par::map_range(spec.n_repeats, |r| -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(repeat_seed(spec.seed, r));
        let (train, test) = stratified_split(&docs, &classes, spec.train_ratio, &mut rng);
        let class_of = |i: &usize| labels.assignments[*i].expect("labeled");
        let ytr: Vec<usize> = train.iter().map(class_of).collect();
        let yte: Vec<usize> = test.iter().map(class_of).collect();
        let xtr = x.select_rows(&train);
        let l2 = grid_search_l2(&xtr, &ytr, n_classes, &cfg.grid, cfg.folds, &cfg.classifier)?;
        let model = train_linear_classifier(&xtr, &ytr, n_classes, l2, &cfg.classifier)?;
        micro_f1(&model.predict(&x.select_rows(&test)), &yte)
    });
    runs.into_iter().collect()
}

/// Splits the undirected edge set into visible and hidden parts, hiding
/// round(ratio · |edges|) uniformly chosen edges.
pub fn hide_edges(edges: &EdgeList, hide_ratio: f64, seed: u64) -> Result<(EdgeList, Vec<(usize, usize)>)> {
    if !(hide_ratio > 0.0 && hide_ratio < 1.0) {
        return Err(Error::config(format!("hide ratio must lie in (0, 1), got {hide_ratio}")));
    }
    let mut all = edges.undirected();
    let k = (hide_ratio * all.len() as f64).round() as usize;
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let visible = all.split_off(k);
    Ok((EdgeList::new(edges.n_nodes(), visible)?, all))
}

/// Uniformly sampled distinct node pairs that are not edges of `edges`.
pub fn sample_non_edges(edges: &EdgeList, count: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let n = edges.n_nodes();
    let existing: HashSet<(usize, usize)> = edges.undirected().into_iter().collect();
    let available = (n * n.saturating_sub(1) / 2).saturating_sub(existing.len());
    if count > available {
        return Err(Error::data(format!(
            "cannot sample {count} unconnected pairs; only {available} exist"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        if !existing.contains(&pair) && chosen.insert(pair) {
            out.push(pair);
        }
    }
    Ok(out)
}

/// Area under the ROC curve from the Mann–Whitney rank statistic; tied
/// scores count one half.
pub fn auc(positives: &[f64], negatives: &[f64]) -> Result<f64> {
    if positives.is_empty() || negatives.is_empty() {
        return Err(Error::data("AUC needs at least one positive and one negative"));
    }
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&s| (s, true))
        .chain(negatives.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // ranks i+1..=j share their average
        let avg = (i + 1 + j) as f64 / 2.0;
        rank_sum += avg * all[i..j].iter().filter(|e| e.1).count() as f64;
        i = j;
    }
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    Ok((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPredictionSpec {
    pub hide_ratio: f64,
    pub n_repeats: usize,
    pub seed: u64,
}

impl LinkPredictionSpec {
    pub fn new(hide_ratio: f64) -> Self {
        Self {
            hide_ratio,
            n_repeats: 10,
            seed: 1,
        }
    }
}

/// Cosine scores of `pairs` under embedding `d` (rows indexed by node).
pub fn pair_scores(d: &EmbeddingMatrix, pairs: &[(usize, usize)]) -> Vec<f64> {
    pairs.iter().map(|&(a, b)| cosine(d.row(a), d.row(b))).collect()
}

/// Hides edges, re-embeds on the visible graph with `embed_visible`, and
/// scores hidden pairs against an equal number of unconnected pairs.
pub fn link_prediction_experiment<F>(edges: &EdgeList, spec: &LinkPredictionSpec, method: &str, embed_visible: F) -> Result<EvalReport>
where
    F: Fn(&EdgeList) -> Result<EmbeddingMatrix> + Sync + Send,
{
    if spec.n_repeats == 0 {
        return Err(Error::config("at least one repeat is required"));
    }
    if edges.undirected().len() < 10 {
        return Err(Error::data("link prediction needs at least 10 edges"));
    }
    let start = Instant::now();
    let runs = par::map_range(spec.n_repeats, |r| -> Result<f64> {
        let seed = repeat_seed(spec.seed, r);
        let (visible, hidden) = hide_edges(edges, spec.hide_ratio, seed)?;
        let negatives = sample_non_edges(edges, hidden.len(), seed ^ 0x5DEE_CE66)?;
        let d = embed_visible(&visible)?;
        if d.len() != edges.n_nodes() {
            return Err(Error::config("embedding does not have one row per node"));
        }
        auc(&pair_scores(&d, &hidden), &pair_scores(&d, &negatives))
    });
    let scores = runs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::new(
        Task::LinkPrediction,
        method,
        spec.hide_ratio,
        scores,
        start.elapsed().as_secs_f64(),
    ))
}

/// Link prediction for the smoothed embedding; word vectors stay fixed and
/// only the similarity matrix is rebuilt from the visible graph.
pub fn rle_link_prediction(
    corpus: &Corpus,
    edges: &EdgeList,
    u: &EmbeddingMatrix,
    cfg: &RleConfig,
    spec: &LinkPredictionSpec,
) -> Result<EvalReport> {
    link_prediction_experiment(edges, spec, "rle", |visible| rle::embed(corpus, visible, u, cfg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub mean: f64,
    pub stddev: f64,
}

/// Classification micro-F1 as a function of λ. Every point uses the same
/// splits (they depend only on the labels and `spec.seed`).
pub fn lambda_sweep(
    corpus: &Corpus,
    edges: &EdgeList,
    u: &EmbeddingMatrix,
    lambdas: &[f64],
    spec: &SplitSpec,
    cfg: &ClassificationConfig,
    base: &RleConfig,
) -> Result<Vec<SweepPoint>> {
    let labels = corpus
        .labels()
        .ok_or_else(|| Error::config("the λ sweep needs document labels"))?;
    lambdas
        .iter()
        .map(|&lambda| {
            let rcfg = RleConfig {
                lambda,
                ..base.clone()
            };
            let d = rle::embed(corpus, edges, u, &rcfg)?;
            let report = classification_experiment(&d, labels, spec, cfg, "rle")?;
            Ok(SweepPoint {
                lambda,
                mean: report.mean,
                stddev: report.stddev,
            })
        })
        .collect()
}

/// Line-oriented `key=value` rendering of reports, one block per report.
pub fn reports_to_text(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let scores: Vec<String> = r.scores.iter().map(|s| format!("{s:.6}")).collect();
        let _ = writeln!(out, "task={}", r.task.as_str());
        let _ = writeln!(out, "method={}", r.method);
        let _ = writeln!(out, "ratio={}", r.ratio);
        let _ = writeln!(out, "repeats={}", r.scores.len());
        let _ = writeln!(out, "scores={}", scores.join(","));
        let _ = writeln!(out, "mean={:.6}", r.mean);
        let _ = writeln!(out, "stddev={:.6}", r.stddev);
        let _ = writeln!(out, "seconds={:.3}", r.wall_time_seconds);
        out.push('\n');
    }
    out
}

pub const REPORT_CSV_HEADER: &str = "task,method,ratio,mean,stddev,seconds";

pub fn reports_to_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from(REPORT_CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.3}",
            r.task.as_str(),
            r.method,
            r.ratio,
            r.mean,
            r.stddev,
            r.wall_time_seconds
        );
    }
    out
}

pub fn sweep_to_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from("lambda,mean,stddev\n");
    for p in points {
        let _ = writeln!(out, "{},{:.6},{:.6}", p.lambda, p.mean, p.stddev);
    }
    out
}
