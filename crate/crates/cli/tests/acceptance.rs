//! Acceptance suite: one PASS / FAIL / SKIP line per criterion.
//!
//! The Cora criteria need a directory with `docs.tsv`, `edges.tsv` and
//! `labels.tsv` (optionally `vectors.txt`) named by `RLE_CORA_DIR`.

mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rle_core::corpus::{self, Corpus, PruningConfig};
use rle_core::eval::{self, ClassificationConfig, LinkPredictionSpec, SplitSpec};
use rle_core::graph::EdgeList;
use rle_core::keywords;
use rle_core::matrix::{cosine, DenseMatrix};
use rle_core::rle::{self, RleConfig};
use rle_core::synthetic::{planted_topics, PlantedTopicsConfig};
use rle_core::wordvec::{self, EmbeddingMatrix, SgnsConfig};

use common::*;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Grid = Vec<Vec<f64>>;

fn max_diff(a: &DenseMatrix, b: &Grid) -> f64 {
    if a.n_rows() != b.len() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for (i, row) in b.iter().enumerate() {
        if a.row(i).len() != row.len() {
            return f64::INFINITY;
        }
        for (x, y) in a.row(i).iter().zip(row) {
            worst = worst.max((x - y).abs());
        }
    }
    worst
}

struct Instance {
    corpus: Corpus,
    edges: EdgeList,
    u: EmbeddingMatrix,
    tokens: Vec<Vec<usize>>,
    pairs: Vec<(usize, usize)>,
    v: usize,
    lambda: f64,
}

/// Random small instance; token index `v` stands for an out-of-vocabulary word.
fn random_instance(rng: &mut ChaCha8Rng, all_in_vocab: bool) -> Instance {
    let n = rng.random_range(1..=8);
    let v = rng.random_range(1..=10);
    let k = rng.random_range(1..=4);
    let tokens: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let lo = usize::from(all_in_vocab);
            let len = rng.random_range(lo..=6);
            let top = if all_in_vocab { v } else { v + 1 };
            (0..len).map(|_| rng.random_range(0..top)).collect()
        })
        .collect();
    let word = |t: usize| if t == v { "oov".to_string() } else { format!("w{t}") };
    let corpus = Corpus::new(
        (0..n).map(|i| format!("d{i}")).collect(),
        tokens.iter().map(|d| d.iter().map(|&t| word(t)).collect()).collect(),
    )
    .unwrap();
    let m = rng.random_range(0..=2 * n);
    let pairs: Vec<(usize, usize)> = (0..m).map(|_| (rng.random_range(0..n), rng.random_range(0..n))).collect();
    let edges = EdgeList::new(n, pairs.clone()).unwrap();
    let values = (0..v * k).map(|_| rng.random_range(-1.0..1.0)).collect();
    let u = EmbeddingMatrix::new((0..v).map(word).collect(), DenseMatrix::new(v, k, values).unwrap()).unwrap();
    let lambda = rng.random_range(0.0..=1.0);
    Instance {
        corpus,
        edges,
        u,
        tokens,
        pairs,
        v,
        lambda,
    }
}

struct Oracle {
    a: Grid,
    s: Grid,
    t: Grid,
    b: Grid,
    p: Grid,
    d: Grid,
}

fn matmul(x: &Grid, y: &Grid) -> Grid {
    let inner = y.len();
    let cols = y.first().map_or(0, Vec::len);
    x.iter()
        .map(|r| (0..cols).map(|j| (0..inner).map(|k| r[k] * y[k][j]).sum()).collect())
        .collect()
}

/// Dense brute-force evaluation of the whole pipeline.
fn oracle(inst: &Instance) -> Oracle {
    let n = inst.tokens.len();
    let v = inst.v;
    let mut adj = vec![vec![0.0; n]; n];
    for &(s, d) in &inst.pairs {
        if s != d {
            adj[s][d] = 1.0;
            adj[d][s] = 1.0;
        }
    }
    let normalize = |m: &Grid| -> Grid {
        m.iter()
            .map(|r| {
                let s: f64 = r.iter().sum();
                r.iter().map(|x| if s > 0.0 { x / s } else { 0.0 }).collect()
            })
            .collect()
    };
    let a = normalize(&adj);
    let a2 = matmul(&a, &a);
    let s: Grid = (0..n).map(|i| (0..n).map(|j| 0.5 * a[i][j] + 0.5 * a2[i][j]).collect()).collect();
    let t: Grid = inst
        .tokens
        .iter()
        .map(|doc| {
            let mut row = vec![0.0; v];
            let inv: Vec<usize> = doc.iter().copied().filter(|&w| w < v).collect();
            for &w in &inv {
                row[w] += 1.0 / inv.len() as f64;
            }
            row
        })
        .collect();
    let b: Grid = (0..n)
        .map(|i| {
            let mass: f64 = s[i].iter().sum();
            if mass == 0.0 {
                t[i].clone()
            } else {
                (0..v).map(|w| (0..n).map(|j| s[i][j] * t[j][w]).sum::<f64>() / mass).collect()
            }
        })
        .collect();
    let p: Grid = (0..n)
        .map(|i| (0..v).map(|w| (1.0 - inst.lambda) * t[i][w] + inst.lambda * b[i][w]).collect())
        .collect();
    let u: Grid = inst.u.vectors().rows().map(<[f64]>::to_vec).collect();
    let d = matmul(&p, &u);
    Oracle { a, s, t, b, p, d }
}

fn criterion_oracles() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for trial in 0..200 {
        let inst = random_instance(&mut rng, false);
        let cfg = RleConfig::with_lambda(inst.lambda);
        let stages = match rle::embed_stages(&inst.corpus, &inst.edges, &inst.u, &cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Fail(format!("trial {trial}: {e}")),
        };
        let fused = rle::embed(&inst.corpus, &inst.edges, &inst.u, &cfg).unwrap();
        let o = oracle(&inst);
        let diffs = [
            ("A", max_diff(&stages.transition.to_dense(), &o.a)),
            ("S", max_diff(&stages.similarity.to_dense(), &o.s)),
            ("T", max_diff(&stages.doc_term.to_dense(), &o.t)),
            ("B", max_diff(&stages.smoothed.to_dense(), &o.b)),
            ("P", max_diff(&stages.weights.to_dense(), &o.p)),
            ("D", max_diff(stages.embedding.vectors(), &o.d)),
            ("D fused", max_diff(fused.vectors(), &o.d)),
        ];
        for (name, diff) in diffs {
            if diff > 1e-9 {
                return Outcome::Fail(format!("trial {trial}: {name} differs from the dense oracle by {diff:e}"));
            }
            worst = worst.max(diff);
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Outcome::Fail(format!("200 instances took {elapsed:.2?}, limit 10 s"));
    }
    Outcome::Pass(format!("200 instances, max abs deviation {worst:.1e}, {elapsed:.2?}"))
}

fn stochastic_rows(m: &DenseMatrix, tol: f64) -> bool {
    m.rows().all(|r| {
        let s: f64 = r.iter().sum();
        s == 0.0 || (s - 1.0).abs() <= tol
    })
}

fn criterion_invariants() -> Outcome {
    const TRIALS: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checks = BTreeMap::new();

    // row sums: with every document holding an in-vocabulary word, T, B and
    // P are fully stochastic; A and S rows are stochastic or empty
    let mut ok = true;
    for _ in 0..TRIALS {
        let inst = random_instance(&mut rng, true);
        let st = rle::embed_stages(&inst.corpus, &inst.edges, &inst.u, &RleConfig::with_lambda(inst.lambda)).unwrap();
        ok &= stochastic_rows(&st.transition.to_dense(), 1e-12) && stochastic_rows(&st.similarity.to_dense(), 1e-9);
        for m in [&st.doc_term, &st.smoothed, &st.weights] {
            ok &= (0..m.n_rows()).all(|i| (m.row_sum(i) - 1.0).abs() <= 1e-9);
        }
    }
    checks.insert("row-stochastic A/S/T/B/P", ok);

    let mut ok = true;
    for _ in 0..TRIALS {
        let inst = random_instance(&mut rng, false);
        let d0 = rle::embed(&inst.corpus, &inst.edges, &inst.u, &RleConfig::with_lambda(0.0)).unwrap();
        let wa = rle::word_average(&inst.corpus, &inst.u).unwrap();
        ok &= d0.vectors().values() == wa.vectors().values();
    }
    checks.insert("lambda=0 gives TU exactly", ok);

    let mut ok = true;
    for _ in 0..TRIALS {
        let inst = random_instance(&mut rng, false);
        let at = |l: f64| rle::embed(&inst.corpus, &inst.edges, &inst.u, &RleConfig::with_lambda(l)).unwrap();
        let (d0, d1, dl) = (at(0.0), at(1.0), at(inst.lambda));
        let l = inst.lambda;
        ok &= dl
            .vectors()
            .values()
            .iter()
            .zip(d0.vectors().values().iter().zip(d1.vectors().values()))
            .all(|(x, (a, b))| (x - ((1.0 - l) * a + l * b)).abs() <= 1e-9);
    }
    checks.insert("lambda interpolation linear", ok);

    // two one-hot documents over random orthonormal word vectors
    let mut ok = true;
    for _ in 0..TRIALS {
        let k = rng.random_range(2..=6);
        let basis = random_orthonormal(&mut rng, k);
        let (i, j) = {
            let mut idx: Vec<usize> = (0..k).collect();
            idx.shuffle(&mut rng);
            (idx[0], idx[1])
        };
        let words: Vec<String> = (0..k).map(|w| format!("w{w}")).collect();
        let u = EmbeddingMatrix::new(words.clone(), DenseMatrix::from_rows(&basis).unwrap()).unwrap();
        let c = Corpus::new(vec!["x".into(), "y".into()], vec![vec![words[i].clone()], vec![words[j].clone()]]).unwrap();
        let cos = |linked: bool, l: f64| {
            let g = EdgeList::new(2, if linked { vec![(0, 1)] } else { vec![] }).unwrap();
            let d = rle::embed(&c, &g, &u, &RleConfig::with_lambda(l)).unwrap();
            cosine(d.row(0), d.row(1))
        };
        let mut grid: Vec<f64> = (0..8).map(|_| rng.random_range(0.0..1.0)).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let base = cos(false, 0.0);
        ok &= grid.windows(2).all(|w| cos(true, w[1]) > cos(true, w[0]));
        ok &= grid.iter().all(|&l| (cos(false, l) - base).abs() <= 1e-12);
        // an isolated third document keeps its word average
        let c3 = Corpus::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![vec![words[i].clone()], vec![words[j].clone()], vec![words[j].clone()]],
        )
        .unwrap();
        let g3 = EdgeList::new(3, vec![(0, 1)]).unwrap();
        let d = rle::embed(&c3, &g3, &u, &RleConfig::with_lambda(grid[0])).unwrap();
        ok &= d.row(2).iter().zip(u.row(j)).all(|(x, y)| (x - y).abs() <= 1e-12);
    }
    checks.insert("linked pair converges, unlinked and isolated unchanged", ok);

    let mut ok = true;
    for _ in 0..TRIALS {
        let np = rng.random_range(1..30);
        let nn = rng.random_range(1..30);
        // coarse values force ties
        let mut draw = |m: usize| -> Vec<f64> { (0..m).map(|_| f64::from(rng.random_range(0..6u8))).collect() };
        let (pos, neg) = (draw(np), draw(nn));
        let pairwise: f64 = pos
            .iter()
            .flat_map(|p| neg.iter().map(move |q| if p > q { 1.0 } else if p == q { 0.5 } else { 0.0 }))
            .sum::<f64>()
            / (np * nn) as f64;
        ok &= (eval::auc(&pos, &neg).unwrap() - pairwise).abs() <= 1e-12;
    }
    checks.insert("AUC equals pairwise oracle", ok);

    let mut ok = true;
    for _ in 0..TRIALS {
        let n = rng.random_range(1..50);
        let c = rng.random_range(1..6);
        let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let acc = truth.iter().zip(&pred).filter(|(a, b)| a == b).count() as f64 / n as f64;
        ok &= (eval::micro_f1(&pred, &truth).unwrap() - acc).abs() <= 1e-12;
    }
    checks.insert("micro-F1 equals accuracy", ok);

    let failed: Vec<&str> = checks.iter().filter(|(_, &v)| !v).map(|(k, _)| *k).collect();
    if failed.is_empty() {
        Outcome::Pass(format!("{} properties x {TRIALS} trials", checks.len()))
    } else {
        Outcome::Fail(format!("violated: {}", failed.join("; ")))
    }
}

fn random_orthonormal(rng: &mut ChaCha8Rng, k: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut x: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        for b in &basis {
            let proj: f64 = x.iter().zip(b).map(|(p, q)| p * q).sum();
            x.iter_mut().zip(b).for_each(|(p, q)| *p -= proj * q);
        }
        let norm = x.iter().map(|p| p * p).sum::<f64>().sqrt();
        if norm > 1e-3 {
            basis.push(x.into_iter().map(|p| p / norm).collect());
        }
    }
    basis
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Negative log-likelihood of one center word against labeled targets.
fn sgns_loss(w: &[f64], out: &[Vec<f64>], targets: &[(usize, f64)]) -> f64 {
    targets
        .iter()
        .map(|&(t, label)| {
            let z: f64 = w.iter().zip(&out[t]).map(|(a, b)| a * b).sum();
            if label > 0.5 {
                -sigmoid(z).ln()
            } else {
                -sigmoid(-z).ln()
            }
        })
        .sum()
}

fn criterion_gradient() -> Outcome {
    // three words, k = 2: center 0, context 1, negative 2
    let dim = 2;
    let mut input = vec![0.3f32, -0.2, 0.7, 0.1, -0.4, 0.5];
    let mut output = vec![0.2f32, 0.6, -0.3, 0.4, 0.8, -0.1];
    let targets = [(1usize, 1.0f32), (2, 0.0)];
    let w0: Vec<f64> = input[..dim].iter().map(|&x| f64::from(x)).collect();
    let out0: Vec<Vec<f64>> = output.chunks(dim).map(|r| r.iter().map(|&x| f64::from(x)).collect()).collect();
    let t64: Vec<(usize, f64)> = targets.iter().map(|&(t, l)| (t, f64::from(l))).collect();
    let (in_before, out_before) = (input.clone(), output.clone());
    wordvec::sgns_step(&mut input, &mut output, dim, 0, &targets, 1.0);

    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for d in 0..dim {
        let analytic = -f64::from(input[d] - in_before[d]);
        let (mut wp, mut wm) = (w0.clone(), w0.clone());
        wp[d] += h;
        wm[d] -= h;
        let fd = (sgns_loss(&wp, &out0, &t64) - sgns_loss(&wm, &out0, &t64)) / (2.0 * h);
        worst = worst.max((analytic - fd).abs());
    }
    for &(t, _) in &targets {
        for d in 0..dim {
            let analytic = -f64::from(output[t * dim + d] - out_before[t * dim + d]);
            let (mut op, mut om) = (out0.clone(), out0.clone());
            op[t][d] += h;
            om[t][d] -= h;
            let fd = (sgns_loss(&w0, &op, &t64) - sgns_loss(&w0, &om, &t64)) / (2.0 * h);
            worst = worst.max((analytic - fd).abs());
        }
    }
    if worst < 1e-5 {
        Outcome::Pass(format!("max abs error {worst:.1e}"))
    } else {
        Outcome::Fail(format!("max abs error {worst:.1e}, limit 1e-5"))
    }
}

fn criterion_keywords() -> Outcome {
    let start = Instant::now();
    let p = planted_topics(&PlantedTopicsConfig::default()).unwrap();
    let vocab = p.vocabulary().unwrap();
    let sgns = SgnsConfig {
        epochs: 10,
        ..SgnsConfig::default()
    };
    let u = wordvec::train_word_vectors(&p.corpus, &vocab, &sgns).unwrap();
    let d = rle::embed(&p.corpus, &p.edges, &u, &RleConfig::default()).unwrap();
    let counts = corpus::build_count_matrix(&p.corpus, &vocab);
    let labels = p.corpus.labels().unwrap();
    let descs = keywords::describe_classes(&d, &u, &counts, &vocab, labels, keywords::DEFAULT_TOP_K).unwrap();
    let elapsed = start.elapsed();
    let mut summary = Vec::new();
    let mut ok = elapsed < Duration::from_secs(30);
    for (c, desc) in descs.iter().enumerate() {
        let hits = |ws: &[String]| ws.iter().filter(|w| p.topics[c].contains(w)).count();
        let (ours, tfidf) = (hits(&desc.embedding_words), hits(&desc.tfidf_words));
        ok &= ours >= 4 && ours >= tfidf;
        summary.push(format!("{}={ours}/5 (tf-idf {tfidf}/5)", desc.class_name));
    }
    let msg = format!("{}, {elapsed:.2?}", summary.join(" "));
    if ok {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let content = if name == "manifest.txt" || name.starts_with("report.") {
            without_timing(&path)
        } else {
            fs::read_to_string(&path).unwrap()
        };
        files.insert(name, content);
    }
    files
}

fn criterion_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let fx = write_fixture(dir.path(), &PlantedTopicsConfig::default());
    let runs: Vec<Vec<&str>> = vec![
        vec!["embed", "--method", "rle"],
        vec!["embed", "--method", "word_average"],
        vec!["embed", "--method", "deepwalk"],
        vec!["embed", "--method", "lsa"],
        vec!["embed", "--method", "concat"],
        vec!["eval-classify"],
        vec!["eval-linkpred"],
        vec!["eval-linkpred", "--method", "deepwalk"],
        vec!["sweep", "--grid", "0,0.5,1"],
        vec!["keywords"],
    ];
    let mut compared = 0;
    for (k, run) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let out: PathBuf = dir.path().join(format!("run{k}_{attempt}"));
            let mut args = strings(run);
            args.extend(strings(&[
                "--out",
                out.to_str().unwrap(),
                "--workers",
                "1",
                "--seed",
                "7",
                "--dim",
                "32",
                "--repeats",
                "3",
                "--walks-per-node",
                "10",
                "--walk-length",
                "20",
            ]));
            args.extend(fx.args());
            let o = rle(&args);
            if !o.status.success() {
                return Outcome::Fail(format!(
                    "`{}` failed: {}",
                    run.join(" "),
                    String::from_utf8_lossy(&o.stderr).trim()
                ));
            }
            outputs.push((snapshot(&out), o.stdout));
        }
        let (a, b) = (&outputs[0], &outputs[1]);
        if a.0 != b.0 {
            let differing: Vec<&String> = a.0.keys().filter(|f| a.0.get(*f) != b.0.get(*f)).collect();
            return Outcome::Fail(format!("`{}` differs in {differing:?}", run.join(" ")));
        }
        if a.1 != b.1 {
            return Outcome::Fail(format!("`{}` printed different output", run.join(" ")));
        }
        compared += a.0.len();
    }
    Outcome::Pass(format!("{} runs, {compared} files identical (timing fields excluded)", runs.len()))
}

struct Cora {
    corpus: Corpus,
    edges: EdgeList,
    u: EmbeddingMatrix,
    setup: Duration,
}

fn load_cora(dir: &Path) -> Result<Cora, String> {
    let start = Instant::now();
    let err = |e: rle_core::Error| e.to_string();
    let corpus = Corpus::read(&dir.join("docs.tsv")).map_err(err)?;
    let labels = corpus.read_labels(&dir.join("labels.tsv")).map_err(err)?;
    let corpus = corpus.with_labels(labels).map_err(err)?;
    let edges = EdgeList::read(&dir.join("edges.tsv"), &corpus).map_err(err)?;
    let vocab = corpus::build_vocabulary(&corpus, &corpus::default_stopwords(), PruningConfig::default()).map_err(err)?;
    let pretrained = dir.join("vectors.txt");
    let u = if pretrained.exists() {
        wordvec::load_word_vectors(&pretrained, &vocab).map_err(err)?.0
    } else {
        let sgns = SgnsConfig {
            window: 15,
            ..SgnsConfig::default()
        };
        wordvec::train_word_vectors(&corpus, &vocab, &sgns).map_err(err)?
    };
    Ok(Cora {
        corpus,
        edges,
        u,
        setup: start.elapsed(),
    })
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn criterion_cora_classification(c: &Cora) -> Outcome {
    let start = Instant::now();
    let d = rle::embed(&c.corpus, &c.edges, &c.u, &RleConfig::default()).unwrap();
    let labels = c.corpus.labels().unwrap();
    let cfg = ClassificationConfig::default();
    let f1 = |ratio| 100.0 * eval::classification_experiment(&d, labels, &SplitSpec::new(ratio), &cfg, "rle").unwrap().mean;
    let (half, tenth) = (f1(0.5), f1(0.1));
    let elapsed = start.elapsed() + c.setup;
    let msg = format!("micro-F1 {half:.1} at 50% (target 87.7±2.0), {tenth:.1} at 10% (target 84.0±2.5), {elapsed:.1?}");
    if within(half, 87.7, 2.0) && within(tenth, 84.0, 2.5) && elapsed < Duration::from_secs(300) {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_cora_links(c: &Cora) -> Outcome {
    let auc = |ratio| {
        100.0 * eval::rle_link_prediction(&c.corpus, &c.edges, &c.u, &RleConfig::default(), &LinkPredictionSpec::new(ratio))
            .unwrap()
            .mean
    };
    let (quarter, half) = (auc(0.25), auc(0.5));
    let msg = format!("AUC {quarter:.1} with 25% hidden (target 94.8±2.0), {half:.1} with 50% hidden (target 94.3±2.5)");
    if within(quarter, 94.8, 2.0) && within(half, 94.3, 2.5) {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

fn criterion_cora_sweep(c: &Cora) -> Outcome {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let points = eval::lambda_sweep(
        &c.corpus,
        &c.edges,
        &c.u,
        &grid,
        &SplitSpec::new(0.5),
        &ClassificationConfig::default(),
        &RleConfig::default(),
    )
    .unwrap();
    let best = points.iter().max_by(|a, b| a.mean.total_cmp(&b.mean)).unwrap();
    let at = |l: f64| points.iter().find(|p| (p.lambda - l).abs() < 1e-9).unwrap().mean;
    let gain = 100.0 * (at(0.7) - at(0.0));
    let msg = format!("peak at lambda {} ({:.1}), F1(0.7) - F1(0) = {gain:.1} points", best.lambda, 100.0 * best.mean);
    if (0.55..=0.85).contains(&best.lambda) && gain >= 2.0 {
        Outcome::Pass(msg)
    } else {
        Outcome::Fail(msg)
    }
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() {
    let cora = std::env::var_os("RLE_CORA_DIR").map(PathBuf::from);
    let cora_data = cora.as_deref().map(load_cora);
    let cora_outcome = |f: fn(&Cora) -> Outcome| match &cora_data {
        None => Outcome::Skip("RLE_CORA_DIR is not set; the Cora corpus is not bundled".into()),
        Some(Err(e)) => Outcome::Fail(format!("could not load Cora: {e}")),
        Some(Ok(c)) => f(c),
    };

    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("cora classification", Box::new(|| cora_outcome(criterion_cora_classification))),
        ("cora link prediction", Box::new(|| cora_outcome(criterion_cora_links))),
        ("cora lambda sweep", Box::new(|| cora_outcome(criterion_cora_sweep))),
        ("dense oracle equivalence", Box::new(criterion_oracles)),
        ("invariants", Box::new(criterion_invariants)),
        ("sgns gradient check", Box::new(criterion_gradient)),
        ("synthetic keyword recovery", Box::new(criterion_keywords)),
        ("cli determinism", Box::new(criterion_determinism)),
    ];

    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Outcome::Pass(m) => ("PASS", m),
            Outcome::Fail(m) => {
                failures += 1;
                ("FAIL", m)
            }
            Outcome::Skip(m) => ("SKIP", m),
        };
        println!("{tag} {}. {name}: {detail}", k + 1);
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
