use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rle_core::baselines::{self, DeepWalkConfig, LsaConfig, SvdConfig};
use rle_core::corpus::{self, Corpus, PruningConfig, Vocabulary};
use rle_core::eval::{self, ClassificationConfig, ClassifierConfig, EvalReport, LinkPredictionSpec, Loss, SplitSpec};
use rle_core::graph::EdgeList;
use rle_core::keywords;
use rle_core::rle::{self, RleConfig};
use rle_core::wordvec::{self, EmbeddingMatrix, SgnsConfig};
use rle_core::{Error, Result};

use crate::args::{Command, LossArg, Method, Options};

/// Everything loaded from disk, plus the word vectors when the method needs them.
struct Inputs {
    corpus: Corpus,
    vocab: Vocabulary,
    edges: Option<EdgeList>,
    words: Option<EmbeddingMatrix>,
    notes: Vec<(String, String)>,
}

impl Inputs {
    fn edges(&self) -> Result<&EdgeList> {
        self.edges
            .as_ref()
            .ok_or_else(|| Error::config("this command needs --edges"))
    }

    fn words(&self) -> &EmbeddingMatrix {
        self.words.as_ref().expect("word vectors loaded for this method")
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn sgns_config(o: &Options) -> SgnsConfig {
    SgnsConfig {
        dim: o.dim,
        window: o.window,
        negatives: o.negatives,
        epochs: o.epochs,
        seed: o.seed,
        workers: o.workers,
        ..SgnsConfig::default()
    }
}

fn rle_config(o: &Options) -> RleConfig {
    RleConfig {
        lambda: o.lambda,
        symmetrize: !o.directed,
        ..RleConfig::default()
    }
}

fn deepwalk_config(o: &Options, dim: usize) -> DeepWalkConfig {
    let base = DeepWalkConfig::default();
    DeepWalkConfig {
        walks_per_node: o.walks_per_node,
        walk_length: o.walk_length,
        sgns: SgnsConfig {
            dim,
            window: o.walk_window,
            negatives: o.negatives,
            seed: o.seed,
            workers: o.workers,
            ..base.sgns
        },
    }
}

fn lsa_config(o: &Options) -> LsaConfig {
    LsaConfig {
        svd: SvdConfig {
            seed: o.seed,
            ..SvdConfig::default()
        },
        ..LsaConfig::default()
    }
}

fn classification_config(o: &Options) -> ClassificationConfig {
    ClassificationConfig {
        classifier: ClassifierConfig {
            loss: match o.loss {
                LossArg::SquaredHinge => Loss::SquaredHinge,
                LossArg::Logistic => Loss::Logistic,
            },
            ..ClassifierConfig::default()
        },
        ..ClassificationConfig::default()
    }
}

fn load(cmd: &Command, o: &Options, out: &Path) -> Result<Inputs> {
    let mut notes = Vec::new();
    let mut corpus = Corpus::read(&o.docs)?;
    if let Some(path) = &o.labels {
        let labels = corpus.read_labels(path)?;
        corpus = corpus.with_labels(labels)?;
    }
    let stopwords = match &o.stopwords {
        Some(p) => corpus::read_stopwords(p)?,
        None => corpus::default_stopwords(),
    };
    let vocab = corpus::build_vocabulary(
        &corpus,
        &stopwords,
        PruningConfig {
            min_count: o.min_count,
            max_df_ratio: o.max_df,
        },
    )?;
    notes.push(("document_count".into(), corpus.n_docs().to_string()));
    notes.push(("vocabulary_size".into(), vocab.len().to_string()));

    let needs_edges = o.method.needs_edges() || matches!(cmd, Command::EvalLinkpred(_) | Command::Sweep(_));
    let edges = match &o.edges {
        Some(p) => Some(EdgeList::read(p, &corpus)?),
        None if needs_edges => {
            return Err(Error::config(format!(
                "{} with method {} needs --edges",
                cmd.name(),
                o.method.as_str()
            )))
        }
        None => None,
    };
    if let Some(e) = &edges {
        notes.push(("edge_count".into(), e.len().to_string()));
    }

    let needs_words = o.method.needs_word_vectors() || matches!(cmd, Command::Sweep(_) | Command::Keywords(_));
    let words = if !needs_words {
        None
    } else if let Some(p) = &o.vectors {
        let (u, coverage) = wordvec::load_word_vectors(p, &vocab)?;
        notes.push(("vector_coverage".into(), format!("{coverage:.6}")));
        Some(u)
    } else {
        let u = wordvec::train_word_vectors(&corpus, &vocab, &sgns_config(o))?;
        wordvec::save_vectors(&u, &out.join("word_vectors.txt"))?;
        Some(u)
    };
    Ok(Inputs {
        corpus,
        vocab,
        edges,
        words,
        notes,
    })
}

fn half_dims(dim: usize) -> Result<(usize, usize)> {
    if dim < 2 {
        return Err(Error::config("concat needs --dim of at least 2"));
    }
    Ok((dim / 2, dim - dim / 2))
}

/// Document embedding for `method`, with `edges` as the visible graph.
fn embed_with(o: &Options, inputs: &Inputs, edges: Option<&EdgeList>) -> Result<EmbeddingMatrix> {
    let corpus = &inputs.corpus;
    let ids = corpus.doc_ids();
    let need = || edges.ok_or_else(|| Error::config("this method needs --edges"));
    match o.method {
        Method::Rle => rle::embed(corpus, need()?, inputs.words(), &rle_config(o)),
        Method::WordAverage => rle::word_average(corpus, inputs.words()),
        Method::Deepwalk => baselines::deepwalk(need()?, &deepwalk_config(o, o.dim), ids),
        Method::Lsa => {
            let counts = corpus::build_count_matrix(corpus, &inputs.vocab);
            baselines::lsa(&counts, o.dim, &lsa_config(o), ids)
        }
        Method::Concat => {
            let (dw_dim, lsa_dim) = half_dims(o.dim)?;
            let dw = baselines::deepwalk(need()?, &deepwalk_config(o, dw_dim), ids)?;
            let counts = corpus::build_count_matrix(corpus, &inputs.vocab);
            baselines::concatenate(&dw, &baselines::lsa(&counts, lsa_dim, &lsa_config(o), ids)?)
        }
    }
}

fn labels_of(corpus: &Corpus) -> Result<&corpus::Labels> {
    corpus
        .labels()
        .ok_or_else(|| Error::config("this command needs --labels"))
}

fn print_reports(reports: &[EvalReport]) {
    for r in reports {
        println!(
            "{} {} ratio={} mean={:.4} stddev={:.4}",
            r.task.as_str(),
            r.method,
            r.ratio,
            r.mean,
            r.stddev
        );
    }
}

fn write_reports(out: &Path, reports: &[EvalReport]) -> Result<()> {
    write_file(&out.join("report.txt"), &eval::reports_to_text(reports))?;
    write_file(&out.join("report.csv"), &eval::reports_to_csv(reports))?;
    print_reports(reports);
    Ok(())
}

fn classify(o: &Options, inputs: &Inputs, out: &Path) -> Result<()> {
    let labels = labels_of(&inputs.corpus)?;
    let d = embed_with(o, inputs, inputs.edges.as_ref())?;
    let cfg = classification_config(o);
    let reports = o
        .ratios
        .iter()
        .map(|&ratio| {
            let spec = SplitSpec {
                train_ratio: ratio,
                n_repeats: o.repeats,
                seed: o.seed,
            };
            eval::classification_experiment(&d, labels, &spec, &cfg, o.method.as_str())
        })
        .collect::<Result<Vec<_>>>()?;
    write_reports(out, &reports)
}

fn linkpred(o: &Options, inputs: &Inputs, out: &Path) -> Result<()> {
    let edges = inputs.edges()?;
    // methods that ignore the graph are embedded once
    let fixed = if o.method.needs_edges() {
        None
    } else {
        Some(embed_with(o, inputs, None)?)
    };
    let reports = o
        .hide_ratios
        .iter()
        .map(|&ratio| {
            let spec = LinkPredictionSpec {
                hide_ratio: ratio,
                n_repeats: o.repeats,
                seed: o.seed,
            };
            eval::link_prediction_experiment(edges, &spec, o.method.as_str(), |visible| match &fixed {
                Some(d) => Ok(d.clone()),
                None => embed_with(o, inputs, Some(visible)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_reports(out, &reports)
}

fn sweep(o: &Options, inputs: &Inputs, out: &Path) -> Result<()> {
    if o.method != Method::Rle {
        return Err(Error::config("sweep varies the smoothing intensity and only supports --method rle"));
    }
    let spec = SplitSpec {
        train_ratio: o.sweep_ratio,
        n_repeats: o.repeats,
        seed: o.seed,
    };
    let points = eval::lambda_sweep(
        &inputs.corpus,
        inputs.edges()?,
        inputs.words(),
        &o.lambda_grid(),
        &spec,
        &classification_config(o),
        &rle_config(o),
    )?;
    let csv = eval::sweep_to_csv(&points);
    write_file(&out.join("sweep.csv"), &csv)?;
    print!("{csv}");
    Ok(())
}

fn describe(o: &Options, inputs: &Inputs, out: &Path) -> Result<()> {
    if !o.method.needs_word_vectors() {
        return Err(Error::config(format!(
            "keywords needs document vectors in word space; {} does not provide them",
            o.method.as_str()
        )));
    }
    let labels = labels_of(&inputs.corpus)?;
    let d = embed_with(o, inputs, inputs.edges.as_ref())?;
    let counts = corpus::build_count_matrix(&inputs.corpus, &inputs.vocab);
    let descs = keywords::describe_classes(&d, inputs.words(), &counts, &inputs.vocab, labels, o.top_k)?;
    let text = keywords::descriptions_to_text(&descs, o.method.as_str());
    write_file(&out.join("keywords.txt"), &text)?;
    write_file(&out.join("keywords.csv"), &keywords::descriptions_to_csv(&descs))?;
    print!("{text}");
    Ok(())
}

fn opt_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or_else(|| "-".into(), |p| p.display().to_string())
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

fn manifest(cmd: &Command, o: &Options, notes: &[(String, String)], seconds: f64) -> String {
    let mut m = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(m, "{k}={v}");
    };
    kv("command", cmd.name().into());
    kv("version", env!("CARGO_PKG_VERSION").into());
    kv("docs", o.docs.display().to_string());
    kv("edges", opt_path(&o.edges));
    kv("labels", opt_path(&o.labels));
    kv("stopwords", opt_path(&o.stopwords));
    kv("vectors", opt_path(&o.vectors));
    kv("method", o.method.as_str().into());
    kv("lambda", o.lambda.to_string());
    kv("directed", o.directed.to_string());
    kv("dim", o.dim.to_string());
    kv("window", o.window.to_string());
    kv("negatives", o.negatives.to_string());
    kv("epochs", o.epochs.to_string());
    kv("min_count", o.min_count.to_string());
    kv("max_df", o.max_df.to_string());
    kv("walks_per_node", o.walks_per_node.to_string());
    kv("walk_length", o.walk_length.to_string());
    kv("walk_window", o.walk_window.to_string());
    kv("ratios", join(&o.ratios));
    kv("hide_ratios", join(&o.hide_ratios));
    kv("grid", join(&o.lambda_grid()));
    kv("sweep_ratio", o.sweep_ratio.to_string());
    kv("loss", o.loss.as_str().into());
    kv("repeats", o.repeats.to_string());
    kv("top_k", o.top_k.to_string());
    kv("seed", o.seed.to_string());
    kv("workers", o.workers.to_string());
    for (k, v) in notes {
        kv(k, v.clone());
    }
    kv("wall_time_seconds", format!("{seconds:.3}"));
    m
}

pub fn run(cmd: &Command) -> Result<()> {
    let start = Instant::now();
    let o = cmd.options();
    if o.workers == 0 {
        return Err(Error::config("--workers must be at least 1"));
    }
    fs::create_dir_all(&o.out).map_err(|e| Error::io(&o.out, e))?;
    let inputs = load(cmd, o, &o.out)?;
    match cmd {
        Command::Embed(_) => {
            let d = embed_with(o, &inputs, inputs.edges.as_ref())?;
            wordvec::save_vectors(&d, &o.out.join("embeddings.txt"))?;
            println!("wrote {} document vectors of dimension {}", d.len(), d.dim());
        }
        Command::EvalClassify(_) => classify(o, &inputs, &o.out)?,
        Command::EvalLinkpred(_) => linkpred(o, &inputs, &o.out)?,
        Command::Sweep(_) => sweep(o, &inputs, &o.out)?,
        Command::Keywords(_) => describe(o, &inputs, &o.out)?,
    }
    let text = manifest(cmd, o, &inputs.notes, start.elapsed().as_secs_f64());
    write_file(&o.out.join("manifest.txt"), &text)
}
