use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use rle_core::Error;

#[derive(Debug, Parser)]
#[command(name = "rle", version, about = "Embed linked documents in a word-vector space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write document embeddings.
    #[command(args_override_self = true)]
    Embed(Options),
    /// Micro-F1 of a linear classifier over repeated train/test splits.
    #[command(args_override_self = true)]
    EvalClassify(Options),
    /// AUC of cosine scores for hidden links against unconnected pairs.
    #[command(args_override_self = true)]
    EvalLinkpred(Options),
    /// Classification micro-F1 across a grid of smoothing intensities.
    #[command(args_override_self = true)]
    Sweep(Options),
    /// Describe each class by the words nearest its centroid, next to tf·idf.
    #[command(args_override_self = true)]
    Keywords(Options),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Embed(_) => "embed",
            Command::EvalClassify(_) => "eval-classify",
            Command::EvalLinkpred(_) => "eval-linkpred",
            Command::Sweep(_) => "sweep",
            Command::Keywords(_) => "keywords",
        }
    }

    pub fn options(&self) -> &Options {
        match self {
            Command::Embed(o)
            | Command::EvalClassify(o)
            | Command::EvalLinkpred(o)
            | Command::Sweep(o)
            | Command::Keywords(o) => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Method {
    Rle,
    WordAverage,
    Deepwalk,
    Lsa,
    Concat,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Rle => "rle",
            Method::WordAverage => "word_average",
            Method::Deepwalk => "deepwalk",
            Method::Lsa => "lsa",
            Method::Concat => "concat",
        }
    }

    pub fn needs_word_vectors(self) -> bool {
        matches!(self, Method::Rle | Method::WordAverage)
    }

    pub fn needs_edges(self) -> bool {
        matches!(self, Method::Rle | Method::Deepwalk | Method::Concat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "kebab-case")]
pub enum LossArg {
    SquaredHinge,
    Logistic,
}

impl LossArg {
    pub fn as_str(self) -> &'static str {
        match self {
            LossArg::SquaredHinge => "squared-hinge",
            LossArg::Logistic => "logistic",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Documents, one `id<TAB>text` per line.
    #[arg(long)]
    pub docs: PathBuf,
    /// Citations, one `src_id<TAB>dst_id` per line.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Classes, one `id<TAB>class` per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Stopword list, one word per line; a built-in English list otherwise.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Pretrained word vectors in word2vec text format; trained on the
    /// documents when absent.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "rle")]
    pub method: Method,
    /// Smoothing intensity in [0, 1].
    #[arg(long, default_value_t = 0.7)]
    pub lambda: f64,
    /// Embedding dimension.
    #[arg(long, default_value_t = 160)]
    pub dim: usize,
    /// Skip-gram window for word vectors.
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    /// Training ratios for eval-classify.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "0.1,0.3,0.5")]
    pub ratios: Vec<f64>,
    /// Hidden-edge ratios for eval-linkpred.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "0.5,0.25")]
    pub hide_ratios: Vec<f64>,
    /// Smoothing intensities for sweep; 0 to 1 in steps of 0.05 by default.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Training ratio used by sweep.
    #[arg(long, default_value_t = 0.5)]
    pub sweep_ratio: f64,
    /// Words per class for keywords.
    #[arg(long, default_value_t = 5)]
    pub top_k: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Threads; 1 keeps every output byte-identical across runs.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Random splits per setting.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Drop words seen fewer times than this.
    #[arg(long, default_value_t = 10)]
    pub min_count: usize,
    /// Drop words present in more than this fraction of documents.
    #[arg(long, default_value_t = 0.25)]
    pub max_df: f64,
    /// Keep citation direction instead of symmetrizing.
    #[arg(long)]
    pub directed: bool,
    #[arg(long, value_enum, default_value = "squared-hinge")]
    pub loss: LossArg,
    /// DeepWalk walks started from each node.
    #[arg(long, default_value_t = 40)]
    pub walks_per_node: usize,
    #[arg(long, default_value_t = 40)]
    pub walk_length: usize,
    /// Skip-gram window over walks.
    #[arg(long, default_value_t = 10)]
    pub walk_window: usize,
    /// `key = value` lines, applied before the command-line flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Options {
    pub fn lambda_grid(&self) -> Vec<f64> {
        self.grid
            .clone()
            .unwrap_or_else(|| (0..=20).map(|i| i as f64 / 20.0).collect())
    }
}

/// Turns a config file into flags. Keys may use `_` or `-`; `true` makes a
/// bare switch and `false` omits it.
pub fn config_flags(path: &Path) -> Result<Vec<OsString>, Error> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut flags = Vec::new();
    for (lineno, raw) in content.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("{}:{}: expected key = value", path.display(), lineno + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if key == "config" {
            return Err(Error::config(format!("{}: config files cannot nest", path.display())));
        }
        match value.trim() {
            "true" => flags.push(format!("--{key}").into()),
            "false" => {}
            v => {
                flags.push(format!("--{key}").into());
                flags.push(v.into());
            }
        }
    }
    Ok(flags)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Splices config-file flags in right after the subcommand so that flags
/// given on the command line take precedence.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, Error> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    if args.len() < 2 {
        return Ok(args);
    }
    let extra = config_flags(&path)?;
    let mut out = args[..2].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[2..]);
    Ok(out)
}
