//! Document embeddings for linked corpora: word-vector averages regularized
//! by the citation network, plus the baselines and evaluation protocol used
//! to compare them.

pub mod baselines;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod graph;
pub mod keywords;
pub mod matrix;
pub mod par;
pub mod rle;
pub mod synthetic;
pub mod wordvec;

pub use error::{Error, Result};
