//! Term identification: BIO sequence labeling of license sentences with a
//! linear-chain CRF.

mod corpus;
mod features;
mod labels;
mod metrics;
mod model;
mod train;

use std::path::PathBuf;

pub use corpus::{load_tsv, parse_bracketed, read_bracketed, read_tsv, read_unlabeled, split, write_tsv, TrainingCorpus};
pub use features::{featurize, featurize_sentence, shape, TEMPLATE_VERSION};
pub use labels::{
    decode_entities, decode_entities_reporting, encode_labels, is_valid_sequence, BioLabel, LabeledSentence,
    TermEntity, LABEL_COUNT,
};
pub use metrics::{evaluate, score, Metrics};
pub use model::SequenceModel;
pub use train::{train, train_reporting, TrainConfig, TrainReport};

#[derive(Debug, thiserror::Error)]
pub enum TermError {
    #[error("position {position} is out of range for a sentence of {len} tokens")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("{labels} labels for {tokens} tokens")]
    LengthMismatch { tokens: usize, labels: usize },
    #[error("label at position {position} is an I that does not continue its term")]
    InvalidTransition { position: usize },
    #[error("entity span {start}..{end} is outside a sentence of {len} tokens")]
    SpanOutOfRange { start: usize, end: usize, len: usize },
    #[error("entities overlap")]
    OverlappingEntities,
    #[error("invalid label {0:?}")]
    BadLabel(String),
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("training corpus has no labeled sentences")]
    EmptyLabeledCorpus,
    #[error("test set is empty")]
    EmptyTestset,
    #[error("loss became non-finite ({loss}) at iteration {iteration}")]
    NonFiniteLoss { iteration: u64, loss: f64 },
    #[error("optimizer failed: {0}")]
    Optimizer(String),
    #[error("invalid model: {0}")]
    BadModel(String),
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
}
