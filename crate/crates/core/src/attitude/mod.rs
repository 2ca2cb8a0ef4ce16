//! Attitude inference: what a license says about each term it mentions.
//!
//! Each sentence is tagged, chunked into a shallow tree, and every term entity
//! gets the powerful tokens around it. Lexicon marks on those tokens decide
//! CAN, CANNOT or MUST; conditional clauses yield condition relationships.

mod conditions;
mod lexicon;
mod parse;
mod pos;
mod pts;
mod summary;

use std::path::PathBuf;

pub use conditions::{detect_conditions, Condition};
pub use lexicon::{AttitudeLexicon, LexiconFile};
pub use parse::{parse_sentence, ParseNode};
pub use pos::{pos_tag, Tag, NEGATORS};
pub use pts::{collect_pts, entity_attitude, infer_attitude, marks, Locality, PowerfulToken};
pub use summary::{
    analyze_sentence, summarize, summarize_all, summarize_text, Evidence, LicenseRef, LicenseSummary,
    SentenceAnalysis, TokenEvidence,
};

#[derive(Debug, thiserror::Error)]
pub enum AttitudeError {
    #[error("{0:?} is listed as both CANNOT and MUST")]
    LexiconOverlap(String),
    #[error("{0:?} is not a word tag")]
    TagAlphabetViolation(String),
    #[error("{tags} tags for {tokens} tokens")]
    TagCount { tokens: usize, tags: usize },
    #[error("entity span {start}..{end} is outside a sentence of {len} tokens")]
    SpanOutOfRange { start: usize, end: usize, len: usize },
    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),
    #[error("invalid lexicon JSON: {0}")]
    Json(#[source] serde_json::Error),
}
