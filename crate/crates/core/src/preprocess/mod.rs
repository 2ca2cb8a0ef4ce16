//! Official-license filtering, sentence splitting and tokenization.

mod official;
mod sentences;
pub mod text;
mod tokens;

pub use official::{match_official, MatchResult, CONTAINS_THRESHOLD};
pub use sentences::{split_sentences, split_sentences_reporting, Sentence, MAX_SENTENCE_TOKENS};
pub use text::{collapse_whitespace, normalize_text};
pub use tokens::{normalize_tokens, stem, Token};
