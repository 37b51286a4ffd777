//! Tokenization and a miniature transformer encoder producing CLS sentence
//! vectors.

mod checkpoint;
mod model;
mod vocab;

use thiserror::Error;

pub use checkpoint::{Checkpoint, NamedTensor, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use model::{
    dual_encode, Dense, EncoderConfig, EncoderLayer, EncoderModel, ForwardTrace, LayerNorm,
    LayerTrace, SentenceVector,
};
pub use vocab::{
    build_vocab, tokenize, tokenize_encode, TokenSequence, Vocabulary, CLS_ID, CLS_TOKEN, PAD_ID,
    PAD_TOKEN, RESERVED_TOKENS, SEP_ID, SEP_TOKEN, UNK_ID, UNK_TOKEN, USER_ID, USER_TOKEN,
};

#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("invalid encoder config: {0}")]
    InvalidConfig(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("token id {id} outside vocabulary of size {vocab_size}")]
    IdOutOfRange { id: usize, vocab_size: usize },
    #[error("sequence length {found} does not match max_len {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("encoders disagree on vocabulary or max_len")]
    ConfigMismatch,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
