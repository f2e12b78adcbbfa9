//! Crate-wide error type.

use crate::token::Span;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lex error at {}..{}: {message}", span.start, span.end)]
    Lex { span: Span, message: String },

    #[error("parse error at {}..{}: {message}", span.start, span.end)]
    Parse { span: Span, message: String },

    #[error("focal method `{0}` not found")]
    FocalNotFound(String),

    #[error("more than one method named `{0}`")]
    AmbiguousFocal(String),

    #[error("name shadowing: {0}")]
    NameShadow(String),

    #[error("rename would capture existing identifier: {0}")]
    Capture(String),

    #[error("unsupported construct: {0}")]
    Unsupported(String),

    #[error("empty corpus under {0}")]
    EmptyCorpus(std::path::PathBuf),

    #[error("no fixture translation for input: {0}")]
    FixtureMiss(String),

    #[error("translator failure: {0}")]
    Translator(String),

    #[error("checker failure: {0}")]
    Checker(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
