use std::io;

use thiserror::Error;

use crate::bridge::BridgeError;
use crate::metaeval::MetaEvalError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("matcher error: {0}")]
    Matcher(String),
    #[error("matcher {matcher} returned NaN")]
    NonFiniteScore { matcher: String },
    #[error("invalid match matrix: {0}")]
    Matrix(String),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
    #[error(transparent)]
    MetaEval(#[from] MetaEvalError),
    #[error("{path}:{line}: {message}")]
    Corpus {
        path: String,
        line: usize,
        message: String,
    },
    #[error("record {line} (system `{system_id}`, example `{example_id}`): {source}")]
    Record {
        line: usize,
        system_id: String,
        example_id: String,
        #[source]
        source: Box<Error>,
    },
    #[error("scores do not cover the corpus: {missing} instance(s) have no score record, e.g. system `{system_id}`, example `{example_id}`")]
    Coverage {
        missing: usize,
        system_id: String,
        example_id: String,
    },
    #[error("{context}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
