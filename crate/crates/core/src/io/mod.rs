//! File formats: corpora (versionings), constraint sets and report rendering.
//!
//! Both file formats are JSON documents with a `format` tag. Writers emit a
//! canonical form: object keys and id lists sorted, two-space indentation and
//! a trailing newline, so `write(parse(bytes)) == bytes` for canonical input.
//! The grammar is documented in `docs/formats.md`.

mod constraints;
mod corpus;
pub mod report;

use thiserror::Error;

use crate::error::{GraphError, VersioningError};

pub use constraints::{parse_constraints, write_constraints, CONSTRAINTS_FORMAT};
pub use corpus::{export_mvm, parse_corpus, write_corpus, CORPUS_FORMAT, MVM_EXPORT_FORMAT};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported format tag `{found}`, expected `{expected}`")]
    FormatTag {
        found: String,
        expected: &'static str,
    },
    #[error("invalid element: {0}")]
    Graph(#[from] GraphError),
    #[error("validation failed: {0}")]
    Validation(#[from] VersioningError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub(crate) fn to_canonical_json<T: serde::Serialize + ?Sized>(doc: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("documents serialize");
    out.push(b'\n');
    out
}
