//! Text formats: AVM syntax, grammar/lexicon/tag-likelihood files, and
//! report rendering.

use std::fmt;

use thiserror::Error;

pub mod files;
pub mod report;
pub mod syntax;

pub use files::{parse_grammar, parse_lexicon, parse_tagprobs, TagProb, TagProbFile};
pub use syntax::{parse_fs, parse_fs_list, render_fs, render_fs_list};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{location}: {message}")]
pub struct SyntaxError {
    pub location: Location,
    pub message: String,
}
