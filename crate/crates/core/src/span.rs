use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sym::Sym;

/// A half-open region of source text, 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: Option<Sym>,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl SourceSpan {
    pub fn new(file: Option<Sym>, line: u32, col: u32, len: u32) -> SourceSpan {
        SourceSpan { file, line, col, len }
    }

    /// Placeholder span for diagnostics that have no precise location.
    pub fn whole_file(file: Option<Sym>) -> SourceSpan {
        SourceSpan {
            file,
            line: 1,
            col: 1,
            len: 0,
        }
    }
}

impl Default for SourceSpan {
    fn default() -> Self {
        SourceSpan::whole_file(None)
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(name) => write!(f, "{}:{}:{}", name, self.line, self.col),
            None => write!(f, "<input>:{}:{}", self.line, self.col),
        }
    }
}
