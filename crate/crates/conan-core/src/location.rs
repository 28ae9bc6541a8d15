//! Source positions attached to findings and model facts.

use serde::{Deserialize, Serialize};

/// A span in one source file. Lines and columns are 1-based; paths are
/// project-relative with forward slashes on every platform.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceLocation {
    pub path: String,
    pub line: u32,
    pub column: u32,
    pub end_line: u32,
    pub end_column: u32,
}

impl SourceLocation {
    pub fn new(path: &str, line: u32, column: u32, end_line: u32, end_column: u32) -> Self {
        debug_assert!(
            (line, column) <= (end_line, end_column),
            "start must not exceed end"
        );
        Self {
            path: path.to_string(),
            line,
            column,
            end_line,
            end_column,
        }
    }

    /// Point span at the first character of a file.
    pub fn file_start(path: &str) -> Self {
        Self::new(path, 1, 1, 1, 1)
    }

    /// True when `inner` lies fully within `self` (same file).
    pub fn contains(&self, inner: &SourceLocation) -> bool {
        self.path == inner.path
            && (self.line, self.column) <= (inner.line, inner.column)
            && (inner.end_line, inner.end_column) <= (self.end_line, self.end_column)
    }
}

impl std::fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.path, self.line, self.column)
    }
}
