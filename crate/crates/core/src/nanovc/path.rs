use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Normalized `/`-separated relative path used as a [`super::ContentArea`] key.
///
/// Always non-empty, never absolute, and contains no `.` or `..` segments.
/// Lookup is byte-exact; ordering is byte-wise lexicographic.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RepoPath(String);

/// A path string violated the normalization rules.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid path `{given}`: {reason}")]
pub struct InvalidPath {
    pub given: String,
    pub reason: &'static str,
}

impl RepoPath {
    pub fn new(path: impl Into<String>) -> Result<Self, InvalidPath> {
        let path = path.into();
        let fail = |reason| {
            Err(InvalidPath {
                given: path.clone(),
                reason,
            })
        };
        if path.is_empty() {
            return fail("empty path");
        }
        if path.starts_with('/') {
            return fail("absolute paths are not allowed");
        }
        if path.ends_with('/') {
            return fail("trailing slash");
        }
        if path.contains('\0') {
            return fail("NUL byte in path");
        }
        for segment in path.split('/') {
            match segment {
                "" => return fail("empty segment"),
                "." | ".." => return fail("`.` and `..` segments are not allowed"),
                _ => {}
            }
        }
        Ok(RepoPath(path))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// `dir/self`, keeping normalization.
    pub fn prefixed(&self, dir: &RepoPath) -> RepoPath {
        RepoPath(format!("{}/{}", dir.0, self.0))
    }

    /// True when `self` lies strictly inside directory `dir`.
    pub fn is_under(&self, dir: &RepoPath) -> bool {
        self.0.len() > dir.0.len() + 1
            && self.0.starts_with(&dir.0)
            && self.0.as_bytes()[dir.0.len()] == b'/'
    }

    /// Path relative to `dir`, when `self` lies under it.
    pub fn strip_dir(&self, dir: &RepoPath) -> Option<RepoPath> {
        if self.is_under(dir) {
            Some(RepoPath(self.0[dir.0.len() + 1..].to_string()))
        } else {
            None
        }
    }
}

impl fmt::Display for RepoPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for RepoPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepoPath({})", self.0)
    }
}

impl FromStr for RepoPath {
    type Err = InvalidPath;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RepoPath::new(s)
    }
}

impl AsRef<str> for RepoPath {
    fn as_ref(&self) -> &str {
        &self.0
    }
}
