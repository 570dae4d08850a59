use std::collections::BTreeMap;

use thiserror::Error;

use super::{merge_areas, ChangeSet, ContentArea, Digest, MergeOutcome, RepoPath};

/// Content-addressed snapshot: an area, ordered parent links and a message.
///
/// The id is SHA-256 over the canonical serialization, so identical
/// `(area, parents, message)` triples always share one id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commit {
    id: Digest,
    parents: Vec<Digest>,
    area: ContentArea,
    message: String,
}

impl Commit {
    fn new(area: ContentArea, parents: Vec<Digest>, message: String) -> Self {
        let id = Self::compute_id(&area, &parents, &message);
        Commit {
            id,
            parents,
            area,
            message,
        }
    }

    pub fn id(&self) -> Digest {
        self.id
    }

    pub fn parents(&self) -> &[Digest] {
        &self.parents
    }

    pub fn area(&self) -> &ContentArea {
        &self.area
    }

    pub fn message(&self) -> &str {
        &self.message
    }

    /// Canonical serialization: the area's canonical bytes, then the parent
    /// count and each 32-byte parent id in order, then the length-prefixed
    /// message. Counts and lengths are big-endian u64. This is both the
    /// hashing preimage and the on-disk object format.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = self.area.canonical_bytes();
        out.extend_from_slice(&(self.parents.len() as u64).to_be_bytes());
        for parent in &self.parents {
            out.extend_from_slice(parent.as_bytes());
        }
        let msg = self.message.as_bytes();
        out.extend_from_slice(&(msg.len() as u64).to_be_bytes());
        out.extend_from_slice(msg);
        out
    }

    fn compute_id(area: &ContentArea, parents: &[Digest], message: &str) -> Digest {
        let probe = Commit {
            id: Digest::of(b""),
            parents: parents.to_vec(),
            area: area.clone(),
            message: message.to_string(),
        };
        Digest::of(&probe.canonical_bytes())
    }

    /// Parse a canonical serialization back into a commit.
    pub fn from_canonical_bytes(bytes: &[u8]) -> Result<Commit, DecodeError> {
        let mut cursor = Cursor { bytes, at: 0 };
        let entry_count = cursor.u64()?;
        let mut area = ContentArea::new();
        for _ in 0..entry_count {
            let path = cursor.len_prefixed()?;
            let path = std::str::from_utf8(path).map_err(|_| DecodeError::Malformed {
                reason: "path is not UTF-8",
            })?;
            let path = RepoPath::new(path).map_err(|_| DecodeError::Malformed {
                reason: "path is not normalized",
            })?;
            let content = cursor.len_prefixed()?.to_vec();
            area.insert(path, content);
        }
        let parent_count = cursor.u64()?;
        let mut parents = Vec::new();
        for _ in 0..parent_count {
            let raw = cursor.take(32)?;
            parents.push(Digest::from_bytes(raw.try_into().expect("32 bytes")));
        }
        let message = cursor.len_prefixed()?;
        let message = std::str::from_utf8(message)
            .map_err(|_| DecodeError::Malformed {
                reason: "message is not UTF-8",
            })?
            .to_string();
        if cursor.at != bytes.len() {
            return Err(DecodeError::Malformed {
                reason: "trailing bytes after commit",
            });
        }
        Ok(Commit::new(area, parents, message))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.bytes.len() - self.at < n {
            return Err(DecodeError::Truncated);
        }
        let out = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64, DecodeError> {
        let raw = self.take(8)?;
        Ok(u64::from_be_bytes(raw.try_into().expect("8 bytes")))
    }

    fn len_prefixed(&mut self) -> Result<&'a [u8], DecodeError> {
        let len = self.u64()?;
        let len = usize::try_from(len).map_err(|_| DecodeError::Truncated)?;
        self.take(len)
    }
}

/// A serialized commit could not be decoded.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("truncated commit object")]
    Truncated,
    #[error("malformed commit object: {reason}")]
    Malformed { reason: &'static str },
}

/// Named movable pointer to a commit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub name: String,
    pub head: Digest,
}

/// Errors from repository operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepoError {
    #[error("unknown parent commit {0}")]
    UnknownParent(Digest),
    #[error("unknown commit {0}")]
    UnknownCommit(Digest),
    #[error("branch `{0}` already exists")]
    DuplicateBranch(String),
    #[error("unknown branch `{0}`")]
    UnknownBranch(String),
    #[error("invalid branch name `{0}`")]
    InvalidBranchName(String),
}

/// In-memory nano version control repository: a content-addressed object
/// store plus a branch table.
///
/// Commits and areas are immutable values; the index itself follows
/// single-writer semantics through `&mut self`.
#[derive(Clone, Debug, Default)]
pub struct Repo {
    objects: BTreeMap<Digest, Commit>,
    branches: BTreeMap<String, Digest>,
}

impl Repo {
    pub fn new() -> Self {
        Self::default()
    }

    /// Store a snapshot. Committing identical inputs twice returns the same
    /// digest and stores a single object.
    pub fn commit(
        &mut self,
        area: ContentArea,
        parents: &[Digest],
        message: &str,
    ) -> Result<Digest, RepoError> {
        for parent in parents {
            if !self.objects.contains_key(parent) {
                return Err(RepoError::UnknownParent(*parent));
            }
        }
        let commit = Commit::new(area, parents.to_vec(), message.to_string());
        let id = commit.id();
        self.objects.entry(id).or_insert(commit);
        Ok(id)
    }

    /// The exact snapshot stored at `id`, as an independent copy.
    pub fn checkout(&self, id: Digest) -> Result<ContentArea, RepoError> {
        Ok(self.get_commit(id)?.area().clone())
    }

    pub fn get_commit(&self, id: Digest) -> Result<&Commit, RepoError> {
        self.objects.get(&id).ok_or(RepoError::UnknownCommit(id))
    }

    pub fn contains(&self, id: Digest) -> bool {
        self.objects.contains_key(&id)
    }

    /// Insert an already-built commit object (used by store import). Parents
    /// must already be present; the id is recomputed by construction.
    pub fn insert_commit(&mut self, commit: Commit) -> Result<Digest, RepoError> {
        for parent in commit.parents() {
            if !self.objects.contains_key(parent) {
                return Err(RepoError::UnknownParent(*parent));
            }
        }
        let id = commit.id();
        self.objects.entry(id).or_insert(commit);
        Ok(id)
    }

    /// All commits in digest order.
    pub fn commits(&self) -> impl Iterator<Item = &Commit> {
        self.objects.values()
    }

    pub fn diff(&self, from: Digest, to: Digest) -> Result<ChangeSet, RepoError> {
        let from = self.get_commit(from)?;
        let to = self.get_commit(to)?;
        Ok(from.area().diff(to.area()))
    }

    pub fn merge3(
        &self,
        base: Digest,
        ours: Digest,
        theirs: Digest,
    ) -> Result<MergeOutcome, RepoError> {
        let base = self.get_commit(base)?;
        let ours = self.get_commit(ours)?;
        let theirs = self.get_commit(theirs)?;
        Ok(merge_areas(base.area(), ours.area(), theirs.area()))
    }

    pub fn create_branch(&mut self, name: &str, at: Digest) -> Result<Branch, RepoError> {
        if name.is_empty() {
            return Err(RepoError::InvalidBranchName(name.to_string()));
        }
        if self.branches.contains_key(name) {
            return Err(RepoError::DuplicateBranch(name.to_string()));
        }
        if !self.contains(at) {
            return Err(RepoError::UnknownCommit(at));
        }
        self.branches.insert(name.to_string(), at);
        Ok(Branch {
            name: name.to_string(),
            head: at,
        })
    }

    pub fn move_branch(&mut self, name: &str, to: Digest) -> Result<(), RepoError> {
        if !self.contains(to) {
            return Err(RepoError::UnknownCommit(to));
        }
        match self.branches.get_mut(name) {
            Some(head) => {
                *head = to;
                Ok(())
            }
            None => Err(RepoError::UnknownBranch(name.to_string())),
        }
    }

    /// Create the branch or move it if it already exists.
    pub fn upsert_branch(&mut self, name: &str, at: Digest) -> Result<(), RepoError> {
        if self.branches.contains_key(name) {
            self.move_branch(name, at)
        } else {
            self.create_branch(name, at).map(|_| ())
        }
    }

    pub fn delete_branch(&mut self, name: &str) -> Result<(), RepoError> {
        self.branches
            .remove(name)
            .map(|_| ())
            .ok_or_else(|| RepoError::UnknownBranch(name.to_string()))
    }

    pub fn branch_head(&self, name: &str) -> Result<Digest, RepoError> {
        self.branches
            .get(name)
            .copied()
            .ok_or_else(|| RepoError::UnknownBranch(name.to_string()))
    }

    pub fn has_branch(&self, name: &str) -> bool {
        self.branches.contains_key(name)
    }

    /// All branches in name order.
    pub fn list_branches(&self) -> Vec<Branch> {
        self.branches
            .iter()
            .map(|(name, head)| Branch {
                name: name.clone(),
                head: *head,
            })
            .collect()
    }
}
