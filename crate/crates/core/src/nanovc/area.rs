use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Digest, RepoPath};

/// Immutable map from normalized path to byte content; the unit of simulated
/// environment state.
///
/// Value semantics: mutating methods require exclusive ownership, and
/// [`super::Repo::checkout`] hands out independent copies, so a snapshot held
/// elsewhere never observes changes.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ContentArea {
    entries: BTreeMap<RepoPath, Vec<u8>>,
}

impl ContentArea {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, path: &RepoPath) -> bool {
        self.entries.contains_key(path)
    }

    pub fn get(&self, path: &RepoPath) -> Option<&[u8]> {
        self.entries.get(path).map(Vec::as_slice)
    }

    pub fn insert(&mut self, path: RepoPath, content: impl Into<Vec<u8>>) {
        self.entries.insert(path, content.into());
    }

    pub fn remove(&mut self, path: &RepoPath) -> Option<Vec<u8>> {
        self.entries.remove(path)
    }

    /// Builder form of [`insert`](Self::insert), handy in tests and fixtures.
    pub fn with(mut self, path: &str, content: impl Into<Vec<u8>>) -> Self {
        self.insert(RepoPath::new(path).expect("valid path"), content);
        self
    }

    /// Entries in byte-wise path order.
    pub fn iter(&self) -> impl Iterator<Item = (&RepoPath, &[u8])> {
        self.entries.iter().map(|(p, c)| (p, c.as_slice()))
    }

    pub fn paths(&self) -> impl Iterator<Item = &RepoPath> {
        self.entries.keys()
    }

    /// Files lying under directory `dir`, keys kept as-is.
    pub fn subtree(&self, dir: &RepoPath) -> ContentArea {
        let entries = self
            .entries
            .iter()
            .filter(|(p, _)| p.is_under(dir))
            .map(|(p, c)| (p.clone(), c.clone()))
            .collect();
        ContentArea { entries }
    }

    /// Files lying under `dir`, re-keyed relative to it.
    pub fn subtree_relative(&self, dir: &RepoPath) -> ContentArea {
        let entries = self
            .entries
            .iter()
            .filter_map(|(p, c)| p.strip_dir(dir).map(|rel| (rel, c.clone())))
            .collect();
        ContentArea { entries }
    }

    pub fn remove_subtree(&mut self, dir: &RepoPath) {
        self.entries.retain(|p, _| !p.is_under(dir));
    }

    /// Insert or overwrite every entry of `other`.
    pub fn overlay(&mut self, other: &ContentArea) {
        for (p, c) in other.iter() {
            self.entries.insert(p.clone(), c.to_vec());
        }
    }

    /// Canonical digest of the area alone (no history); used for
    /// deduplication and byte-exact comparisons.
    pub fn digest(&self) -> Digest {
        Digest::of(&self.canonical_bytes())
    }

    /// Canonical serialization: entry count, then each entry as
    /// length-prefixed path and length-prefixed content, paths in byte order.
    /// All counts and lengths are big-endian u64.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&(self.entries.len() as u64).to_be_bytes());
        for (path, content) in &self.entries {
            let p = path.as_str().as_bytes();
            out.extend_from_slice(&(p.len() as u64).to_be_bytes());
            out.extend_from_slice(p);
            out.extend_from_slice(&(content.len() as u64).to_be_bytes());
            out.extend_from_slice(content);
        }
        out
    }

    /// Exact difference from `self` to `to`.
    ///
    /// The produced change sets are pairwise disjoint by construction and
    /// satisfy `self.apply(&self.diff(to)) == to`.
    pub fn diff(&self, to: &ContentArea) -> ChangeSet {
        let mut cs = ChangeSet::default();
        for (path, content) in &to.entries {
            match self.entries.get(path) {
                None => {
                    cs.added.insert(path.clone(), content.clone());
                }
                Some(old) if old != content => {
                    cs.modified
                        .insert(path.clone(), (old.clone(), content.clone()));
                }
                Some(_) => {}
            }
        }
        for path in self.entries.keys() {
            if !to.entries.contains_key(path) {
                cs.removed.insert(path.clone());
            }
        }
        cs
    }

    /// Strict patch application: additions must be new, removals must exist,
    /// modifications must find the recorded old content.
    pub fn apply(&self, cs: &ChangeSet) -> Result<ContentArea, ApplyError> {
        let mut out = self.clone();
        for (path, content) in &cs.added {
            if out.entries.contains_key(path) {
                return Err(ApplyError::AddExisting { path: path.clone() });
            }
            out.entries.insert(path.clone(), content.clone());
        }
        for path in &cs.removed {
            if out.entries.remove(path).is_none() {
                return Err(ApplyError::RemoveMissing { path: path.clone() });
            }
        }
        for (path, (old, new)) in &cs.modified {
            match out.entries.get(path) {
                None => return Err(ApplyError::ModifyMissing { path: path.clone() }),
                Some(current) if current != old => {
                    return Err(ApplyError::ModifyMismatch { path: path.clone() })
                }
                Some(_) => {
                    out.entries.insert(path.clone(), new.clone());
                }
            }
        }
        Ok(out)
    }

    /// Last-writer-wins application: the incoming change set overrides
    /// whatever is present, used when replaying conflict permutations.
    pub fn apply_overriding(&self, cs: &ChangeSet) -> ContentArea {
        let mut out = self.clone();
        for (path, content) in &cs.added {
            out.entries.insert(path.clone(), content.clone());
        }
        for path in &cs.removed {
            out.entries.remove(path);
        }
        for (path, (_, new)) in &cs.modified {
            out.entries.insert(path.clone(), new.clone());
        }
        out
    }
}

impl fmt::Debug for ContentArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (p, c) in &self.entries {
            match std::str::from_utf8(c) {
                Ok(s) if s.len() <= 40 => map.entry(&p.as_str(), &s),
                _ => map.entry(&p.as_str(), &format!("<{} bytes>", c.len())),
            };
        }
        map.finish()
    }
}

/// The exact difference between two areas. The three key sets are pairwise
/// disjoint.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct ChangeSet {
    pub added: BTreeMap<RepoPath, Vec<u8>>,
    pub removed: BTreeSet<RepoPath>,
    pub modified: BTreeMap<RepoPath, (Vec<u8>, Vec<u8>)>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.modified.is_empty()
    }

    /// Every path the change set touches, in byte order.
    pub fn paths(&self) -> BTreeSet<&RepoPath> {
        self.added
            .keys()
            .chain(self.removed.iter())
            .chain(self.modified.keys())
            .collect()
    }
}

/// A change set did not apply cleanly.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ApplyError {
    #[error("cannot add `{path}`: already present")]
    AddExisting { path: RepoPath },
    #[error("cannot remove `{path}`: not present")]
    RemoveMissing { path: RepoPath },
    #[error("cannot modify `{path}`: not present")]
    ModifyMissing { path: RepoPath },
    #[error("cannot modify `{path}`: current content differs from recorded old content")]
    ModifyMismatch { path: RepoPath },
}

/// One path where both sides changed the base differently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub path: RepoPath,
    pub base: Option<Vec<u8>>,
    pub ours: Option<Vec<u8>>,
    pub theirs: Option<Vec<u8>>,
}

/// Result of a three-way merge: either a clean merged area or the non-empty
/// set of conflicting paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergeOutcome {
    Merged(ContentArea),
    Conflicts(Vec<Conflict>),
}

impl MergeOutcome {
    pub fn is_clean(&self) -> bool {
        matches!(self, MergeOutcome::Merged(_))
    }

    pub fn conflicts(&self) -> &[Conflict] {
        match self {
            MergeOutcome::Merged(_) => &[],
            MergeOutcome::Conflicts(c) => c,
        }
    }
}

/// Whole-file three-way merge, path by path.
///
/// Unchanged on both sides keeps the base; a change on exactly one side
/// (modify, add or delete) wins; identical changes on both sides collapse;
/// divergent changes (including delete-vs-modify and add-add with different
/// content) conflict. Content is taken whole from the winning side, never
/// merged line by line.
pub fn merge_areas(
    base: &ContentArea,
    ours: &ContentArea,
    theirs: &ContentArea,
) -> MergeOutcome {
    let mut paths: BTreeSet<&RepoPath> = BTreeSet::new();
    paths.extend(base.paths());
    paths.extend(ours.paths());
    paths.extend(theirs.paths());

    let mut merged = ContentArea::new();
    let mut conflicts = Vec::new();
    for path in paths {
        let b = base.get(path);
        let o = ours.get(path);
        let t = theirs.get(path);
        let winner = if o == b {
            t
        } else if t == b || o == t {
            o
        } else {
            conflicts.push(Conflict {
                path: path.clone(),
                base: b.map(<[u8]>::to_vec),
                ours: o.map(<[u8]>::to_vec),
                theirs: t.map(<[u8]>::to_vec),
            });
            continue;
        };
        if let Some(content) = winner {
            merged.insert(path.clone(), content);
        }
    }
    if conflicts.is_empty() {
        MergeOutcome::Merged(merged)
    } else {
        MergeOutcome::Conflicts(conflicts)
    }
}
