//! In-memory nano version control.
//!
//! A [`Repo`] stores content-addressed snapshots ([`Commit`]) of immutable
//! [`ContentArea`] values, named [`Branch`] heads, diffs between snapshots and
//! whole-file three-way merges with exact conflict detection. It is the
//! simulated environment agents act on and the persistence substrate for
//! rollback.

mod area;
mod digest;
mod path;
mod repo;

pub use area::{
    merge_areas, ApplyError, ChangeSet, Conflict, ContentArea, MergeOutcome,
};
pub use digest::{Digest, InvalidDigest};
pub use path::{InvalidPath, RepoPath};
pub use repo::{Branch, Commit, DecodeError, Repo, RepoError};
