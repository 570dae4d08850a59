//! Regenerative code generation engine.
//!
//! Production code is treated as disposable output that can always be
//! regenerated from three versioned ingredients: data records, pattern rules
//! and working prototypes. Pattern rules lift prototypes into templates, a
//! generated robot merges data through the templates, and concurrent
//! generation agents are arbitrated through an in-memory nano version control
//! repository that branches per agent and per conflict permutation.
//!
//! Module map:
//! - [`nanovc`]: content-addressed snapshots, branches, diff and three-way
//!   merge; the simulated environment every other module operates on.
//! - [`templating`]: the two-layer template engine plus fusion of
//!   hand-authored partial implementations into generated output.
//! - [`patterns`]: rule compilation and template derivation from working
//!   prototypes, with the round-trip verification that keeps them honest.
//! - [`cascade`]: robot construction and the multi-phase generation pipeline.
//! - [`arbitration`]: agent simulation with branch-per-agent conflict
//!   arbitration, what-if branches and verified update proposals.

pub mod arbitration;
pub mod cascade;
pub mod nanovc;
pub mod patterns;
pub mod templating;

pub use nanovc::{ChangeSet, ContentArea, Digest, Repo, RepoPath};
pub use templating::DataValue;
