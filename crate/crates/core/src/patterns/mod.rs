//! Pattern rules and template derivation from working prototypes.
//!
//! A pattern rule is a human-authored, ordered regular-expression rewrite
//! scoped by a path glob. Applying a rule set to a prototype file lifts it
//! into a template; rendering that template with the prototype's seed record
//! must reproduce the prototype byte-exact. That round trip is the automated
//! test attached to the patterns + prototypes ingredients.

mod derive;
mod glob;
mod rules;
mod verify;

pub use derive::{derive_template, DeriveError, TemplateFile};
pub use glob::Glob;
pub use rules::{compile_rules, PatternRule, RuleError};
pub use verify::{
    verify_prototype, FileVerification, PrototypeError, Verdict, VerificationReport,
    WorkingPrototype,
};
