//! Two-layer template engine plus fusion of hand-authored partials.
//!
//! Layer 1 is simple substitution and list iteration: `{{path}}` placeholders
//! and `{{#path}}...{{/path}}` section blocks. Layer 2 is the expression form
//! `#{expr}` with path navigation, indexing and a closed set of functions.
//! Fusion splices partial implementations into named regions of generated
//! output and keeps them intact across regeneration.

mod caseconv;
mod data;
mod expr;
mod fusion;
mod template;

pub use caseconv::{to_camel, to_pascal, to_snake};
pub use data::{DataError, DataValue};
pub use expr::{Expr, ExprError, PathError};
pub use fusion::{
    extract_partials, fuse, region_names, FuseReport, FusionError, PartialKey, PartialSet,
};
pub use template::{RenderContext, RenderError, Template, TemplateError};
