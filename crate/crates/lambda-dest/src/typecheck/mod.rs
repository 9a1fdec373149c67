//! The four judgments: terms, values, evaluation contexts, and commands,
//! plus a declarative proof-search oracle for cross-validation.
//!
//! The algorithmic checker synthesizes usage demands bottom-up and solves a
//! small per-binding obligation at every binder (and at the root): do leaf
//! coercions exist making the scaled occurrence sum equal the declared
//! mode, or is an unused binding weakenable.

pub mod command;
pub mod declarative;
pub mod demand;
pub mod term;
pub mod unify;
pub mod value;

use std::fmt;

pub use command::{check_command, check_ectx};
pub use declarative::{check_term_declarative, DeclarativeOutcome};
pub use term::check_term;
pub use value::check_value;

/// A rejected judgment: the first violated rule premise along the checked
/// path. `path` is a child-index path into the desugared AST.
#[derive(Clone, Debug)]
pub struct TypeError {
    pub rule: &'static str,
    pub path: Vec<u32>,
    pub message: String,
}

impl TypeError {
    pub fn new(rule: &'static str, path: &[u32], message: impl Into<String>) -> TypeError {
        TypeError { rule, path: path.to_vec(), message: message.into() }
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            ".".to_string()
        } else {
            self.path
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join("/")
        };
        write!(f, "{} at {}: {}", self.rule, path, self.message)
    }
}

// Rule names pinned for golden tests.
pub const R_UNKNOWN_VAR: &str = "UNKNOWN-VAR";
pub const R_UNUSED_BINDER: &str = "UNUSED-BINDER";
pub const R_MODE_MISMATCH: &str = "MODE-MISMATCH";
pub const R_SCOPE_ESCAPE: &str = "SCOPE-ESCAPE";
pub const R_TYPE_MISMATCH: &str = "TYPE-MISMATCH";
pub const R_HOLE_IN_TERM: &str = "HOLE-IN-TERM";
pub const R_HOLE_MODE: &str = "HOLE-MODE";
pub const R_NEW_UNDETERMINED: &str = "NEW-UNDETERMINED";
pub const R_CANNOT_SYNTH: &str = "CANNOT-SYNTH";
pub const R_AMPAR_NAMES: &str = "AMPAR-NAMES";
pub const R_FREE_VAR_IN_VALUE: &str = "FREE-VAR-IN-VALUE";
pub const R_DISJOINTNESS: &str = "DISJOINTNESS";
pub const R_DEST_UNOWNED: &str = "DEST-UNOWNED";
