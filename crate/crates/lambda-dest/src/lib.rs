//! A typechecker and small-step interpreter for a linear λ-calculus with
//! first-class destinations.
//!
//! Structures are built by writing into holes through destinations; a mode
//! system pairing multiplicities with scope ages keeps the writes
//! write-once and scope-safe. The crate provides:
//!
//! - the mode semiring ([`mode`]) and typing contexts ([`context`]);
//! - syntax, parser, and pretty-printer ([`syntax`], [`surface`],
//!   [`parser`], [`pretty`]);
//! - the four typing judgments, with a declarative proof-search oracle for
//!   cross-validation ([`typecheck`]);
//! - the deterministic small-step machine ([`eval`]);
//! - program decoding and the example corpus ([`decode`], [`corpus`]);
//! - an executable metatheory harness checking preservation, progress, and
//!   the hole-name discipline along every trace ([`meta`]).
//!
//! See the `examples/` directory for one runnable example per capability,
//! and the `lambda-dest` binary for the `check`/`run`/`trace`/`corpus`/
//! `meta` commands over `.ld` files.

pub mod context;
pub mod corpus;
pub mod decode;
pub mod eval;
pub mod meta;
pub mod mode;
pub mod parser;
pub mod pipeline;
pub mod pretty;
pub mod surface;
pub mod syntax;
pub mod typecheck;

pub use context::{Binding, BindingKey, Ctx, CtxClass};
pub use eval::{step, Command, EvaluationContext, FocusComponent, StepOutcome};
pub use mode::{Age, Mode, Mult};
pub use pipeline::{check_program, CheckedProgram, PipelineError};
pub use surface::{Diagnostic, Program};
pub use syntax::{HoleName, Term, TypeExpr, Value};
pub use typecheck::TypeError;
