//! Detection and staged repair of errors in fragmentary Node.js code.
//!
//! The engine checks snippets with an in-house recovering parser and
//! scope analyzer, then reduces errors through three stages: targeted fixes
//! for undeclared names (require insertion and placeholder declarations), a
//! registry of per-code fixes applied as an overlap-filtered batch, and
//! error-guided line deletion. A corpus harness batches snippets and
//! aggregates error statistics.

pub mod ambient;
pub mod analyzer;
pub mod ast;
pub mod budget;
pub mod codes;
pub mod corpus;
pub mod deletion;
pub mod fixes;
pub mod fixtures;
pub mod lexer;
pub mod parser;
pub mod pipeline;
pub mod scopes;
pub mod source;

pub use ambient::{AmbientEnvironment, TypeHint};
pub use analyzer::{check, Analysis};
pub use budget::Budget;
pub use pipeline::{PipelineConfig, PipelineResult};
pub use source::{Category, Diagnostic, FixAction, Origin, Snippet, Span, TextChange};
