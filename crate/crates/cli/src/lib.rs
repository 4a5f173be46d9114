//! Definition-file language, task runner and reports for the `njk` tool.

pub mod doc;
pub mod dsl;
pub mod run;
pub mod write;

pub use doc::{Decl, Document, Task, TaskExpect, TaskKind, Value};
pub use dsl::{parse_document, DslError, ErrorKind};
pub use run::{catalog_document, run_document, RunReport, SCHEMA};
pub use write::{entry_document, entry_dsl, to_dsl, WriteError};
