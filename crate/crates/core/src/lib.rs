//! Offline conformance checking of 5G SBI traffic.
//!
//! The pipeline stages mirror how the data flows: a spec corpus is compiled
//! into an immutable lookup index, capture files are decoded down to HTTP/2
//! messages, messages are paired into exchanges and bound to operations, and
//! JSON bodies are validated against the compiled schemas. Reports are
//! deterministic: equal inputs produce byte-identical output.

pub mod capture;
pub mod correlate;
pub mod json;
pub mod openapi;
pub mod pipeline;
pub mod report;
pub mod validate;

pub use openapi::{load_spec_dir, SpecError, SpecIndex};
pub use pipeline::{lint_capture, lint_capture_bytes, PipelineOptions, PipelineResult};
pub use report::{render_json, render_text, Report};
pub use validate::{Finding, RuleId, Severity};
