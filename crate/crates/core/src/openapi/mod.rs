//! OpenAPI corpus compilation: documents, schemas, path matchers and the
//! operation lookup index.

pub mod compile;
pub mod index;
pub mod path;
pub mod schema;

use thiserror::Error;

pub use compile::{Compiler, SpecCorpus};
pub use index::{
    compile_corpus, load_spec_dir, IndexEntry, LookupOutcome, NoMatchReason, OperationMatch,
    OperationSpec, ResponseSpec, SpecDocument, SpecIndex,
};
pub use path::{compile_path_template, PathMatcher, TemplateError};
pub use schema::{
    AdditionalProperties, ArraySchema, Bound, CompositeSchema, Constraints, Discriminator,
    ObjectSchema, Pattern, SchemaArena, SchemaId, SchemaKind, SchemaNode,
};

/// Errors from loading or compiling a spec corpus.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("no loadable OpenAPI document found")]
    EmptyCorpus,
    #[error("unresolvable reference {reference:?} (from {location})")]
    UnresolvableRef { reference: String, location: String },
    #[error(transparent)]
    BadTemplate(TemplateError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Resolves one reference from a given document and returns the compiled
/// schema with the arena it lives in. Mostly useful for tests and tooling;
/// full corpus compilation shares one arena instead.
pub fn resolve_ref(
    corpus: &SpecCorpus,
    from_file: &str,
    ref_text: &str,
) -> Result<(SchemaArena, SchemaId), SpecError> {
    let doc = corpus
        .documents
        .iter()
        .position(|d| d.file_name == from_file)
        .ok_or_else(|| SpecError::UnresolvableRef {
            reference: ref_text.to_string(),
            location: from_file.to_string(),
        })?;
    let mut compiler = Compiler::new(corpus);
    let id = compiler.compile_ref(doc, ref_text)?;
    Ok((compiler.arena, id))
}
