//! Schema validation of decoded message bodies.

pub mod content;
pub mod finding;
pub mod validator;

pub use content::{select_content_schema, validate_exchange, ContentSelection, ExchangeValidationOptions};
pub use finding::{sort_findings, Finding, RuleId, Severity, ALL_RULES};
pub use validator::validate;
