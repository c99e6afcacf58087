//! Selecting the schema a message body is validated against, and driving
//! validation over a whole exchange.
//!
//! When the declared content type is absent from the specification but the
//! operation declares exactly one, that one is used and a warning recorded;
//! with several declared types the payload cannot be attributed and the
//! mismatch is an error.

use crate::capture::MessageDirection;
use crate::correlate::{HttpExchange, VersionStatus};
use crate::json::parse_json;
use crate::openapi::index::normalize_content_type;
use crate::openapi::{OperationSpec, SchemaId, SpecIndex};

use super::finding::{Finding, RuleId, Severity};
use super::validator::validate;

/// Outcome of schema selection for one message side.
#[derive(Debug, Default)]
pub struct ContentSelection {
    pub schema: Option<SchemaId>,
    /// The specification content type the schema belongs to.
    pub content_type: Option<String>,
    pub findings: Vec<Finding>,
}

/// Limits applied while validating one exchange.
#[derive(Debug, Clone)]
pub struct ExchangeValidationOptions {
    pub max_body: usize,
}

impl Default for ExchangeValidationOptions {
    fn default() -> Self {
        ExchangeValidationOptions {
            max_body: 4 * 1024 * 1024,
        }
    }
}

fn operation_of<'i>(exchange: &HttpExchange, index: &'i SpecIndex) -> Option<&'i OperationSpec> {
    let bound = exchange.bound.as_ref()?;
    index
        .entries()
        .get(bound.entry_index)?
        .operations
        .get(&bound.method)
}

/// Picks the schema for one side of a bound exchange and reports envelope
/// problems (undeclared status, missing Location, content-type mismatch).
pub fn select_content_schema(
    exchange: &HttpExchange,
    side: MessageDirection,
    index: &SpecIndex,
) -> ContentSelection {
    let mut selection = ContentSelection::default();
    let Some(operation) = operation_of(exchange, index) else {
        return selection;
    };
    let message = match side {
        MessageDirection::Request => exchange.request.as_ref(),
        MessageDirection::Response => exchange.response.as_ref(),
    };
    let Some(message) = message else {
        return selection;
    };
    let frame = message.first_frame;

    let content_map = match side {
        MessageDirection::Request => &operation.request_body,
        MessageDirection::Response => {
            let Some(status) = exchange.response_status() else {
                // Missing :status was already flagged during augmentation.
                return selection;
            };
            let Some(response_spec) = operation.response_for_status(status) else {
                let declared: Vec<&str> = operation
                    .responses
                    .iter()
                    .map(|r| r.status_pattern.as_str())
                    .collect();
                selection.findings.push(
                    Finding::new(
                        RuleId::StatusNotDefined,
                        "",
                        format!(
                            "status {status} is not declared for {} (declared: {})",
                            operation.operation_id,
                            declared.join(", ")
                        ),
                    )
                    .with_frame(frame),
                );
                return selection;
            };
            let location_required = response_spec
                .required_headers
                .iter()
                .any(|h| h.eq_ignore_ascii_case("location"));
            if location_required && message.headers.get("location").is_none() {
                selection.findings.push(
                    Finding::new(
                        RuleId::LocationHeaderMissing,
                        "",
                        "response to a resource-creating operation lacks the required Location header",
                    )
                    .with_frame(frame),
                );
            }
            &response_spec.content
        }
    };

    if message.body.is_empty() {
        return selection;
    }
    let declared = message
        .headers
        .get("content-type")
        .map(normalize_content_type);

    match &declared {
        Some(ct) if content_map.contains_key(ct) => {
            selection.schema = content_map.get(ct).copied();
            selection.content_type = Some(ct.clone());
        }
        _ => {
            let shown = declared.as_deref().unwrap_or("(none)");
            if content_map.len() == 1 {
                let (spec_ct, schema) = content_map.iter().next().expect("one entry");
                selection.findings.push(
                    Finding::new(
                        RuleId::ContentTypeMismatch,
                        "",
                        format!(
                            "content type {shown} is not declared; validating against the only declared type {spec_ct}"
                        ),
                    )
                    .with_severity(Severity::Warning)
                    .with_frame(frame),
                );
                selection.schema = Some(*schema);
                selection.content_type = Some(spec_ct.clone());
            } else if content_map.len() > 1 {
                let declared_types: Vec<&str> =
                    content_map.keys().map(String::as_str).collect();
                selection.findings.push(
                    Finding::new(
                        RuleId::ContentTypeMismatch,
                        "",
                        format!(
                            "content type {shown} is not declared and several types are possible ({}); payload not validated",
                            declared_types.join(", ")
                        ),
                    )
                    .with_severity(Severity::Error)
                    .with_frame(frame),
                );
            }
        }
    }
    selection
}

fn is_json_family(content_type: &str) -> bool {
    content_type == "application/json" || content_type.ends_with("+json")
}

/// Validates both sides of an exchange. Returns the findings plus any
/// operational diagnostics (oversized bodies and the like).
pub fn validate_exchange(
    exchange: &HttpExchange,
    index: &SpecIndex,
    options: &ExchangeValidationOptions,
) -> (Vec<Finding>, Vec<String>) {
    let mut findings = Vec::new();
    let mut diagnostics = Vec::new();

    // Payload validation is suppressed for exchanges under an unsupported
    // specification version; the version finding itself already exists.
    if matches!(exchange.version_status, VersionStatus::Unsupported { .. }) {
        return (findings, diagnostics);
    }
    if exchange.bound.is_none() {
        return (findings, diagnostics);
    }

    for side in [MessageDirection::Request, MessageDirection::Response] {
        let message = match side {
            MessageDirection::Request => exchange.request.as_ref(),
            MessageDirection::Response => exchange.response.as_ref(),
        };
        let Some(message) = message else { continue };
        let frame = message.first_frame;

        let mut selection = select_content_schema(exchange, side, index);
        findings.append(&mut selection.findings);
        let Some(schema) = selection.schema else {
            continue;
        };
        if message.body.is_empty() {
            continue;
        }
        if message.body.len() > options.max_body {
            diagnostics.push(format!(
                "frame {frame}: body of {} bytes exceeds the limit, skipped",
                message.body.len()
            ));
            continue;
        }
        let json_family = selection
            .content_type
            .as_deref()
            .map(is_json_family)
            .unwrap_or(false);
        if !json_family {
            continue;
        }
        let value = match std::str::from_utf8(&message.body)
            .map_err(|e| e.to_string())
            .and_then(|text| parse_json(text).map_err(|e| e.to_string()))
        {
            Ok(value) => value,
            Err(error) => {
                findings.push(
                    Finding::new(
                        RuleId::BodyNotJson,
                        "",
                        format!("body does not parse as JSON: {error}"),
                    )
                    .with_frame(frame),
                );
                continue;
            }
        };
        let mut body_findings = validate(&value, schema, index.arena(), "");
        for finding in &mut body_findings {
            finding.stamp_frame(frame);
        }
        findings.append(&mut body_findings);
    }
    (findings, diagnostics)
}
