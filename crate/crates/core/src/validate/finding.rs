//! Conformance findings.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

/// Stable identifier of a conformance rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RuleId {
    SchemaTypeMismatch,
    PatternMismatch,
    RangeViolation,
    LengthViolation,
    MinItems,
    MaxItems,
    UniqueItems,
    RequiredMissing,
    AdditionalProperty,
    PropertyCount,
    EnumViolation,
    FormatViolation,
    NullNotAllowed,
    OneofNone,
    OneofMultiple,
    DiscriminatorUnknown,
    AnyofNone,
    AllofFailed,
    NotMatched,
    BodyNotJson,
    ContentTypeMismatch,
    StatusNotDefined,
    UnknownPath,
    MethodNotAllowed,
    UnsupportedApiVersion,
    HeadersIncomplete,
    LocationHeaderMissing,
}

pub const ALL_RULES: &[RuleId] = &[
    RuleId::SchemaTypeMismatch,
    RuleId::PatternMismatch,
    RuleId::RangeViolation,
    RuleId::LengthViolation,
    RuleId::MinItems,
    RuleId::MaxItems,
    RuleId::UniqueItems,
    RuleId::RequiredMissing,
    RuleId::AdditionalProperty,
    RuleId::PropertyCount,
    RuleId::EnumViolation,
    RuleId::FormatViolation,
    RuleId::NullNotAllowed,
    RuleId::OneofNone,
    RuleId::OneofMultiple,
    RuleId::DiscriminatorUnknown,
    RuleId::AnyofNone,
    RuleId::AllofFailed,
    RuleId::NotMatched,
    RuleId::BodyNotJson,
    RuleId::ContentTypeMismatch,
    RuleId::StatusNotDefined,
    RuleId::UnknownPath,
    RuleId::MethodNotAllowed,
    RuleId::UnsupportedApiVersion,
    RuleId::HeadersIncomplete,
    RuleId::LocationHeaderMissing,
];

impl RuleId {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleId::SchemaTypeMismatch => "SCHEMA_TYPE_MISMATCH",
            RuleId::PatternMismatch => "PATTERN_MISMATCH",
            RuleId::RangeViolation => "RANGE_VIOLATION",
            RuleId::LengthViolation => "LENGTH_VIOLATION",
            RuleId::MinItems => "MIN_ITEMS",
            RuleId::MaxItems => "MAX_ITEMS",
            RuleId::UniqueItems => "UNIQUE_ITEMS",
            RuleId::RequiredMissing => "REQUIRED_MISSING",
            RuleId::AdditionalProperty => "ADDITIONAL_PROPERTY",
            RuleId::PropertyCount => "PROPERTY_COUNT",
            RuleId::EnumViolation => "ENUM_VIOLATION",
            RuleId::FormatViolation => "FORMAT_VIOLATION",
            RuleId::NullNotAllowed => "NULL_NOT_ALLOWED",
            RuleId::OneofNone => "ONEOF_NONE",
            RuleId::OneofMultiple => "ONEOF_MULTIPLE",
            RuleId::DiscriminatorUnknown => "DISCRIMINATOR_UNKNOWN",
            RuleId::AnyofNone => "ANYOF_NONE",
            RuleId::AllofFailed => "ALLOF_FAILED",
            RuleId::NotMatched => "NOT_MATCHED",
            RuleId::BodyNotJson => "BODY_NOT_JSON",
            RuleId::ContentTypeMismatch => "CONTENT_TYPE_MISMATCH",
            RuleId::StatusNotDefined => "STATUS_NOT_DEFINED",
            RuleId::UnknownPath => "UNKNOWN_PATH",
            RuleId::MethodNotAllowed => "METHOD_NOT_ALLOWED",
            RuleId::UnsupportedApiVersion => "UNSUPPORTED_API_VERSION",
            RuleId::HeadersIncomplete => "HEADERS_INCOMPLETE",
            RuleId::LocationHeaderMissing => "LOCATION_HEADER_MISSING",
        }
    }

    /// The severity a rule carries unless a caller overrides it.
    pub fn default_severity(&self) -> Severity {
        match self {
            RuleId::HeadersIncomplete => Severity::Warning,
            // The single-content-type workaround downgrades this one; the
            // ambiguous case overrides back to Error.
            RuleId::ContentTypeMismatch => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_RULES
            .iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| format!("unknown rule id {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "info" => Ok(Severity::Info),
            "warning" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            other => Err(format!("unknown severity {other:?}")),
        }
    }
}

/// One conformance violation, addressed by a JSON pointer into the
/// validated value (empty pointer = root).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub rule: RuleId,
    pub severity: Severity,
    pub json_pointer: String,
    pub message: String,
    pub frame_number: u32,
    /// Branch diagnostics for composite failures.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub detail: Vec<Finding>,
}

impl Finding {
    pub fn new(rule: RuleId, pointer: &str, message: impl Into<String>) -> Finding {
        Finding {
            rule,
            severity: rule.default_severity(),
            json_pointer: pointer.to_string(),
            message: message.into(),
            frame_number: 0,
            detail: Vec::new(),
        }
    }

    pub fn with_severity(mut self, severity: Severity) -> Finding {
        self.severity = severity;
        self
    }

    pub fn with_detail(mut self, detail: Vec<Finding>) -> Finding {
        self.detail = detail;
        self
    }

    pub fn with_frame(mut self, frame: u32) -> Finding {
        self.frame_number = frame;
        self
    }

    /// Stamps a frame number onto the finding and its detail tree.
    pub fn stamp_frame(&mut self, frame: u32) {
        self.frame_number = frame;
        for d in &mut self.detail {
            d.stamp_frame(frame);
        }
    }
}

/// Report ordering: frame, then pointer, then rule.
pub fn sort_findings(findings: &mut [Finding]) {
    findings.sort_by(|a, b| {
        (a.frame_number, a.json_pointer.as_str(), a.rule)
            .cmp(&(b.frame_number, b.json_pointer.as_str(), b.rule))
    });
}
