//! Path templates compiled to anchored regular expressions.
//!
//! OpenAPI paths mix literal segments with `{param}` placeholders. Each
//! template becomes one anchored regex: literals are escaped byte-exact and
//! parameters either embed their declared string pattern (own anchors
//! stripped) or match a single non-empty segment.

use std::collections::BTreeMap;

use thiserror::Error;

use super::schema::{SchemaArena, SchemaId, SchemaKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("unbalanced braces in path template {0:?}")]
    UnbalancedBraces(String),
    #[error("empty parameter name in path template {0:?}")]
    EmptyParameterName(String),
    #[error("path template {0:?} does not start with '/'")]
    MissingLeadingSlash(String),
    #[error("parameter pattern for {name:?} does not compile: {message}")]
    BadParameterPattern { name: String, message: String },
}

/// A compiled path template.
#[derive(Debug, Clone)]
pub struct PathMatcher {
    pub template: String,
    pub regex_text: String,
    pub literal_segment_count: usize,
    pub parameter_names: Vec<String>,
    /// Declared pattern source per parameter, aligned with the names.
    pub parameter_patterns: Vec<Option<String>>,
    regex: fancy_regex::Regex,
}

impl PathMatcher {
    /// Matches a full path suffix. Returns the captured parameter values in
    /// template order on success.
    pub fn capture(&self, path: &str) -> Option<Vec<(String, String)>> {
        let caps = self.regex.captures(path).ok().flatten()?;
        let mut bound = Vec::with_capacity(self.parameter_names.len());
        for (i, name) in self.parameter_names.iter().enumerate() {
            // Named groups keep the mapping stable even when a parameter's
            // own pattern contains capturing groups.
            let value = caps
                .name(&format!("p{i}"))
                .map(|m| m.as_str())
                .unwrap_or("");
            bound.push((name.clone(), value.to_string()));
        }
        Some(bound)
    }

    pub fn matches(&self, path: &str) -> bool {
        self.regex.is_match(path).unwrap_or(false)
    }
}

/// One parsed piece of a template segment.
#[derive(Debug, PartialEq, Eq)]
enum SegmentPart {
    Literal(String),
    Parameter(String),
}

/// Compiles a template against the declared parameter schemas. Parameters
/// without a string pattern match one non-empty segment without '/'.
pub fn compile_path_template(
    template: &str,
    parameters: &BTreeMap<String, SchemaId>,
    arena: &SchemaArena,
) -> Result<PathMatcher, TemplateError> {
    if !template.starts_with('/') {
        return Err(TemplateError::MissingLeadingSlash(template.to_string()));
    }
    let mut regex_text = String::from("^");
    let mut parameter_names = Vec::new();
    let mut parameter_patterns = Vec::new();
    let mut literal_segment_count = 0usize;

    for segment in template[1..].split('/') {
        regex_text.push('/');
        let parts = split_segment(segment, template)?;
        let all_literal = parts
            .iter()
            .all(|p| matches!(p, SegmentPart::Literal(_)));
        if all_literal {
            literal_segment_count += 1;
        }
        for part in parts {
            match part {
                SegmentPart::Literal(text) => regex_text.push_str(&escape_literal(&text)),
                SegmentPart::Parameter(name) => {
                    let declared = parameters.get(&name).and_then(|id| pattern_of(*id, arena));
                    let segment_expr = declared
                        .as_deref()
                        .map(strip_anchors)
                        .unwrap_or_else(|| "[^/]+".to_string());
                    regex_text.push_str(&format!("(?P<p{}>", parameter_names.len()));
                    regex_text.push_str(&segment_expr);
                    regex_text.push(')');
                    parameter_names.push(name);
                    parameter_patterns.push(declared);
                }
            }
        }
    }
    regex_text.push('$');

    let regex = fancy_regex::Regex::new(&regex_text).map_err(|e| {
        TemplateError::BadParameterPattern {
            name: template.to_string(),
            message: e.to_string(),
        }
    })?;
    Ok(PathMatcher {
        template: template.to_string(),
        regex_text,
        literal_segment_count,
        parameter_names,
        parameter_patterns,
        regex,
    })
}

fn split_segment(segment: &str, template: &str) -> Result<Vec<SegmentPart>, TemplateError> {
    let mut parts = Vec::new();
    let mut literal = String::new();
    let mut chars = segment.chars();
    while let Some(c) = chars.next() {
        match c {
            '{' => {
                if !literal.is_empty() {
                    parts.push(SegmentPart::Literal(std::mem::take(&mut literal)));
                }
                let mut name = String::new();
                let mut closed = false;
                for c in chars.by_ref() {
                    if c == '}' {
                        closed = true;
                        break;
                    }
                    if c == '{' {
                        return Err(TemplateError::UnbalancedBraces(template.to_string()));
                    }
                    name.push(c);
                }
                if !closed {
                    return Err(TemplateError::UnbalancedBraces(template.to_string()));
                }
                if name.is_empty() {
                    return Err(TemplateError::EmptyParameterName(template.to_string()));
                }
                parts.push(SegmentPart::Parameter(name));
            }
            '}' => return Err(TemplateError::UnbalancedBraces(template.to_string())),
            c => literal.push(c),
        }
    }
    if !literal.is_empty() || segment.is_empty() {
        parts.push(SegmentPart::Literal(literal));
    }
    Ok(parts)
}

/// Looks up the string pattern declared for a parameter schema, if any.
fn pattern_of(id: SchemaId, arena: &SchemaArena) -> Option<String> {
    let node = arena.get(id);
    if !matches!(node.kind, SchemaKind::Str | SchemaKind::Any) {
        return None;
    }
    node.constraints.pattern.as_ref().map(|p| p.source.clone())
}

/// Removes the pattern's own anchors so it can be embedded in the larger
/// path expression.
fn strip_anchors(pattern: &str) -> String {
    let mut p = pattern;
    if let Some(rest) = p.strip_prefix('^') {
        p = rest;
    }
    if let Some(rest) = p.strip_suffix('$') {
        if !rest.ends_with('\\') {
            p = rest;
        }
    }
    format!("(?:{p})")
}

fn escape_literal(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | ',' | '=' | ':' | '@' | '~' | '!' | '\'' | ';') {
            out.push(c);
        } else {
            out.push('\\');
            out.push(c);
        }
    }
    out
}
