//! JSON value validation against compiled schemas.
//!
//! Every problem becomes a finding; an empty list means the value conforms.
//! Composite semantics: anyOf needs at least one passing branch, allOf needs
//! all, oneOf exactly one unless a discriminator picks the branch directly.
//! A parent fails iff a child fails, so findings bubble to the root.

use std::collections::BTreeSet;

use crate::json::{pointer_push, JsonNumber, JsonValue};
use crate::openapi::schema::{
    AdditionalProperties, CompositeSchema, Constraints, SchemaArena, SchemaId, SchemaKind,
    SchemaNode,
};

use super::finding::{Finding, RuleId};

/// Hard stop for degenerate self-referencing composites (a schema cycle that
/// never consumes a value level). Well-formed corpora stay far below this.
const MAX_SCHEMA_DEPTH: usize = 512;

/// Validates `value` against a schema, returning findings sorted by
/// (pointer, rule). Frame numbers are stamped by the caller.
pub fn validate(
    value: &JsonValue,
    schema: SchemaId,
    arena: &SchemaArena,
    pointer: &str,
) -> Vec<Finding> {
    let mut out = Vec::new();
    check(value, schema, arena, pointer, &mut out, 0, &mut Vec::new());
    out.sort_by(|a, b| {
        (a.json_pointer.as_str(), a.rule).cmp(&(b.json_pointer.as_str(), b.rule))
    });
    out
}

fn check(
    value: &JsonValue,
    id: SchemaId,
    arena: &SchemaArena,
    pointer: &str,
    out: &mut Vec<Finding>,
    depth: usize,
    seen: &mut Vec<SchemaId>,
) {
    if depth > MAX_SCHEMA_DEPTH {
        return;
    }
    let node = arena.get(id);

    if let JsonValue::Null = value {
        if node.nullable {
            return;
        }
        match &node.kind {
            SchemaKind::Any => {
                check_constraints(value, node, pointer, out);
                return;
            }
            SchemaKind::Composite(comp) => {
                check_constraints(value, node, pointer, out);
                if !seen.contains(&id) {
                    seen.push(id);
                    check_composite(value, comp, arena, pointer, out, depth, seen);
                    seen.pop();
                }
                return;
            }
            _ => {
                out.push(Finding::new(
                    RuleId::NullNotAllowed,
                    pointer,
                    format!("null is not allowed (schema type {})", node.kind.name()),
                ));
                return;
            }
        }
    }

    check_constraints(value, node, pointer, out);
    match &node.kind {
        SchemaKind::Any => {}
        SchemaKind::Str => {
            if !matches!(value, JsonValue::String(_)) {
                out.push(type_mismatch("string", value, pointer));
            }
        }
        SchemaKind::Boolean => {
            if !matches!(value, JsonValue::Bool(_)) {
                out.push(type_mismatch("boolean", value, pointer));
            }
        }
        SchemaKind::Number => {
            if !matches!(value, JsonValue::Number(_)) {
                out.push(type_mismatch("number", value, pointer));
            }
        }
        SchemaKind::Integer => match value {
            JsonValue::Number(n) if n.is_integer_valued() => {}
            JsonValue::Number(n) => {
                out.push(Finding::new(
                    RuleId::SchemaTypeMismatch,
                    pointer,
                    format!("expected integer, found fractional number {n}"),
                ));
            }
            _ => out.push(type_mismatch("integer", value, pointer)),
        },
        SchemaKind::Array(array) => match value {
            JsonValue::Array(items) => {
                if let Some(item_schema) = array.items {
                    for (i, item) in items.iter().enumerate() {
                        let item_pointer = pointer_push(pointer, &i.to_string());
                        check(item, item_schema, arena, &item_pointer, out, depth + 1, &mut Vec::new());
                    }
                }
            }
            _ => out.push(type_mismatch("array", value, pointer)),
        },
        SchemaKind::Object(object) => match value {
            JsonValue::Object(members) => {
                for name in &object.required {
                    if !members.iter().any(|(k, _)| k == name) {
                        out.push(Finding::new(
                            RuleId::RequiredMissing,
                            pointer,
                            format!("missing required property {name:?}"),
                        ));
                    }
                }
                for (key, member) in members {
                    let member_pointer = pointer_push(pointer, key);
                    if let Some(prop_schema) = object.properties.get(key) {
                        check(member, *prop_schema, arena, &member_pointer, out, depth + 1, &mut Vec::new());
                    } else {
                        match &object.additional {
                            AdditionalProperties::Allowed => {}
                            AdditionalProperties::Denied => {
                                out.push(Finding::new(
                                    RuleId::AdditionalProperty,
                                    &member_pointer,
                                    format!("property {key:?} is not allowed"),
                                ));
                            }
                            AdditionalProperties::Schema(schema) => {
                                check(member, *schema, arena, &member_pointer, out, depth + 1, &mut Vec::new());
                            }
                        }
                    }
                }
            }
            _ => out.push(type_mismatch("object", value, pointer)),
        },
        SchemaKind::Composite(comp) => {
            // Re-entering the same composite at the same location means a
            // schema cycle that consumes no value; treat it as satisfied.
            if !seen.contains(&id) {
                seen.push(id);
                check_composite(value, comp, arena, pointer, out, depth, seen);
                seen.pop();
            }
        }
    }
}

fn type_mismatch(expected: &str, value: &JsonValue, pointer: &str) -> Finding {
    Finding::new(
        RuleId::SchemaTypeMismatch,
        pointer,
        format!("expected {expected}, found {}", value.type_name()),
    )
}

/// Constraint checks apply to whatever value shape they are defined for;
/// type errors are reported separately by the kind check.
fn check_constraints(value: &JsonValue, node: &SchemaNode, pointer: &str, out: &mut Vec<Finding>) {
    let c: &Constraints = &node.constraints;

    if let Some(allowed) = &c.enum_values {
        let key = value.canonical_key();
        if !allowed.iter().any(|v| v.canonical_key() == key) {
            out.push(Finding::new(
                RuleId::EnumViolation,
                pointer,
                "value is not one of the allowed enumeration values",
            ));
        }
    }

    if let JsonValue::String(s) = value {
        if let Some(pattern) = &c.pattern {
            if !pattern.search(s) {
                out.push(Finding::new(
                    RuleId::PatternMismatch,
                    pointer,
                    format!("string does not match pattern {:?}", pattern.source),
                ));
            }
        }
        let chars = s.chars().count() as u64;
        if let Some(min) = c.min_length {
            if chars < min {
                out.push(Finding::new(
                    RuleId::LengthViolation,
                    pointer,
                    format!("string length {chars} is below minLength {min}"),
                ));
            }
        }
        if let Some(max) = c.max_length {
            if chars > max {
                out.push(Finding::new(
                    RuleId::LengthViolation,
                    pointer,
                    format!("string length {chars} exceeds maxLength {max}"),
                ));
            }
        }
        if let Some(format) = &c.format {
            check_string_format(s, format, pointer, out);
        }
    }

    if let JsonValue::Number(n) = value {
        if let Some(min) = &c.minimum {
            let ord = n.compare(&min.value);
            let violates = if min.exclusive {
                ord != std::cmp::Ordering::Greater
            } else {
                ord == std::cmp::Ordering::Less
            };
            if violates {
                let relation = if min.exclusive { "must be greater than" } else { "is below minimum" };
                out.push(Finding::new(
                    RuleId::RangeViolation,
                    pointer,
                    format!("value {n} {relation} {}", min.value.raw()),
                ));
            }
        }
        if let Some(max) = &c.maximum {
            let ord = n.compare(&max.value);
            let violates = if max.exclusive {
                ord != std::cmp::Ordering::Less
            } else {
                ord == std::cmp::Ordering::Greater
            };
            if violates {
                let relation = if max.exclusive { "must be less than" } else { "exceeds maximum" };
                out.push(Finding::new(
                    RuleId::RangeViolation,
                    pointer,
                    format!("value {n} {relation} {}", max.value.raw()),
                ));
            }
        }
        if let Some(format) = &c.format {
            check_number_format(n, format, pointer, out);
        }
    }

    if let JsonValue::Array(items) = value {
        let len = items.len() as u64;
        if let Some(min) = c.min_items {
            if len < min {
                out.push(Finding::new(
                    RuleId::MinItems,
                    pointer,
                    format!("array has {len} items, minItems is {min}"),
                ));
            }
        }
        if let Some(max) = c.max_items {
            if len > max {
                out.push(Finding::new(
                    RuleId::MaxItems,
                    pointer,
                    format!("array has {len} items, maxItems is {max}"),
                ));
            }
        }
        if c.unique_items {
            let mut seen = BTreeSet::new();
            for (i, item) in items.iter().enumerate() {
                if !seen.insert(item.canonical_key()) {
                    out.push(Finding::new(
                        RuleId::UniqueItems,
                        &pointer_push(pointer, &i.to_string()),
                        "duplicate array item",
                    ));
                }
            }
        }
    }

    if let JsonValue::Object(members) = value {
        let len = members.len() as u64;
        if let Some(min) = c.min_properties {
            if len < min {
                out.push(Finding::new(
                    RuleId::PropertyCount,
                    pointer,
                    format!("object has {len} properties, minProperties is {min}"),
                ));
            }
        }
        if let Some(max) = c.max_properties {
            if len > max {
                out.push(Finding::new(
                    RuleId::PropertyCount,
                    pointer,
                    format!("object has {len} properties, maxProperties is {max}"),
                ));
            }
        }
    }
}

fn check_string_format(s: &str, format: &str, pointer: &str, out: &mut Vec<Finding>) {
    let ok = match format {
        "date-time" => is_rfc3339_date_time(s),
        "uuid" => is_uuid(s),
        "byte" => is_base64(s),
        _ => return,
    };
    if !ok {
        out.push(Finding::new(
            RuleId::FormatViolation,
            pointer,
            format!("string is not a valid {format}"),
        ));
    }
}

fn check_number_format(n: &JsonNumber, format: &str, pointer: &str, out: &mut Vec<Finding>) {
    let ok = match format {
        "int32" => n
            .as_i64()
            .map(|v| (i32::MIN as i64..=i32::MAX as i64).contains(&v))
            .unwrap_or(false),
        "int64" => n.as_i64().is_some(),
        "float" | "double" => n.to_f64().is_finite(),
        _ => return,
    };
    if !ok {
        out.push(Finding::new(
            RuleId::FormatViolation,
            pointer,
            format!("number is outside the {format} value space"),
        ));
    }
}

fn is_rfc3339_date_time(s: &str) -> bool {
    // date-time = full-date "T" full-time, e.g. 2024-05-01T12:30:00.5+02:00
    let b = s.as_bytes();
    let digit = |i: usize| i < b.len() && b[i].is_ascii_digit();
    let lit = |i: usize, c: u8| i < b.len() && (b[i] == c || b[i] == c.to_ascii_lowercase());
    if !(digit(0) && digit(1) && digit(2) && digit(3) && b.get(4) == Some(&b'-')) {
        return false;
    }
    if !(digit(5) && digit(6) && b.get(7) == Some(&b'-') && digit(8) && digit(9)) {
        return false;
    }
    if !lit(10, b'T') {
        return false;
    }
    if !(digit(11) && digit(12) && b.get(13) == Some(&b':') && digit(14) && digit(15)) {
        return false;
    }
    if !(b.get(16) == Some(&b':') && digit(17) && digit(18)) {
        return false;
    }
    let mut i = 19;
    if b.get(i) == Some(&b'.') {
        i += 1;
        let frac_start = i;
        while digit(i) {
            i += 1;
        }
        if i == frac_start {
            return false;
        }
    }
    match b.get(i) {
        Some(b'Z') | Some(b'z') => i + 1 == b.len(),
        Some(b'+') | Some(b'-') => {
            digit(i + 1) && digit(i + 2) && b.get(i + 3) == Some(&b':') && digit(i + 4)
                && digit(i + 5)
                && i + 6 == b.len()
        }
        _ => false,
    }
}

fn is_uuid(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 36 {
        return false;
    }
    for (i, c) in b.iter().enumerate() {
        match i {
            8 | 13 | 18 | 23 => {
                if *c != b'-' {
                    return false;
                }
            }
            _ => {
                if !c.is_ascii_hexdigit() {
                    return false;
                }
            }
        }
    }
    true
}

fn is_base64(s: &str) -> bool {
    let b = s.as_bytes();
    let body_len = b.iter().take_while(|c| !matches!(c, b'=')).count();
    for c in &b[..body_len] {
        if !(c.is_ascii_alphanumeric() || *c == b'+' || *c == b'/') {
            return false;
        }
    }
    // Padding only at the end, at most two.
    b[body_len..].iter().all(|c| *c == b'=') && b.len() - body_len <= 2
}

fn check_composite(
    value: &JsonValue,
    comp: &CompositeSchema,
    arena: &SchemaArena,
    pointer: &str,
    out: &mut Vec<Finding>,
    depth: usize,
    seen: &mut Vec<SchemaId>,
) {
    let branch_findings = |branch: SchemaId, seen: &mut Vec<SchemaId>| -> Vec<Finding> {
        let mut findings = Vec::new();
        check(value, branch, arena, pointer, &mut findings, depth + 1, seen);
        findings
    };

    if !comp.one_of.is_empty() {
        if let Some(disc) = &comp.discriminator {
            check_discriminated(value, disc, arena, pointer, out, depth, seen);
        } else {
            let results: Vec<Vec<Finding>> =
                comp.one_of.iter().map(|b| branch_findings(*b, seen)).collect();
            let passing = results.iter().filter(|r| r.is_empty()).count();
            match passing {
                1 => {}
                0 => {
                    let best = best_branch(&results);
                    out.push(
                        Finding::new(
                            RuleId::OneofNone,
                            pointer,
                            format!(
                                "value matches none of the {} oneOf branches",
                                comp.one_of.len()
                            ),
                        )
                        .with_detail(best),
                    );
                }
                n => {
                    out.push(Finding::new(
                        RuleId::OneofMultiple,
                        pointer,
                        format!("value matches {n} oneOf branches, exactly one expected"),
                    ));
                }
            }
        }
    }

    if !comp.any_of.is_empty() {
        let results: Vec<Vec<Finding>> =
            comp.any_of.iter().map(|b| branch_findings(*b, seen)).collect();
        if !results.iter().any(|r| r.is_empty()) {
            let best = best_branch(&results);
            out.push(
                Finding::new(
                    RuleId::AnyofNone,
                    pointer,
                    format!(
                        "value matches none of the {} anyOf branches",
                        comp.any_of.len()
                    ),
                )
                .with_detail(best),
            );
        }
    }

    if !comp.all_of.is_empty() {
        let alias = comp.all_of.len() == 1
            && comp.one_of.is_empty()
            && comp.any_of.is_empty()
            && comp.not.is_none();
        if alias {
            // Single-branch allOf is how bare reference chains compile;
            // report the target's findings directly instead of wrapping.
            check(value, comp.all_of[0], arena, pointer, out, depth + 1, seen);
        } else {
            for (i, branch) in comp.all_of.iter().enumerate() {
                let findings = branch_findings(*branch, seen);
                if !findings.is_empty() {
                    let name = arena
                        .get(*branch)
                        .name
                        .as_deref()
                        .map(|n| format!(" ({n})"))
                        .unwrap_or_default();
                    out.push(
                        Finding::new(
                            RuleId::AllofFailed,
                            pointer,
                            format!("allOf branch {}{} does not hold", i + 1, name),
                        )
                        .with_detail(findings),
                    );
                }
            }
        }
    }

    if let Some(not_schema) = comp.not {
        let findings = branch_findings(not_schema, seen);
        if findings.is_empty() {
            out.push(Finding::new(
                RuleId::NotMatched,
                pointer,
                "value matches the forbidden schema",
            ));
        }
    }
}

fn check_discriminated(
    value: &JsonValue,
    disc: &crate::openapi::schema::Discriminator,
    arena: &SchemaArena,
    pointer: &str,
    out: &mut Vec<Finding>,
    depth: usize,
    seen: &mut Vec<SchemaId>,
) {
    let property = match value {
        JsonValue::Object(_) => value.get(&disc.property_name),
        _ => None,
    };
    let Some(property) = property else {
        out.push(Finding::new(
            RuleId::DiscriminatorUnknown,
            pointer,
            format!("discriminator property {:?} is missing", disc.property_name),
        ));
        return;
    };
    let Some(tag) = property.as_str() else {
        out.push(Finding::new(
            RuleId::DiscriminatorUnknown,
            &pointer_push(pointer, &disc.property_name),
            format!("discriminator property {:?} is not a string", disc.property_name),
        ));
        return;
    };
    let Some(branch) = disc.mapping.get(tag) else {
        out.push(Finding::new(
            RuleId::DiscriminatorUnknown,
            &pointer_push(pointer, &disc.property_name),
            format!("discriminator value {tag:?} maps to no oneOf branch"),
        ));
        return;
    };
    // Only the selected branch is validated.
    check(value, *branch, arena, pointer, out, depth + 1, seen);
}

/// Fewest findings wins; ties go to the first branch.
fn best_branch(results: &[Vec<Finding>]) -> Vec<Finding> {
    results
        .iter()
        .min_by_key(|r| r.len())
        .cloned()
        .unwrap_or_default()
}
