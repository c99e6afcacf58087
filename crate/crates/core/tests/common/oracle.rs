//! Brute-force semantic checker for schema conformance, written directly
//! from the validation semantics and kept independent of the validator:
//! plain boolean evaluation, f64 numerics (exact over the small generated
//! universe), its own regex compilation and its own value equality.

use sbilint_core::json::JsonValue;
use sbilint_core::openapi::{
    AdditionalProperties, CompositeSchema, Constraints, SchemaArena, SchemaId, SchemaKind,
    SchemaNode,
};

pub fn conforms(value: &JsonValue, id: SchemaId, arena: &SchemaArena) -> bool {
    conforms_at(value, id, arena, 0)
}

fn conforms_at(value: &JsonValue, id: SchemaId, arena: &SchemaArena, depth: usize) -> bool {
    if depth > 64 {
        return true;
    }
    let node = arena.get(id);
    if matches!(value, JsonValue::Null) {
        if node.nullable {
            return true;
        }
        return match &node.kind {
            SchemaKind::Any => constraints_hold(value, node),
            SchemaKind::Composite(comp) => {
                constraints_hold(value, node) && composite_holds(value, comp, arena, depth)
            }
            _ => false,
        };
    }
    constraints_hold(value, node) && kind_holds(value, node, arena, depth)
}

fn kind_holds(value: &JsonValue, node: &SchemaNode, arena: &SchemaArena, depth: usize) -> bool {
    match &node.kind {
        SchemaKind::Any => true,
        SchemaKind::Str => matches!(value, JsonValue::String(_)),
        SchemaKind::Boolean => matches!(value, JsonValue::Bool(_)),
        SchemaKind::Number => matches!(value, JsonValue::Number(_)),
        SchemaKind::Integer => match value {
            JsonValue::Number(n) => n.to_f64().fract() == 0.0,
            _ => false,
        },
        SchemaKind::Array(array) => match value {
            JsonValue::Array(items) => match array.items {
                Some(item_schema) => items
                    .iter()
                    .all(|item| conforms_at(item, item_schema, arena, depth + 1)),
                None => true,
            },
            _ => false,
        },
        SchemaKind::Object(object) => match value {
            JsonValue::Object(members) => {
                for required in &object.required {
                    if !members.iter().any(|(k, _)| k == required) {
                        return false;
                    }
                }
                for (key, member) in members {
                    let ok = match object.properties.get(key) {
                        Some(prop) => conforms_at(member, *prop, arena, depth + 1),
                        None => match &object.additional {
                            AdditionalProperties::Allowed => true,
                            AdditionalProperties::Denied => false,
                            AdditionalProperties::Schema(schema) => {
                                conforms_at(member, *schema, arena, depth + 1)
                            }
                        },
                    };
                    if !ok {
                        return false;
                    }
                }
                true
            }
            _ => false,
        },
        SchemaKind::Composite(comp) => composite_holds(value, comp, arena, depth),
    }
}

fn composite_holds(
    value: &JsonValue,
    comp: &CompositeSchema,
    arena: &SchemaArena,
    depth: usize,
) -> bool {
    if !comp.one_of.is_empty() {
        let ok = match &comp.discriminator {
            Some(disc) => match value.get(&disc.property_name) {
                Some(JsonValue::String(tag)) => match disc.mapping.get(tag) {
                    Some(branch) => conforms_at(value, *branch, arena, depth + 1),
                    None => false,
                },
                _ => false,
            },
            None => {
                comp.one_of
                    .iter()
                    .filter(|b| conforms_at(value, **b, arena, depth + 1))
                    .count()
                    == 1
            }
        };
        if !ok {
            return false;
        }
    }
    if !comp.any_of.is_empty()
        && !comp
            .any_of
            .iter()
            .any(|b| conforms_at(value, *b, arena, depth + 1))
    {
        return false;
    }
    if !comp
        .all_of
        .iter()
        .all(|b| conforms_at(value, *b, arena, depth + 1))
    {
        return false;
    }
    if let Some(not_schema) = comp.not {
        if conforms_at(value, not_schema, arena, depth + 1) {
            return false;
        }
    }
    true
}

fn constraints_hold(value: &JsonValue, node: &SchemaNode) -> bool {
    let c: &Constraints = &node.constraints;
    if let Some(allowed) = &c.enum_values {
        if !allowed.iter().any(|candidate| values_equal(candidate, value)) {
            return false;
        }
    }
    match value {
        JsonValue::String(s) => {
            if let Some(pattern) = &c.pattern {
                let re = fancy_regex::Regex::new(&pattern.source).expect("test pattern compiles");
                if !re.is_match(s).unwrap_or(false) {
                    return false;
                }
            }
            let chars = s.chars().count() as u64;
            if c.min_length.is_some_and(|min| chars < min) {
                return false;
            }
            if c.max_length.is_some_and(|max| chars > max) {
                return false;
            }
        }
        JsonValue::Number(n) => {
            let v = n.to_f64();
            if let Some(min) = &c.minimum {
                let bound = min.value.to_f64();
                if v < bound || (min.exclusive && v == bound) {
                    return false;
                }
            }
            if let Some(max) = &c.maximum {
                let bound = max.value.to_f64();
                if v > bound || (max.exclusive && v == bound) {
                    return false;
                }
            }
        }
        JsonValue::Array(items) => {
            let len = items.len() as u64;
            if c.min_items.is_some_and(|min| len < min) {
                return false;
            }
            if c.max_items.is_some_and(|max| len > max) {
                return false;
            }
            if c.unique_items {
                for i in 0..items.len() {
                    for j in i + 1..items.len() {
                        if values_equal(&items[i], &items[j]) {
                            return false;
                        }
                    }
                }
            }
        }
        JsonValue::Object(members) => {
            let len = members.len() as u64;
            if c.min_properties.is_some_and(|min| len < min) {
                return false;
            }
            if c.max_properties.is_some_and(|max| len > max) {
                return false;
            }
        }
        _ => {}
    }
    true
}

/// JSON value equality with numeric comparison (1 == 1.0), independent of
/// the library's canonical-key form.
pub fn values_equal(a: &JsonValue, b: &JsonValue) -> bool {
    match (a, b) {
        (JsonValue::Null, JsonValue::Null) => true,
        (JsonValue::Bool(x), JsonValue::Bool(y)) => x == y,
        (JsonValue::Number(x), JsonValue::Number(y)) => x.to_f64() == y.to_f64(),
        (JsonValue::String(x), JsonValue::String(y)) => x == y,
        (JsonValue::Array(xs), JsonValue::Array(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| values_equal(x, y))
        }
        (JsonValue::Object(xs), JsonValue::Object(ys)) => {
            xs.len() == ys.len()
                && xs.iter().all(|(k, x)| {
                    ys.iter().any(|(k2, y)| k == k2 && values_equal(x, y))
                })
        }
        _ => false,
    }
}

use rand::prelude::*;
use sbilint_core::validate::validate;

use super::generators;

/// Runs `iterations` random comparisons; returns the number of verdict
/// mismatches (zero means full agreement).
pub fn run_comparison(iterations: usize, seed: u64) -> usize {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut mismatches = 0;
    for i in 0..iterations {
        let mut arena = SchemaArena::new();
        let schema = generators::gen_schema(&mut rng, 3, &mut arena);
        let value = generators::gen_value(&mut rng, 3);
        let findings = validate(&value, schema, &arena, "");
        let validator_says_valid = findings.is_empty();
        let oracle_says_valid = conforms(&value, schema, &arena);
        if validator_says_valid != oracle_says_valid {
            mismatches += 1;
            eprintln!(
                "mismatch {i}: validator={validator_says_valid} oracle={oracle_says_valid}\n  value: {value:?}\n  schema: {:?}\n  findings: {findings:?}",
                arena.get(schema)
            );
            if mismatches > 5 {
                break;
            }
        }
    }
    mismatches
}
