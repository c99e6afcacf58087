//! Random schema and value generation over a small bounded universe.

use std::collections::BTreeMap;

use rand::prelude::*;

use sbilint_core::json::{JsonNumber, JsonValue};
use sbilint_core::openapi::{
    AdditionalProperties, ArraySchema, Bound, CompositeSchema, Discriminator,
    ObjectSchema, Pattern, SchemaArena, SchemaId, SchemaKind, SchemaNode,
};

const PROP_NAMES: &[&str] = &["a", "b", "c", "d"];
const STRINGS: &[&str] = &["", "a", "ab", "abc", "xyz", "z9", "A", "nfType"];
const PATTERNS: &[&str] = &["^[a-z]+$", "[0-9]", "^a", "b$", "^[a-z]{2}$"];

pub fn gen_value(rng: &mut StdRng, depth: usize) -> JsonValue {
    let choice = if depth == 0 {
        rng.random_range(0..6u8)
    } else {
        rng.random_range(0..8u8)
    };
    match choice {
        0 => JsonValue::Null,
        1 => JsonValue::Bool(rng.random_bool(0.5)),
        2 | 3 => JsonValue::Number(JsonNumber::from_i64(rng.random_range(-3..7))),
        4 => {
            let fractions = ["1.5", "2.5", "-0.5", "0.25", "2.0"];
            JsonValue::Number(
                JsonNumber::from_literal(fractions[rng.random_range(0..fractions.len())])
                    .expect("fraction literal"),
            )
        }
        5 => JsonValue::String(STRINGS[rng.random_range(0..STRINGS.len())].to_string()),
        6 => {
            let len = rng.random_range(0..3usize);
            JsonValue::Array((0..len).map(|_| gen_value(rng, depth - 1)).collect())
        }
        _ => {
            let len = rng.random_range(0..3usize);
            let mut members: Vec<(String, JsonValue)> = Vec::new();
            for _ in 0..len {
                let key = PROP_NAMES[rng.random_range(0..PROP_NAMES.len())].to_string();
                if !members.iter().any(|(k, _)| *k == key) {
                    members.push((key, gen_value(rng, depth - 1)));
                }
            }
            JsonValue::Object(members)
        }
    }
}

pub fn gen_schema(rng: &mut StdRng, depth: usize, arena: &mut SchemaArena) -> SchemaId {
    let choice = if depth == 0 {
        rng.random_range(0..5u8)
    } else {
        rng.random_range(0..10u8)
    };
    let mut node = match choice {
        0 => scalar(SchemaKind::Str, rng),
        1 => scalar(SchemaKind::Integer, rng),
        2 => scalar(SchemaKind::Number, rng),
        3 => SchemaNode::of_kind(SchemaKind::Boolean),
        4 => scalar(SchemaKind::Any, rng),
        5 | 6 => {
            let mut object = ObjectSchema::default();
            for _ in 0..rng.random_range(0..3usize) {
                let name = PROP_NAMES[rng.random_range(0..PROP_NAMES.len())].to_string();
                let schema = gen_schema(rng, depth - 1, arena);
                object.properties.insert(name, schema);
            }
            let names: Vec<String> = object.properties.keys().cloned().collect();
            for name in names {
                if rng.random_bool(0.3) {
                    object.required.insert(name);
                }
            }
            object.additional = match rng.random_range(0..4u8) {
                0 => AdditionalProperties::Denied,
                1 => AdditionalProperties::Schema(gen_schema(rng, depth - 1, arena)),
                _ => AdditionalProperties::Allowed,
            };
            let mut node = SchemaNode::of_kind(SchemaKind::Object(object));
            if rng.random_bool(0.2) {
                node.constraints.min_properties = Some(rng.random_range(0..2));
            }
            if rng.random_bool(0.2) {
                node.constraints.max_properties = Some(rng.random_range(1..3));
            }
            node
        }
        7 => {
            let items = if rng.random_bool(0.8) {
                Some(gen_schema(rng, depth - 1, arena))
            } else {
                None
            };
            let mut node = SchemaNode::of_kind(SchemaKind::Array(ArraySchema { items }));
            if rng.random_bool(0.3) {
                node.constraints.min_items = Some(rng.random_range(0..2));
            }
            if rng.random_bool(0.3) {
                node.constraints.max_items = Some(rng.random_range(0..3));
            }
            node.constraints.unique_items = rng.random_bool(0.25);
            node
        }
        _ => composite(rng, depth, arena),
    };
    if rng.random_bool(0.2) {
        node.nullable = true;
    }
    arena.add(node)
}

fn scalar(kind: SchemaKind, rng: &mut StdRng) -> SchemaNode {
    let mut node = SchemaNode::of_kind(kind);
    match &node.kind {
        SchemaKind::Str => {
            if rng.random_bool(0.4) {
                let pattern = PATTERNS[rng.random_range(0..PATTERNS.len())];
                node.constraints.pattern = Some(Pattern::compile(pattern).expect("pool pattern"));
            }
            if rng.random_bool(0.3) {
                node.constraints.min_length = Some(rng.random_range(0..3));
            }
            if rng.random_bool(0.3) {
                node.constraints.max_length = Some(rng.random_range(1..4));
            }
        }
        SchemaKind::Integer | SchemaKind::Number => {
            if rng.random_bool(0.5) {
                node.constraints.minimum = Some(Bound {
                    value: JsonNumber::from_i64(rng.random_range(-2..3)),
                    exclusive: rng.random_bool(0.3),
                });
            }
            if rng.random_bool(0.5) {
                node.constraints.maximum = Some(Bound {
                    value: JsonNumber::from_i64(rng.random_range(0..6)),
                    exclusive: rng.random_bool(0.3),
                });
            }
        }
        _ => {}
    }
    if rng.random_bool(0.2) {
        node.constraints.enum_values = Some(gen_enum_values(rng));
    }
    node
}

fn gen_enum_values(rng: &mut StdRng) -> Vec<JsonValue> {
    let len = rng.random_range(1..4usize);
    (0..len)
        .map(|_| match rng.random_range(0..3u8) {
            0 => JsonValue::Number(JsonNumber::from_i64(rng.random_range(-2..5))),
            1 => JsonValue::String(STRINGS[rng.random_range(0..STRINGS.len())].to_string()),
            _ => JsonValue::Bool(rng.random_bool(0.5)),
        })
        .collect()
}

fn composite(rng: &mut StdRng, depth: usize, arena: &mut SchemaArena) -> SchemaNode {
    let mut comp = CompositeSchema::default();
    match rng.random_range(0..5u8) {
        0 => {
            let n = rng.random_range(1..4usize);
            comp.one_of = (0..n).map(|_| gen_schema(rng, depth - 1, arena)).collect();
        }
        1 => {
            // Discriminated oneOf over two object branches.
            let property = PROP_NAMES[rng.random_range(0..2)].to_string();
            let mut mapping = BTreeMap::new();
            let mut branches = Vec::new();
            for tag in ["A", "ab"] {
                let mut object = ObjectSchema::default();
                let tag_schema = arena.add(SchemaNode::of_kind(SchemaKind::Str));
                object.properties.insert(property.clone(), tag_schema);
                if rng.random_bool(0.5) {
                    object.required.insert(property.clone());
                }
                if rng.random_bool(0.5) {
                    let extra = PROP_NAMES[rng.random_range(0..PROP_NAMES.len())].to_string();
                    let schema = gen_schema(rng, depth - 1, arena);
                    object.properties.insert(extra, schema);
                }
                let id = arena.add(SchemaNode::of_kind(SchemaKind::Object(object)));
                mapping.insert(tag.to_string(), id);
                branches.push(id);
            }
            comp.one_of = branches;
            comp.discriminator = Some(Discriminator {
                property_name: property,
                mapping,
            });
        }
        2 => {
            let n = rng.random_range(1..4usize);
            comp.any_of = (0..n).map(|_| gen_schema(rng, depth - 1, arena)).collect();
        }
        3 => {
            let n = rng.random_range(1..3usize);
            comp.all_of = (0..n).map(|_| gen_schema(rng, depth - 1, arena)).collect();
        }
        _ => {
            comp.not = Some(gen_schema(rng, depth - 1, arena));
        }
    }
    let mut node = SchemaNode::of_kind(SchemaKind::Composite(comp));
    if rng.random_bool(0.1) {
        node.constraints.enum_values = Some(gen_enum_values(rng));
    }
    node
}
