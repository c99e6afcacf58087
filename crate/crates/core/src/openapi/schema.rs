//! Compiled, reference-free schema representation.
//!
//! Schemas live in an arena and point at each other through [`SchemaId`].
//! Reference cycles in the source documents become id links, which validate
//! exactly like an infinite inline expansion would.

use std::collections::{BTreeMap, BTreeSet};

use crate::json::{JsonNumber, JsonValue};

/// Index of a schema node inside its [`SchemaArena`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaId(pub(crate) u32);

/// Owns every compiled schema node of one spec corpus.
#[derive(Debug, Default)]
pub struct SchemaArena {
    nodes: Vec<SchemaNode>,
}

impl SchemaArena {
    pub fn new() -> SchemaArena {
        SchemaArena::default()
    }

    pub fn add(&mut self, node: SchemaNode) -> SchemaId {
        let id = SchemaId(self.nodes.len() as u32);
        self.nodes.push(node);
        id
    }

    /// Reserves a slot so self-referencing schemas can be compiled; the
    /// placeholder accepts anything until replaced.
    pub(crate) fn reserve(&mut self) -> SchemaId {
        self.add(SchemaNode::any())
    }

    pub(crate) fn replace(&mut self, id: SchemaId, node: SchemaNode) {
        self.nodes[id.0 as usize] = node;
    }

    pub fn get(&self, id: SchemaId) -> &SchemaNode {
        &self.nodes[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// One resolved schema node.
#[derive(Debug, Clone)]
pub struct SchemaNode {
    pub kind: SchemaKind,
    pub constraints: Constraints,
    pub nullable: bool,
    /// Component name when the node came from a named schema; used for
    /// diagnostics and implicit discriminator mapping.
    pub name: Option<String>,
}

impl SchemaNode {
    pub fn any() -> SchemaNode {
        SchemaNode {
            kind: SchemaKind::Any,
            constraints: Constraints::default(),
            nullable: false,
            name: None,
        }
    }

    pub fn of_kind(kind: SchemaKind) -> SchemaNode {
        SchemaNode {
            kind,
            constraints: Constraints::default(),
            nullable: false,
            name: None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SchemaKind {
    /// No type constraint; generic constraints still apply.
    Any,
    Str,
    Number,
    Integer,
    Boolean,
    Array(ArraySchema),
    Object(ObjectSchema),
    Composite(CompositeSchema),
}

impl SchemaKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemaKind::Any => "any",
            SchemaKind::Str => "string",
            SchemaKind::Number => "number",
            SchemaKind::Integer => "integer",
            SchemaKind::Boolean => "boolean",
            SchemaKind::Array(_) => "array",
            SchemaKind::Object(_) => "object",
            SchemaKind::Composite(_) => "composite",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ArraySchema {
    pub items: Option<SchemaId>,
}

#[derive(Debug, Clone)]
pub struct ObjectSchema {
    pub properties: BTreeMap<String, SchemaId>,
    pub required: BTreeSet<String>,
    pub additional: AdditionalProperties,
}

impl Default for ObjectSchema {
    fn default() -> Self {
        ObjectSchema {
            properties: BTreeMap::new(),
            required: BTreeSet::new(),
            additional: AdditionalProperties::Allowed,
        }
    }
}

#[derive(Debug, Clone)]
pub enum AdditionalProperties {
    Allowed,
    Denied,
    Schema(SchemaId),
}

#[derive(Debug, Clone, Default)]
pub struct CompositeSchema {
    pub one_of: Vec<SchemaId>,
    pub any_of: Vec<SchemaId>,
    pub all_of: Vec<SchemaId>,
    pub not: Option<SchemaId>,
    pub discriminator: Option<Discriminator>,
}

/// oneOf branch selector keyed on a property value.
#[derive(Debug, Clone)]
pub struct Discriminator {
    pub property_name: String,
    /// Explicit mapping entries plus one implicit entry per named branch.
    pub mapping: BTreeMap<String, SchemaId>,
}

/// Value constraints attached to a node.
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    pub pattern: Option<Pattern>,
    pub minimum: Option<Bound>,
    pub maximum: Option<Bound>,
    pub min_length: Option<u64>,
    pub max_length: Option<u64>,
    pub min_items: Option<u64>,
    pub max_items: Option<u64>,
    pub unique_items: bool,
    pub min_properties: Option<u64>,
    pub max_properties: Option<u64>,
    pub enum_values: Option<Vec<JsonValue>>,
    pub format: Option<String>,
}

/// Numeric bound with its exclusivity flag.
#[derive(Debug, Clone)]
pub struct Bound {
    pub value: JsonNumber,
    pub exclusive: bool,
}

/// A compiled regular expression plus its source text. Per JSON-Schema
/// convention the pattern is applied as an unanchored search.
#[derive(Debug, Clone)]
pub struct Pattern {
    pub source: String,
    regex: fancy_regex::Regex,
}

impl Pattern {
    pub fn compile(source: &str) -> Result<Pattern, fancy_regex::Error> {
        Ok(Pattern {
            source: source.to_string(),
            regex: fancy_regex::Regex::new(source)?,
        })
    }

    /// Unanchored search; a backtracking blow-up counts as no match.
    pub fn search(&self, text: &str) -> bool {
        self.regex.is_match(text).unwrap_or(false)
    }
}
