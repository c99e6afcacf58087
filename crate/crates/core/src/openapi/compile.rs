//! Loads a directory of OpenAPI YAML documents and compiles every schema
//! into the reference-free arena form.
//!
//! Cross-file references use the corpus convention
//! `FileName.yaml#/components/schemas/Name`; targets are looked up against
//! sibling files by file name. Reference cycles are compiled once and keep
//! validating through an id link.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde_yaml::Value;
use sha2::{Digest, Sha256};

use super::schema::{
    AdditionalProperties, ArraySchema, Bound, CompositeSchema, Constraints, Discriminator,
    ObjectSchema, Pattern, SchemaArena, SchemaId, SchemaKind, SchemaNode,
};
use super::SpecError;
use crate::json::{JsonNumber, JsonValue};

/// Formats checked by the validator; anything else is recorded as a load
/// warning and accepted unchecked.
pub const VALIDATED_FORMATS: &[&str] = &[
    "int32", "int64", "float", "double", "date-time", "uuid", "byte",
];

/// One YAML document of the corpus, parsed but not yet compiled.
#[derive(Debug)]
pub struct RawDocument {
    pub file_name: String,
    pub root: Value,
}

/// The parsed corpus: every loadable document plus load diagnostics.
#[derive(Debug, Default)]
pub struct SpecCorpus {
    pub documents: Vec<RawDocument>,
    pub warnings: Vec<String>,
    pub digest: String,
}

impl SpecCorpus {
    /// Builds a corpus from in-memory sources. Sources are sorted by file
    /// name so the result does not depend on the order given.
    pub fn from_sources<S: AsRef<str>>(sources: &[(String, S)]) -> SpecCorpus {
        let mut sorted: Vec<(&String, &str)> =
            sources.iter().map(|(n, c)| (n, c.as_ref())).collect();
        sorted.sort_by(|a, b| a.0.cmp(b.0));

        let mut corpus = SpecCorpus::default();
        let mut hasher = Sha256::new();
        for (name, content) in sorted {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            hasher.update(content.as_bytes());
            hasher.update([0u8]);
            match serde_yaml::from_str::<Value>(content) {
                Ok(mut root) => {
                    if let Err(e) = root.apply_merge() {
                        corpus
                            .warnings
                            .push(format!("{name}: YAML merge keys not applied: {e}"));
                    }
                    if root.get("openapi").is_none() {
                        corpus
                            .warnings
                            .push(format!("{name}: no top-level \"openapi\" key, ignored"));
                        continue;
                    }
                    corpus.documents.push(RawDocument {
                        file_name: name.clone(),
                        root,
                    });
                }
                Err(e) => {
                    corpus.warnings.push(format!("{name}: YAML parse failed: {e}"));
                }
            }
        }
        corpus.digest = hex_digest(hasher);
        corpus
    }

    /// Reads every `.yaml`/`.yml` file of a directory.
    pub fn from_dir(dir: &Path) -> Result<SpecCorpus, SpecError> {
        let mut sources = Vec::new();
        let entries = std::fs::read_dir(dir).map_err(|e| SpecError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        let mut io_warnings = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|e| SpecError::Io {
                path: dir.display().to_string(),
                source: e,
            })?;
            let path = entry.path();
            let is_yaml = path
                .extension()
                .and_then(|e| e.to_str())
                .map(|e| e.eq_ignore_ascii_case("yaml") || e.eq_ignore_ascii_case("yml"))
                .unwrap_or(false);
            if !is_yaml || !path.is_file() {
                continue;
            }
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_string();
            match std::fs::read_to_string(&path) {
                Ok(content) => sources.push((name, content)),
                Err(e) => io_warnings.push(format!("{name}: read failed: {e}")),
            }
        }
        let mut corpus = SpecCorpus::from_sources(&sources);
        corpus.warnings.extend(io_warnings);
        Ok(corpus)
    }

    fn doc_index(&self, file_name: &str) -> Option<usize> {
        let trimmed = file_name.trim_start_matches("./");
        self.documents.iter().position(|d| d.file_name == trimmed)
    }
}

fn hex_digest(hasher: Sha256) -> String {
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Compiles schemas out of a corpus, memoizing reference targets.
pub struct Compiler<'c> {
    corpus: &'c SpecCorpus,
    pub arena: SchemaArena,
    resolved: HashMap<(usize, String), SchemaId>,
    pub warnings: Vec<String>,
    unknown_formats: BTreeSet<String>,
}

impl<'c> Compiler<'c> {
    pub fn new(corpus: &'c SpecCorpus) -> Compiler<'c> {
        Compiler {
            corpus,
            arena: SchemaArena::new(),
            resolved: HashMap::new(),
            warnings: Vec::new(),
            unknown_formats: BTreeSet::new(),
        }
    }

    pub fn finish_warnings(mut self) -> (SchemaArena, Vec<String>) {
        for format in &self.unknown_formats {
            self.warnings
                .push(format!("format \"{format}\" is not validated"));
        }
        (self.arena, self.warnings)
    }

    /// Resolves a `$ref` string from within `doc` to the referenced YAML
    /// node. Returns the owning document index and the node.
    pub fn resolve_yaml_ref(
        &self,
        doc: usize,
        ref_text: &str,
    ) -> Result<(usize, &'c Value), SpecError> {
        let location = self.corpus.documents[doc].file_name.clone();
        let (file_part, pointer) = match ref_text.split_once('#') {
            Some((f, p)) => (f, p),
            None => (ref_text, ""),
        };
        let target_doc = if file_part.is_empty() {
            doc
        } else {
            self.corpus
                .doc_index(file_part)
                .ok_or_else(|| SpecError::UnresolvableRef {
                    reference: ref_text.to_string(),
                    location: location.clone(),
                })?
        };
        let root = &self.corpus.documents[target_doc].root;
        let node = yaml_pointer(root, pointer).ok_or_else(|| SpecError::UnresolvableRef {
            reference: ref_text.to_string(),
            location,
        })?;
        Ok((target_doc, node))
    }

    /// Compiles the schema a reference denotes.
    pub fn compile_ref(&mut self, doc: usize, ref_text: &str) -> Result<SchemaId, SpecError> {
        let (target_doc, node) = self.resolve_yaml_ref(doc, ref_text)?;
        let pointer = ref_text
            .split_once('#')
            .map(|(_, p)| p.to_string())
            .unwrap_or_default();
        let key = (target_doc, pointer.clone());
        if let Some(id) = self.resolved.get(&key) {
            return Ok(*id);
        }
        // Reserve before descending so cycles land on the reserved id.
        let id = self.arena.reserve();
        self.resolved.insert(key, id);
        let name = pointer.rsplit('/').next().filter(|s| !s.is_empty());
        let node = self.build_schema(target_doc, node, name.map(unescape_pointer_token))?;
        self.arena.replace(id, node);
        Ok(id)
    }

    /// Compiles an inline or referenced schema node.
    pub fn compile_schema(&mut self, doc: usize, node: &Value) -> Result<SchemaId, SpecError> {
        if let Some(ref_text) = node.get("$ref").and_then(Value::as_str) {
            return self.compile_ref(doc, ref_text);
        }
        let built = self.build_schema(doc, node, None)?;
        Ok(self.arena.add(built))
    }

    fn build_schema(
        &mut self,
        doc: usize,
        node: &Value,
        name: Option<String>,
    ) -> Result<SchemaNode, SpecError> {
        if let Some(ref_text) = node.get("$ref").and_then(Value::as_str) {
            let id = self.compile_ref(doc, ref_text)?;
            // A bare reference node: alias the target through a composite
            // with a single allOf branch to keep arena sharing intact.
            let mut composite = CompositeSchema::default();
            composite.all_of.push(id);
            let mut built = SchemaNode::of_kind(SchemaKind::Composite(composite));
            built.name = name;
            return Ok(built);
        }
        if !node.is_mapping() {
            // Uncommon in 3GPP documents; accept anything rather than fail.
            self.warnings
                .push("non-mapping schema node treated as unconstrained".to_string());
            let mut built = SchemaNode::any();
            built.name = name;
            return Ok(built);
        }

        let mut constraints = self.build_constraints(doc, node)?;
        let nullable = node
            .get("nullable")
            .and_then(Value::as_bool)
            .unwrap_or(false);
        let declared_type = node.get("type").and_then(Value::as_str);

        let has_composite = ["oneOf", "anyOf", "allOf", "not"]
            .iter()
            .any(|k| node.get(*k).is_some());
        let kind = if has_composite {
            let mut composite = CompositeSchema {
                one_of: self.compile_branch_list(doc, node.get("oneOf"))?,
                any_of: self.compile_branch_list(doc, node.get("anyOf"))?,
                all_of: self.compile_branch_list(doc, node.get("allOf"))?,
                not: match node.get("not") {
                    Some(sub) => Some(self.compile_schema(doc, sub)?),
                    None => None,
                },
                discriminator: None,
            };
            // A sibling type/object/array part must hold as well; fold it in
            // as one more allOf branch.
            if let Some(plain) = self.plain_part(doc, node, declared_type, &mut constraints)? {
                composite.all_of.push(plain);
            }
            composite.discriminator =
                self.compile_discriminator(doc, node.get("discriminator"), &composite.one_of)?;
            SchemaKind::Composite(composite)
        } else {
            self.plain_kind(doc, node, declared_type)?
        };

        Ok(SchemaNode {
            kind,
            constraints,
            nullable,
            name,
        })
    }

    /// Compiles the non-composite keywords of a node that also carries
    /// composite keywords. Returns None when nothing meaningful remains.
    fn plain_part(
        &mut self,
        doc: usize,
        node: &Value,
        declared_type: Option<&str>,
        constraints: &mut Constraints,
    ) -> Result<Option<SchemaId>, SpecError> {
        let has_object_keywords = node.get("properties").is_some()
            || node.get("required").is_some()
            || node.get("additionalProperties").is_some();
        let has_array_keywords = node.get("items").is_some();
        if declared_type.is_none() && !has_object_keywords && !has_array_keywords {
            return Ok(None);
        }
        let kind = self.plain_kind(doc, node, declared_type)?;
        let mut built = SchemaNode::of_kind(kind);
        // Scalar constraints stay on the composite node itself (they apply
        // to the same value); only structural checks move to the branch.
        built.constraints = std::mem::take(constraints);
        Ok(Some(self.arena.add(built)))
    }

    fn plain_kind(
        &mut self,
        doc: usize,
        node: &Value,
        declared_type: Option<&str>,
    ) -> Result<SchemaKind, SpecError> {
        let kind = match declared_type {
            Some("string") => SchemaKind::Str,
            Some("number") => SchemaKind::Number,
            Some("integer") => SchemaKind::Integer,
            Some("boolean") => SchemaKind::Boolean,
            Some("array") => SchemaKind::Array(self.build_array(doc, node)?),
            Some("object") => SchemaKind::Object(self.build_object(doc, node)?),
            Some(other) => {
                self.warnings
                    .push(format!("unknown schema type \"{other}\" treated as unconstrained"));
                SchemaKind::Any
            }
            None => {
                if node.get("properties").is_some()
                    || node.get("required").is_some()
                    || node.get("additionalProperties").is_some()
                    || node.get("minProperties").is_some()
                    || node.get("maxProperties").is_some()
                {
                    SchemaKind::Object(self.build_object(doc, node)?)
                } else if node.get("items").is_some() {
                    SchemaKind::Array(self.build_array(doc, node)?)
                } else {
                    SchemaKind::Any
                }
            }
        };
        Ok(kind)
    }

    fn build_array(&mut self, doc: usize, node: &Value) -> Result<ArraySchema, SpecError> {
        let items = match node.get("items") {
            Some(items) => Some(self.compile_schema(doc, items)?),
            None => None,
        };
        Ok(ArraySchema { items })
    }

    fn build_object(&mut self, doc: usize, node: &Value) -> Result<ObjectSchema, SpecError> {
        let mut properties = BTreeMap::new();
        if let Some(props) = node.get("properties").and_then(Value::as_mapping) {
            for (key, sub) in props {
                let Some(key) = key.as_str() else { continue };
                let id = self.compile_schema(doc, sub)?;
                properties.insert(key.to_string(), id);
            }
        }
        let mut required = BTreeSet::new();
        if let Some(list) = node.get("required").and_then(Value::as_sequence) {
            for item in list {
                if let Some(name) = item.as_str() {
                    required.insert(name.to_string());
                }
            }
        }
        let additional = match node.get("additionalProperties") {
            None => AdditionalProperties::Allowed,
            Some(Value::Bool(true)) => AdditionalProperties::Allowed,
            Some(Value::Bool(false)) => AdditionalProperties::Denied,
            Some(sub) => AdditionalProperties::Schema(self.compile_schema(doc, sub)?),
        };
        Ok(ObjectSchema {
            properties,
            required,
            additional,
        })
    }

    fn compile_branch_list(
        &mut self,
        doc: usize,
        list: Option<&Value>,
    ) -> Result<Vec<SchemaId>, SpecError> {
        let mut out = Vec::new();
        if let Some(seq) = list.and_then(Value::as_sequence) {
            for branch in seq {
                out.push(self.compile_schema(doc, branch)?);
            }
        }
        Ok(out)
    }

    fn compile_discriminator(
        &mut self,
        doc: usize,
        node: Option<&Value>,
        one_of: &[SchemaId],
    ) -> Result<Option<Discriminator>, SpecError> {
        let Some(node) = node else { return Ok(None) };
        let Some(property_name) = node.get("propertyName").and_then(Value::as_str) else {
            self.warnings
                .push("discriminator without propertyName ignored".to_string());
            return Ok(None);
        };
        let mut mapping = BTreeMap::new();
        // Implicit entries: branch component names map to themselves.
        for id in one_of {
            if let Some(branch_name) = &self.arena.get(*id).name {
                mapping.insert(branch_name.clone(), *id);
            }
        }
        if let Some(explicit) = node.get("mapping").and_then(Value::as_mapping) {
            for (key, target) in explicit {
                let (Some(key), Some(target)) = (key.as_str(), target.as_str()) else {
                    continue;
                };
                let ref_text = if target.contains('#') || target.contains('/') {
                    target.to_string()
                } else {
                    format!("#/components/schemas/{target}")
                };
                let id = self.compile_ref(doc, &ref_text)?;
                mapping.insert(key.to_string(), id);
            }
        }
        Ok(Some(Discriminator {
            property_name: property_name.to_string(),
            mapping,
        }))
    }

    fn build_constraints(&mut self, _doc: usize, node: &Value) -> Result<Constraints, SpecError> {
        let mut constraints = Constraints::default();
        if let Some(pattern) = node.get("pattern").and_then(Value::as_str) {
            match Pattern::compile(pattern) {
                Ok(p) => constraints.pattern = Some(p),
                Err(e) => self
                    .warnings
                    .push(format!("pattern {pattern:?} does not compile, skipped: {e}")),
            }
        }
        constraints.minimum = bound_from(node, "minimum", "exclusiveMinimum");
        constraints.maximum = bound_from(node, "maximum", "exclusiveMaximum");
        constraints.min_length = node.get("minLength").and_then(Value::as_u64);
        constraints.max_length = node.get("maxLength").and_then(Value::as_u64);
        constraints.min_items = node.get("minItems").and_then(Value::as_u64);
        constraints.max_items = node.get("maxItems").and_then(Value::as_u64);
        constraints.unique_items = node
            .get("uniqueItems")
            .and_then(Value::as_bool)
            .unwrap_or(false);
        constraints.min_properties = node.get("minProperties").and_then(Value::as_u64);
        constraints.max_properties = node.get("maxProperties").and_then(Value::as_u64);
        if let Some(list) = node.get("enum").and_then(Value::as_sequence) {
            let values: Vec<JsonValue> = list.iter().filter_map(yaml_to_json).collect();
            constraints.enum_values = Some(values);
        }
        if let Some(format) = node.get("format").and_then(Value::as_str) {
            if !VALIDATED_FORMATS.contains(&format) {
                self.unknown_formats.insert(format.to_string());
            }
            constraints.format = Some(format.to_string());
        }
        Ok(constraints)
    }
}

fn bound_from(node: &Value, key: &str, exclusive_key: &str) -> Option<Bound> {
    // OpenAPI 3.1 numeric form: the exclusive keyword is its own bound.
    if let Some(Value::Number(n)) = node.get(exclusive_key) {
        return JsonNumber::from_literal(&n.to_string()).map(|value| Bound {
            value,
            exclusive: true,
        });
    }
    let value = node.get(key)?.as_f64_literal()?;
    let exclusive = node
        .get(exclusive_key)
        .and_then(Value::as_bool)
        .unwrap_or(false);
    Some(Bound { value, exclusive })
}

trait YamlNumberExt {
    fn as_f64_literal(&self) -> Option<JsonNumber>;
}

impl YamlNumberExt for Value {
    fn as_f64_literal(&self) -> Option<JsonNumber> {
        match self {
            Value::Number(n) => JsonNumber::from_literal(&n.to_string()),
            _ => None,
        }
    }
}

/// Converts a YAML scalar tree to the validator's value type (for enums).
pub fn yaml_to_json(value: &Value) -> Option<JsonValue> {
    match value {
        Value::Null => Some(JsonValue::Null),
        Value::Bool(b) => Some(JsonValue::Bool(*b)),
        Value::Number(n) => JsonNumber::from_literal(&n.to_string()).map(JsonValue::Number),
        Value::String(s) => Some(JsonValue::String(s.clone())),
        Value::Sequence(items) => {
            let converted: Option<Vec<_>> = items.iter().map(yaml_to_json).collect();
            Some(JsonValue::Array(converted?))
        }
        Value::Mapping(map) => {
            let mut members = Vec::new();
            for (k, v) in map {
                members.push((k.as_str()?.to_string(), yaml_to_json(v)?));
            }
            Some(JsonValue::Object(members))
        }
        Value::Tagged(tagged) => yaml_to_json(&tagged.value),
    }
}

/// Walks an RFC 6901 style pointer ("/components/schemas/Name") through a
/// YAML document.
pub fn yaml_pointer<'a>(root: &'a Value, pointer: &str) -> Option<&'a Value> {
    if pointer.is_empty() {
        return Some(root);
    }
    let mut current = root;
    for token in pointer.strip_prefix('/')?.split('/') {
        let token = unescape_pointer_token(token);
        current = match current {
            Value::Mapping(_) => current.get(token.as_str())?,
            Value::Sequence(items) => items.get(token.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(current)
}

fn unescape_pointer_token(token: &str) -> String {
    token.replace("~1", "/").replace("~0", "~")
}
