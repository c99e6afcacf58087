//! The compiled lookup structure: base paths, path matchers and operations.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde_yaml::Value;

use super::compile::{Compiler, SpecCorpus};
use super::path::{compile_path_template, PathMatcher};
use super::schema::{SchemaArena, SchemaId};
use super::SpecError;

/// Identification of one loaded document.
#[derive(Debug, Clone)]
pub struct SpecDocument {
    pub file_name: String,
    pub api_name: String,
    pub api_version: String,
    pub base_path: String,
}

/// One operation as declared for a path template and method.
#[derive(Debug, Clone)]
pub struct OperationSpec {
    pub method: String,
    pub operation_id: String,
    /// Content type (lowercased, parameters stripped) to body schema.
    pub request_body: BTreeMap<String, SchemaId>,
    pub responses: Vec<ResponseSpec>,
    pub callbacks_present: bool,
}

/// Response contract for one status pattern ("200", "4XX" or "default").
#[derive(Debug, Clone)]
pub struct ResponseSpec {
    pub status_pattern: String,
    pub content: BTreeMap<String, SchemaId>,
    pub required_headers: Vec<String>,
}

impl OperationSpec {
    /// Resolution order: exact status, class pattern, then "default".
    pub fn response_for_status(&self, status: u16) -> Option<&ResponseSpec> {
        let exact = format!("{status}");
        if let Some(r) = self.responses.iter().find(|r| r.status_pattern == exact) {
            return Some(r);
        }
        let class = format!("{}XX", status / 100);
        if let Some(r) = self
            .responses
            .iter()
            .find(|r| r.status_pattern.eq_ignore_ascii_case(&class))
        {
            return Some(r);
        }
        self.responses.iter().find(|r| r.status_pattern == "default")
    }
}

/// One path entry of the index.
#[derive(Debug)]
pub struct IndexEntry {
    pub base_path: String,
    pub api_name: String,
    pub api_version: String,
    pub matcher: PathMatcher,
    /// Uppercased HTTP method to operation.
    pub operations: BTreeMap<String, OperationSpec>,
}

/// Immutable compiled corpus: path matchers, operations and schemas.
#[derive(Debug)]
pub struct SpecIndex {
    arena: SchemaArena,
    entries: Vec<IndexEntry>,
    supported_versions: BTreeMap<String, BTreeSet<String>>,
    pub documents: Vec<SpecDocument>,
    pub warnings: Vec<String>,
    pub corpus_digest: String,
}

/// A successful lookup: the operation plus bound path parameters.
#[derive(Debug)]
pub struct OperationMatch<'i> {
    pub entry: &'i IndexEntry,
    pub operation: &'i OperationSpec,
    pub path_params: Vec<(String, String)>,
}

/// Why a lookup did not bind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NoMatchReason {
    UnknownBasePath,
    UnknownPath,
    MethodNotAllowed { allowed: Vec<String> },
    UnsupportedVersion { api_name: String, found: String, expected: String },
}

#[derive(Debug)]
pub enum LookupOutcome<'i> {
    Match(OperationMatch<'i>),
    NoMatch(NoMatchReason),
}

impl SpecIndex {
    pub fn arena(&self) -> &SchemaArena {
        &self.arena
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn supported_versions(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.supported_versions
    }

    /// Finds the operation a request line addresses. The query string is
    /// stripped before matching. Among accepting entries the one with the
    /// most literal segments wins, ties broken by smallest template.
    pub fn lookup_operation(&self, method: &str, path: &str) -> LookupOutcome<'_> {
        let path = path.split(['?', '#']).next().unwrap_or("");
        let mut base_matched = false;
        let mut best: Option<(&IndexEntry, Vec<(String, String)>)> = None;
        for entry in &self.entries {
            let Some(rest) = path.strip_prefix(entry.base_path.as_str()) else {
                continue;
            };
            if !rest.is_empty() && !rest.starts_with('/') {
                continue;
            }
            base_matched = true;
            let Some(bound) = entry.matcher.capture(rest) else {
                continue;
            };
            let better = match &best {
                None => true,
                Some((current, _)) => {
                    let n = entry.matcher.literal_segment_count;
                    let c = current.matcher.literal_segment_count;
                    n > c || (n == c && entry.matcher.template < current.matcher.template)
                }
            };
            if better {
                best = Some((entry, bound));
            }
        }
        if let Some((entry, path_params)) = best {
            let method_key = method.to_ascii_uppercase();
            return match entry.operations.get(&method_key) {
                Some(operation) => LookupOutcome::Match(OperationMatch {
                    entry,
                    operation,
                    path_params,
                }),
                None => LookupOutcome::NoMatch(NoMatchReason::MethodNotAllowed {
                    allowed: entry.operations.keys().cloned().collect(),
                }),
            };
        }
        if base_matched {
            return LookupOutcome::NoMatch(NoMatchReason::UnknownPath);
        }
        // No base path prefixes the request: check for a version mismatch on
        // a known API name before giving up.
        let mut segments = path.trim_start_matches('/').split('/');
        let api_name = segments.next().unwrap_or("");
        let found_version = segments.next().unwrap_or("");
        if let Some(versions) = self.supported_versions.get(api_name) {
            if is_version_segment(found_version) && !versions.contains(found_version) {
                let expected = versions
                    .iter()
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ");
                return LookupOutcome::NoMatch(NoMatchReason::UnsupportedVersion {
                    api_name: api_name.to_string(),
                    found: found_version.to_string(),
                    expected,
                });
            }
        }
        LookupOutcome::NoMatch(NoMatchReason::UnknownBasePath)
    }
}

/// Loads and compiles every OpenAPI document under a directory.
pub fn load_spec_dir(dir: &Path) -> Result<SpecIndex, SpecError> {
    let corpus = SpecCorpus::from_dir(dir)?;
    compile_corpus(&corpus)
}

/// Compiles a parsed corpus into the immutable index.
pub fn compile_corpus(corpus: &SpecCorpus) -> Result<SpecIndex, SpecError> {
    if corpus.documents.is_empty() {
        return Err(SpecError::EmptyCorpus);
    }
    let mut compiler = Compiler::new(corpus);
    let mut entries: Vec<IndexEntry> = Vec::new();
    let mut documents = Vec::new();
    let mut supported_versions: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    for (doc_idx, doc) in corpus.documents.iter().enumerate() {
        let Some(paths) = doc.root.get("paths").and_then(Value::as_mapping) else {
            // Component-only documents (e.g. common data) carry no paths.
            continue;
        };
        if paths.is_empty() {
            continue;
        }
        let Some(base) = base_path_of(&doc.root) else {
            compiler.warnings.push(format!(
                "{}: no usable server URL, path items skipped",
                doc.file_name
            ));
            continue;
        };
        documents.push(SpecDocument {
            file_name: doc.file_name.clone(),
            api_name: base.api_name.clone(),
            api_version: base.api_version.clone(),
            base_path: base.base_path.clone(),
        });
        supported_versions
            .entry(base.api_name.clone())
            .or_default()
            .insert(base.api_version.clone());

        let mut templates: Vec<(&str, &Value)> = paths
            .iter()
            .filter_map(|(k, v)| k.as_str().map(|k| (k, v)))
            .collect();
        templates.sort_by_key(|(k, _)| *k);

        for (template, item) in templates {
            let item = match item.get("$ref").and_then(Value::as_str) {
                Some(r) => compiler.resolve_yaml_ref(doc_idx, r)?.1,
                None => item,
            };
            let mut parameters = BTreeMap::new();
            collect_path_parameters(&mut compiler, doc_idx, item, &mut parameters)?;

            let mut operations = BTreeMap::new();
            for method in ["get", "put", "post", "delete", "options", "head", "patch"] {
                let Some(op_node) = item.get(method) else { continue };
                collect_path_parameters(&mut compiler, doc_idx, op_node, &mut parameters)?;
                let op = compile_operation(&mut compiler, doc_idx, method, template, op_node)?;
                operations.insert(method.to_ascii_uppercase(), op);
            }

            let matcher = compile_path_template(template, &parameters, &compiler.arena)
                .map_err(SpecError::BadTemplate)?;
            entries.push(IndexEntry {
                base_path: base.base_path.clone(),
                api_name: base.api_name.clone(),
                api_version: base.api_version.clone(),
                matcher,
                operations,
            });
        }
    }

    // Deterministic entry order regardless of load order.
    entries.sort_by(|a, b| {
        (a.base_path.as_str(), a.matcher.template.as_str())
            .cmp(&(b.base_path.as_str(), b.matcher.template.as_str()))
    });

    let (arena, mut warnings) = compiler.finish_warnings();
    let mut all_warnings = corpus.warnings.clone();
    all_warnings.append(&mut warnings);
    Ok(SpecIndex {
        arena,
        entries,
        supported_versions,
        documents,
        warnings: all_warnings,
        corpus_digest: corpus.digest.clone(),
    })
}

struct BasePathInfo {
    base_path: String,
    api_name: String,
    api_version: String,
}

/// Derives the base path from the first server URL, stripping the apiRoot
/// variable (or any scheme and authority).
fn base_path_of(root: &Value) -> Option<BasePathInfo> {
    let url = root
        .get("servers")
        .and_then(Value::as_sequence)
        .and_then(|s| s.first())
        .and_then(|s| s.get("url"))
        .and_then(Value::as_str)?;
    let path = if let Some(rest) = url.strip_prefix('{') {
        // "{apiRoot}/nnrf-nfm/v1"
        rest.split_once('}').map(|(_, p)| p)?
    } else if let Some(idx) = url.find("://") {
        let after = &url[idx + 3..];
        match after.find('/') {
            Some(slash) => &after[slash..],
            None => "",
        }
    } else {
        url
    };
    let path = path.trim_end_matches('/');
    if !path.starts_with('/') {
        return None;
    }
    let segments: Vec<&str> = path.trim_start_matches('/').split('/').collect();
    let api_name = segments.first()?.to_string();
    let api_version = segments
        .iter()
        .find(|s| is_version_segment(s))?
        .to_string();
    if api_name.is_empty() {
        return None;
    }
    Some(BasePathInfo {
        base_path: path.to_string(),
        api_name,
        api_version,
    })
}

fn is_version_segment(segment: &str) -> bool {
    segment.len() >= 2
        && segment.starts_with('v')
        && segment[1..].bytes().all(|b| b.is_ascii_digit())
}

/// Gathers `in: path` parameter schemas from a path item or operation node.
fn collect_path_parameters(
    compiler: &mut Compiler<'_>,
    doc: usize,
    node: &Value,
    out: &mut BTreeMap<String, SchemaId>,
) -> Result<(), SpecError> {
    let Some(list) = node.get("parameters").and_then(Value::as_sequence) else {
        return Ok(());
    };
    for param in list {
        let param = match param.get("$ref").and_then(Value::as_str) {
            Some(r) => compiler.resolve_yaml_ref(doc, r)?.1,
            None => param,
        };
        let location = param.get("in").and_then(Value::as_str).unwrap_or("");
        if location != "path" {
            continue;
        }
        let Some(name) = param.get("name").and_then(Value::as_str) else {
            continue;
        };
        let Some(schema) = param.get("schema") else { continue };
        let id = compiler.compile_schema(doc, schema)?;
        out.insert(name.to_string(), id);
    }
    Ok(())
}

fn compile_operation(
    compiler: &mut Compiler<'_>,
    doc: usize,
    method: &str,
    template: &str,
    node: &Value,
) -> Result<OperationSpec, SpecError> {
    let operation_id = node
        .get("operationId")
        .and_then(Value::as_str)
        .map(str::to_string)
        .unwrap_or_else(|| format!("{} {}", method.to_ascii_uppercase(), template));

    let mut request_body = BTreeMap::new();
    if let Some(body) = node.get("requestBody") {
        let body = match body.get("$ref").and_then(Value::as_str) {
            Some(r) => compiler.resolve_yaml_ref(doc, r)?.1,
            None => body,
        };
        request_body = compile_content_map(compiler, doc, body.get("content"))?;
    }

    let mut responses = Vec::new();
    if let Some(map) = node.get("responses").and_then(Value::as_mapping) {
        let mut patterns: Vec<(String, &Value)> = map
            .iter()
            .filter_map(|(k, v)| yaml_key_str(k).map(|k| (k, v)))
            .collect();
        patterns.sort_by(|a, b| a.0.cmp(&b.0));
        for (status_pattern, response) in patterns {
            let response = match response.get("$ref").and_then(Value::as_str) {
                Some(r) => compiler.resolve_yaml_ref(doc, r)?.1,
                None => response,
            };
            let content = compile_content_map(compiler, doc, response.get("content"))?;
            let mut required_headers = Vec::new();
            if let Some(headers) = response.get("headers").and_then(Value::as_mapping) {
                for (name, spec) in headers {
                    let Some(name) = name.as_str() else { continue };
                    let required = spec
                        .get("required")
                        .and_then(Value::as_bool)
                        .unwrap_or(false);
                    if required {
                        required_headers.push(name.to_string());
                    }
                }
            }
            responses.push(ResponseSpec {
                status_pattern: status_pattern.to_string(),
                content,
                required_headers,
            });
        }
    }
    if responses.is_empty() {
        compiler.warnings.push(format!(
            "operation {operation_id} declares no responses, default added"
        ));
        responses.push(ResponseSpec {
            status_pattern: "default".to_string(),
            content: BTreeMap::new(),
            required_headers: Vec::new(),
        });
    }

    Ok(OperationSpec {
        method: method.to_ascii_uppercase(),
        operation_id,
        request_body,
        responses,
        callbacks_present: node.get("callbacks").is_some(),
    })
}

/// YAML response keys may parse as numbers (unquoted 200) or strings.
fn yaml_key_str(key: &Value) -> Option<String> {
    match key {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn compile_content_map(
    compiler: &mut Compiler<'_>,
    doc: usize,
    content: Option<&Value>,
) -> Result<BTreeMap<String, SchemaId>, SpecError> {
    let mut out = BTreeMap::new();
    let Some(map) = content.and_then(Value::as_mapping) else {
        return Ok(out);
    };
    for (content_type, media) in map {
        let Some(content_type) = content_type.as_str() else { continue };
        let Some(schema) = media.get("schema") else { continue };
        let id = compiler.compile_schema(doc, schema)?;
        out.insert(normalize_content_type(content_type), id);
    }
    Ok(out)
}

/// Lowercases and strips parameters ("application/JSON; charset=x" ->
/// "application/json").
pub fn normalize_content_type(value: &str) -> String {
    value
        .split(';')
        .next()
        .unwrap_or("")
        .trim()
        .to_ascii_lowercase()
}
