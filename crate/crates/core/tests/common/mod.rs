//! Shared helpers for the integration and acceptance suites.

pub mod generators;
pub mod rfc7541;
pub mod hpack_encoder;
pub mod oracle;
pub mod paths;
pub mod pattern_gen;

use std::path::{Path, PathBuf};

use sbilint_core::openapi::{compile_corpus, SpecCorpus, SpecIndex};

pub fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture_dir(name: &str) -> PathBuf {
    repo_root().join("fixtures").join(name)
}

pub fn fixture_index(name: &str) -> SpecIndex {
    sbilint_core::load_spec_dir(&fixture_dir(name).join("spec"))
        .unwrap_or_else(|e| panic!("fixture spec {name} loads: {e}"))
}

pub fn fixture_pcap(name: &str, file: &str) -> Vec<u8> {
    let path = fixture_dir(name).join(file);
    std::fs::read(&path).unwrap_or_else(|e| panic!("fixture {} reads: {e}", path.display()))
}

/// Loads the fixture's spec sources for shuffle tests.
pub fn fixture_sources(name: &str) -> Vec<(String, String)> {
    let dir = fixture_dir(name).join("spec");
    let mut sources = Vec::new();
    for entry in std::fs::read_dir(&dir).expect("spec dir") {
        let path = entry.expect("dir entry").path();
        if path.extension().is_some_and(|e| e == "yaml") {
            sources.push((
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&path).expect("spec source"),
            ));
        }
    }
    sources
}

pub fn index_of_sources(sources: &[(String, String)]) -> SpecIndex {
    compile_corpus(&SpecCorpus::from_sources(sources)).expect("sources compile")
}

/// Every conformance fixture directory with the rules its bad capture must
/// produce (and nothing else); good captures must be clean.
pub const CONFORMANCE_FIXTURES: &[(&str, &[&str])] = &[
    ("empty_nf_service_list", &["MIN_ITEMS"]),
    ("udr_api_version", &["UNSUPPORTED_API_VERSION"]),
    ("subscription_id_format", &["PATTERN_MISMATCH"]),
    ("nf_profile_no_address", &["ANYOF_NONE"]),
    ("allowed_ssc_modes", &["MAX_ITEMS"]),
    ("hal_content_type", &["CONTENT_TYPE_MISMATCH"]),
    ("confirm_auth_null", &["NULL_NOT_ALLOWED", "LOCATION_HEADER_MISSING"]),
    ("nulled_nf_instances", &["NULL_NOT_ALLOWED"]),
    ("age_of_location", &["RANGE_VIOLATION"]),
    ("wrapped_subscr_cond", &["ONEOF_NONE"]),
    ("boolean_auth_result", &["ANYOF_NONE"]),
    ("sd_encoding", &["PATTERN_MISMATCH"]),
];
