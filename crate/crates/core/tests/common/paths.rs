//! Generative checks over fixture path templates, shared by the focused
//! and acceptance suites.

use rand::prelude::*;

use sbilint_core::openapi::{IndexEntry, LookupOutcome, SpecIndex};

use super::{fixture_sources, index_of_sources, pattern_gen, CONFORMANCE_FIXTURES};

/// Renders one conforming (suffix, full path) pair for an entry's template.
fn render_conforming(entry: &IndexEntry, rng: &mut StdRng) -> (String, String) {
    let mut suffix = String::new();
    let mut param_index = 0usize;
    for segment in entry.matcher.template[1..].split('/') {
        suffix.push('/');
        let mut rest = segment;
        while let Some(open) = rest.find('{') {
            suffix.push_str(&rest[..open]);
            let close = rest[open..].find('}').expect("balanced template") + open;
            let pattern = entry.matcher.parameter_patterns[param_index].as_deref();
            param_index += 1;
            let value = pattern
                .and_then(|p| pattern_gen::sample(p, rng))
                .unwrap_or_else(|| {
                    let len = rng.random_range(1..14usize);
                    (0..len)
                        .map(|_| {
                            let alphabet =
                                b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-";
                            char::from(alphabet[rng.random_range(0..alphabet.len())])
                        })
                        .collect()
                });
            suffix.push_str(&value);
            rest = &rest[close + 1..];
        }
        suffix.push_str(rest);
    }
    let full = format!("{}{}", entry.base_path, suffix);
    (suffix, full)
}

/// Flips one character inside a fully literal segment.
fn mutate_literal(entry: &IndexEntry, suffix: &str, rng: &mut StdRng) -> Option<String> {
    let template_segments: Vec<&str> = entry.matcher.template[1..].split('/').collect();
    let path_segments: Vec<&str> = suffix[1..].split('/').collect();
    assert_eq!(template_segments.len(), path_segments.len());
    let literal_positions: Vec<usize> = template_segments
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.contains('{') && !s.is_empty())
        .map(|(i, _)| i)
        .collect();
    if literal_positions.is_empty() {
        return None;
    }
    let target = literal_positions[rng.random_range(0..literal_positions.len())];
    let mut mutated_segments: Vec<String> =
        path_segments.iter().map(|s| s.to_string()).collect();
    let segment = &mut mutated_segments[target];
    let pos = rng.random_range(0..segment.len());
    let original = segment.as_bytes()[pos];
    let replacement = if original == b'Z' { b'Q' } else { b'Z' };
    let mut bytes = segment.clone().into_bytes();
    bytes[pos] = replacement;
    *segment = String::from_utf8(bytes).expect("ascii mutation");
    Some(format!("/{}", mutated_segments.join("/")))
}


pub fn conforming_paths_match_and_mutated_paths_fail() {
    let mut rng = StdRng::seed_from_u64(0x9a71);
    for (fixture, _) in CONFORMANCE_FIXTURES {
        let index = index_of_sources(&fixture_sources(fixture));
        for entry in index.entries() {
            for _ in 0..100 {
                let (suffix, full) = render_conforming(entry, &mut rng);
                assert!(
                    entry.matcher.matches(&suffix),
                    "{fixture}: conforming suffix {suffix:?} must match {:?}",
                    entry.matcher.template
                );
                let method = entry.operations.keys().next().expect("operation");
                assert!(
                    matches!(index.lookup_operation(method, &full), LookupOutcome::Match(_)),
                    "{fixture}: lookup must bind {full:?}"
                );
            }
            let mut mutated_count = 0;
            while mutated_count < 100 {
                let (suffix, _) = render_conforming(entry, &mut rng);
                let Some(mutated) = mutate_literal(entry, &suffix, &mut rng) else {
                    break;
                };
                assert!(
                    !entry.matcher.matches(&mutated),
                    "{fixture}: mutated literal {mutated:?} must not match {:?}",
                    entry.matcher.template
                );
                mutated_count += 1;
            }
            assert!(
                mutated_count == 100,
                "{fixture}: template {:?} has a literal segment to mutate",
                entry.matcher.template
            );
        }
    }
}

fn lookup_signature(index: &SpecIndex, probes: &[(String, String)]) -> Vec<String> {
    probes
        .iter()
        .map(|(method, path)| match index.lookup_operation(method, path) {
            LookupOutcome::Match(m) => format!(
                "{}:{}{}",
                m.operation.operation_id, m.entry.base_path, m.entry.matcher.template
            ),
            LookupOutcome::NoMatch(reason) => format!("{reason:?}"),
        })
        .collect()
}


pub fn lookup_is_invariant_under_load_order() {
    let mut rng = StdRng::seed_from_u64(0xd15c0);
    for (fixture, _) in CONFORMANCE_FIXTURES {
        let mut sources = fixture_sources(fixture);
        let baseline = index_of_sources(&sources);

        // Probe set: conforming paths for every entry plus some misses.
        let mut probes: Vec<(String, String)> = Vec::new();
        for entry in baseline.entries() {
            for _ in 0..10 {
                let (_, full) = render_conforming(entry, &mut rng);
                for method in entry.operations.keys() {
                    probes.push((method.clone(), full.clone()));
                }
                probes.push(("TRACE".to_string(), full));
            }
        }
        probes.push(("GET".to_string(), "/unknown-api/v1/x".to_string()));
        let expected = lookup_signature(&baseline, &probes);

        for _ in 0..4 {
            sources.shuffle(&mut rng);
            let shuffled = index_of_sources(&sources);
            assert_eq!(
                lookup_signature(&shuffled, &probes),
                expected,
                "{fixture}: lookups must not depend on document order"
            );
        }
    }
}

pub fn sampled_pattern_values_satisfy_their_pattern() {
    let mut rng = StdRng::seed_from_u64(31337);
    for (fixture, _) in CONFORMANCE_FIXTURES {
        let index = index_of_sources(&fixture_sources(fixture));
        for entry in index.entries() {
            for pattern in entry.matcher.parameter_patterns.iter().flatten() {
                for _ in 0..50 {
                    if let Some(sample) = pattern_gen::sample(pattern, &mut rng) {
                        let re = fancy_regex::Regex::new(pattern).expect("pattern compiles");
                        assert!(
                            re.is_match(&sample).unwrap_or(false),
                            "sample {sample:?} must satisfy {pattern:?}"
                        );
                    }
                }
            }
        }
    }
}
