//! End-to-end pipeline: capture file in, report out.
//!
//! Decoding and correlation are sequential (HPACK and pairing depend on
//! order); validating the finished exchanges is data-parallel. The `workers`
//! knob exists to prove scheduling does not affect output: any worker count
//! produces the identical report.

use std::collections::BTreeSet;
use std::path::Path;

use crate::capture::{
    assemble_messages, read_capture, read_capture_bytes, reassemble_tcp, CaptureError,
    DecodeOptions,
};
use crate::correlate::{
    augment_headers, link_subscriptions, match_operation, pair_exchanges, HttpExchange,
    DEFAULT_CALLBACK_PROPERTIES,
};
use crate::openapi::SpecIndex;
use crate::report::{Report, ReportFinding};
use crate::validate::{validate_exchange, ExchangeValidationOptions, Finding, RuleId};

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Validation worker threads: 1 forces the sequential path, 0 lets the
    /// thread pool decide.
    pub workers: usize,
    /// Bodies above this size are skipped with a diagnostic.
    pub max_body: usize,
    /// Findings with these rules are dropped from the report.
    pub disabled_rules: BTreeSet<RuleId>,
    /// Frames that must chain for mid-stream HTTP/2 detection.
    pub detect_chain: usize,
    /// Request body properties treated as callback registrations.
    pub callback_properties: Vec<String>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            workers: 0,
            max_body: 4 * 1024 * 1024,
            disabled_rules: BTreeSet::new(),
            detect_chain: crate::capture::http2::DEFAULT_DETECT_CHAIN,
            callback_properties: DEFAULT_CALLBACK_PROPERTIES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

/// A finished run over one capture.
#[derive(Debug)]
pub struct PipelineResult {
    pub report: Report,
    /// Operational diagnostics (decoder warnings, skipped bodies); these go
    /// to stderr, not into the report.
    pub diagnostics: Vec<String>,
}

pub fn lint_capture(
    index: &SpecIndex,
    capture_path: &Path,
    options: &PipelineOptions,
) -> Result<PipelineResult, CaptureError> {
    let read = read_capture(capture_path)?;
    Ok(lint_packets(
        index,
        &capture_path.display().to_string(),
        read,
        options,
    ))
}

pub fn lint_capture_bytes(
    index: &SpecIndex,
    capture_name: &str,
    bytes: &[u8],
    options: &PipelineOptions,
) -> Result<PipelineResult, CaptureError> {
    let read = read_capture_bytes(bytes)?;
    Ok(lint_packets(index, capture_name, read, options))
}

fn lint_packets(
    index: &SpecIndex,
    capture_name: &str,
    read: crate::capture::CaptureRead,
    options: &PipelineOptions,
) -> PipelineResult {
    let mut diagnostics = read.warnings.clone();

    let streams = reassemble_tcp(&read.packets);
    let decode_options = DecodeOptions {
        detect_chain: options.detect_chain,
    };
    let decoded = assemble_messages(&streams, &decode_options);
    diagnostics.extend(decoded.warnings.iter().cloned());

    let mut exchanges = pair_exchanges(decoded.messages);
    for exchange in &mut exchanges {
        match_operation(exchange, index);
        augment_headers(exchange, index);
    }
    let callback_properties: Vec<&str> = options
        .callback_properties
        .iter()
        .map(String::as_str)
        .collect();
    link_subscriptions(&mut exchanges, &callback_properties);

    let validation_options = ExchangeValidationOptions {
        max_body: options.max_body,
    };
    let results = validate_exchanges(&exchanges, index, &validation_options, options.workers);

    let mut findings: Vec<ReportFinding> = Vec::new();
    for (idx, (exchange, (validated, diags))) in exchanges.iter().zip(results).enumerate() {
        diagnostics.extend(diags);
        for finding in exchange.findings.iter().cloned().chain(validated) {
            if options.disabled_rules.contains(&finding.rule) {
                continue;
            }
            findings.push(ReportFinding {
                exchange: Some(idx),
                finding,
            });
        }
    }

    let report = Report::assemble(&index.corpus_digest, capture_name, &exchanges, findings);
    PipelineResult {
        report,
        diagnostics,
    }
}

type ExchangeResult = (Vec<Finding>, Vec<String>);

/// Validates every exchange, on one thread or many. Output order always
/// follows input order, so worker count never changes the report.
pub fn validate_exchanges(
    exchanges: &[HttpExchange],
    index: &SpecIndex,
    options: &ExchangeValidationOptions,
    workers: usize,
) -> Vec<ExchangeResult> {
    #[cfg(feature = "parallel")]
    {
        if workers != 1 {
            return validate_exchanges_parallel(exchanges, index, options, workers);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    validate_exchanges_sequential(exchanges, index, options)
}

/// Plain single-threaded validation pass.
pub fn validate_exchanges_sequential(
    exchanges: &[HttpExchange],
    index: &SpecIndex,
    options: &ExchangeValidationOptions,
) -> Vec<ExchangeResult> {
    exchanges
        .iter()
        .map(|e| validate_exchange(e, index, options))
        .collect()
}

/// Rayon-backed validation pass.
#[cfg(feature = "parallel")]
pub fn validate_exchanges_parallel(
    exchanges: &[HttpExchange],
    index: &SpecIndex,
    options: &ExchangeValidationOptions,
    workers: usize,
) -> Vec<ExchangeResult> {
    use rayon::prelude::*;

    let run = || {
        exchanges
            .par_iter()
            .map(|e| validate_exchange(e, index, options))
            .collect()
    };
    if workers == 0 {
        return run();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(run),
        Err(_) => validate_exchanges_sequential(exchanges, index, options),
    }
}
