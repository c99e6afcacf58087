//! Deterministic report assembly and rendering.
//!
//! Reports with equal content render byte-identically: findings are sorted
//! by (frame, pointer, rule), counters are recomputed from the findings, and
//! the JSON form serializes through a sorted-key value tree.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::correlate::{HttpExchange, LinkKind, VersionStatus};
use crate::validate::{Finding, Severity};

/// Exchange metadata carried in the report next to the findings.
#[derive(Debug, Clone, Serialize)]
pub struct ExchangeSummary {
    pub first_frame: u32,
    pub last_frame: u32,
    pub method: Option<String>,
    pub path: Option<String>,
    pub operation_id: Option<String>,
    pub status: Option<u16>,
    pub version_status: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub links: Vec<LinkSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub augmented_headers: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinkSummary {
    pub kind: String,
    pub exchange: usize,
}

/// One finding plus the exchange it belongs to.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFinding {
    pub exchange: Option<usize>,
    #[serde(flatten)]
    pub finding: Finding,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Counters {
    pub total: u64,
    pub by_rule: BTreeMap<String, u64>,
    pub by_severity: BTreeMap<String, u64>,
}

/// Everything the linter has to say about one capture file.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub spec_digest: String,
    pub capture_file: String,
    pub exchanges: Vec<ExchangeSummary>,
    pub findings: Vec<ReportFinding>,
    pub counters: Counters,
}

impl Report {
    pub fn assemble(
        spec_digest: &str,
        capture_file: &str,
        exchanges: &[HttpExchange],
        mut findings: Vec<ReportFinding>,
    ) -> Report {
        findings.sort_by(|a, b| {
            (
                a.finding.frame_number,
                a.finding.json_pointer.as_str(),
                a.finding.rule,
            )
                .cmp(&(
                    b.finding.frame_number,
                    b.finding.json_pointer.as_str(),
                    b.finding.rule,
                ))
        });
        let counters = recompute_counters(&findings);
        let summaries = exchanges.iter().map(summarize).collect();
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            spec_digest: spec_digest.to_string(),
            capture_file: capture_file.to_string(),
            exchanges: summaries,
            findings,
            counters,
        }
    }

    /// Highest severity present, if any finding exists.
    pub fn max_severity(&self) -> Option<Severity> {
        self.findings.iter().map(|f| f.finding.severity).max()
    }
}

fn summarize(exchange: &HttpExchange) -> ExchangeSummary {
    let first_frame = exchange
        .request
        .as_ref()
        .or(exchange.response.as_ref())
        .map(|m| m.first_frame)
        .unwrap_or(0);
    let last_frame = exchange
        .response
        .as_ref()
        .or(exchange.request.as_ref())
        .map(|m| m.last_frame)
        .unwrap_or(first_frame);
    let version_status = match &exchange.version_status {
        VersionStatus::Ok => "ok".to_string(),
        VersionStatus::Unsupported {
            api_name,
            found,
            expected,
        } => format!("unsupported: {api_name} {found} (loaded {expected})"),
    };
    ExchangeSummary {
        first_frame,
        last_frame,
        method: exchange.request_method().map(str::to_string),
        path: exchange.request_path().map(str::to_string),
        operation_id: exchange.bound.as_ref().map(|b| b.operation_id.clone()),
        status: exchange.response_status(),
        version_status,
        links: exchange
            .links
            .iter()
            .map(|l| LinkSummary {
                kind: match l.kind {
                    LinkKind::Subscription => "subscription".to_string(),
                    LinkKind::Notification => "notification".to_string(),
                },
                exchange: l.other,
            })
            .collect(),
        augmented_headers: exchange
            .augmentations
            .iter()
            .map(|a| format!("{} ({})", a.header, a.source.as_str()))
            .collect(),
        notes: exchange.notes.clone(),
    }
}

pub fn recompute_counters(findings: &[ReportFinding]) -> Counters {
    let mut counters = Counters::default();
    for f in findings {
        counters.total += 1;
        *counters
            .by_rule
            .entry(f.finding.rule.as_str().to_string())
            .or_default() += 1;
        *counters
            .by_severity
            .entry(f.finding.severity.as_str().to_string())
            .or_default() += 1;
    }
    counters
}

/// Plain-text rendering: one line per finding plus a counter block.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "capture {}: {} exchanges, {} findings (spec corpus sha256:{})\n",
        report.capture_file,
        report.exchanges.len(),
        report.counters.total,
        &report.spec_digest[..report.spec_digest.len().min(12)],
    ));
    for f in &report.findings {
        let (method, path) = match f.exchange.and_then(|i| report.exchanges.get(i)) {
            Some(summary) => (
                summary.method.clone().unwrap_or_else(|| "-".to_string()),
                summary.path.clone().unwrap_or_else(|| "-".to_string()),
            ),
            None => ("-".to_string(), "-".to_string()),
        };
        out.push_str(&format!(
            "frame {:<5} {:<8} {:<24} {} {}  {}: {}\n",
            f.finding.frame_number,
            f.finding.severity,
            f.finding.rule,
            method,
            path,
            f.finding.json_pointer,
            f.finding.message,
        ));
    }
    out.push_str("summary:\n");
    if report.counters.total == 0 {
        out.push_str("  0 findings\n");
        return out;
    }
    for (severity, count) in &report.counters.by_severity {
        out.push_str(&format!("  {severity}: {count}\n"));
    }
    for (rule, count) in &report.counters.by_rule {
        out.push_str(&format!("  {rule}: {count}\n"));
    }
    out
}

/// Canonical JSON rendering: sorted object keys, newline-terminated.
pub fn render_json(report: &Report) -> String {
    // Going through Value sorts the object keys (its map is ordered).
    let value = serde_json::to_value(report).expect("report serializes");
    let mut text = serde_json::to_string(&value).expect("value serializes");
    text.push('\n');
    text
}
