//! Command line entry point: compile the spec corpus, decode each capture,
//! validate, and print a deterministic report.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use sbilint_core::pipeline::{lint_capture, PipelineOptions};
use sbilint_core::report::{render_json, render_text, Report};
use sbilint_core::validate::RuleId;
use sbilint_core::{load_spec_dir, Severity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FailOn {
    Error,
    Warning,
    Info,
}

impl FailOn {
    fn threshold(self) -> Severity {
        match self {
            FailOn::Error => Severity::Error,
            FailOn::Warning => Severity::Warning,
            FailOn::Info => Severity::Info,
        }
    }
}

/// Checks captured 5G SBI traffic against 3GPP OpenAPI documents.
#[derive(Debug, Parser)]
#[command(name = "sbilint", version, about)]
struct Args {
    /// Directory containing the OpenAPI YAML documents.
    #[arg(long, required = true)]
    specs: PathBuf,

    /// Capture file to lint (PCAP or PCAPNG); repeatable.
    #[arg(long, required = true)]
    pcap: Vec<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,

    /// Lowest severity that makes the run exit non-zero.
    #[arg(long, value_enum, default_value_t = FailOn::Error)]
    fail_on: FailOn,

    /// Drop findings with this rule id; repeatable.
    #[arg(long = "rule-disable", value_name = "RULE_ID")]
    rule_disable: Vec<String>,

    /// Bodies above this many bytes are skipped.
    #[arg(long, default_value_t = 4 * 1024 * 1024)]
    max_body: usize,

    /// Validation worker threads (0 = automatic, 1 = sequential).
    #[arg(long, default_value_t = 0)]
    workers: usize,

    /// Frames that must chain before mid-stream HTTP/2 is accepted.
    #[arg(long, default_value_t = 3)]
    detect_chain: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("sbilint: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(args: Args) -> Result<ExitCode, String> {
    let mut disabled_rules = BTreeSet::new();
    for rule in &args.rule_disable {
        disabled_rules.insert(rule.parse::<RuleId>()?);
    }

    let index = load_spec_dir(&args.specs).map_err(|e| e.to_string())?;
    for warning in &index.warnings {
        eprintln!("sbilint: spec warning: {warning}");
    }

    let options = PipelineOptions {
        workers: args.workers,
        max_body: args.max_body,
        disabled_rules,
        detect_chain: args.detect_chain,
        ..PipelineOptions::default()
    };

    let mut reports: Vec<Report> = Vec::new();
    for pcap in &args.pcap {
        let result = lint_capture(&index, pcap, &options).map_err(|e| e.to_string())?;
        for diagnostic in &result.diagnostics {
            eprintln!("sbilint: {}: {diagnostic}", pcap.display());
        }
        reports.push(result.report);
    }

    let mut failed = false;
    let threshold = args.fail_on.threshold();
    for report in &reports {
        if report
            .findings
            .iter()
            .any(|f| f.finding.severity >= threshold)
        {
            failed = true;
        }
        match args.format {
            OutputFormat::Text => print!("{}", render_text(report)),
            // One canonical JSON document per capture, newline-terminated
            // (JSON Lines when several captures are given).
            OutputFormat::Json => print!("{}", render_json(report)),
        }
    }

    Ok(if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}
