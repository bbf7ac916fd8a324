//! Human-readable and JSON renderings of parse reports, plus the
//! tab-separated trace stream.

use std::fmt::Write as _;

use serde::Serialize;

use crate::atom::format_number;
use crate::chart::{extract_parses, EdgeId, ParseError, ParseReport, ParseTree, ParserConfig, TraceEvent};
use crate::io::syntax::render_fs;

fn field(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), format_number)
}

/// One line: `step KIND ids strength activation detail`, tab-separated.
pub fn trace_line(e: &TraceEvent) -> String {
    let ids: Vec<String> = e.edges.iter().map(|i| i.to_string()).collect();
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}",
        e.step,
        e.kind,
        ids.join(","),
        field(e.strength),
        field(e.activation),
        e.detail
    )
}

pub fn trace_tsv(report: &ParseReport) -> String {
    let mut out = String::new();
    for e in &report.trace {
        out.push_str(&trace_line(e));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Parsed,
    NoParse,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParseJson {
    pub rank: usize,
    pub edge: EdgeId,
    pub activation: f64,
    pub bracketing: String,
    pub tree: ParseTree,
    pub fs: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuspendedJson {
    pub edge: EdgeId,
    pub start: usize,
    pub end: usize,
    pub category: String,
    pub active: bool,
    pub activation: f64,
    pub reason: String,
}

/// Result for one input sentence. Every key is always present.
#[derive(Debug, Clone, Serialize)]
pub struct SentenceJson {
    pub sentence: String,
    pub tokens: Vec<String>,
    pub status: Status,
    pub error: Option<String>,
    pub truncated: bool,
    pub steps: usize,
    pub parses: Vec<ParseJson>,
    pub suspended: Vec<SuspendedJson>,
    pub trace: Vec<TraceEvent>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Document<'a> {
    pub config: &'a ParserConfig,
    pub sentences: Vec<SentenceJson>,
}

impl SentenceJson {
    pub fn new(sentence: &str, result: &Result<ParseReport, ParseError>, n_best: usize, trace: bool) -> SentenceJson {
        let tokens = sentence.split_whitespace().map(str::to_string).collect();
        let report = match result {
            Ok(r) => r,
            Err(e) => {
                return SentenceJson {
                    sentence: sentence.to_string(),
                    tokens,
                    status: Status::Error,
                    error: Some(e.to_string()),
                    truncated: false,
                    steps: 0,
                    parses: Vec::new(),
                    suspended: Vec::new(),
                    trace: Vec::new(),
                }
            }
        };
        let parses: Vec<ParseJson> = extract_parses(report, n_best)
            .into_iter()
            .enumerate()
            .map(|(i, p)| ParseJson {
                rank: i + 1,
                edge: p.edge,
                activation: p.activation,
                bracketing: p.tree.to_string(),
                tree: p.tree,
                fs: render_fs(&p.fs),
            })
            .collect();
        let suspended = report
            .suspended
            .iter()
            .map(|s| {
                let e = report.edge(s.edge);
                SuspendedJson {
                    edge: s.edge,
                    start: e.start,
                    end: e.end,
                    category: e.category(),
                    active: e.is_active(),
                    activation: e.activation,
                    reason: s.reason.clone(),
                }
            })
            .collect();
        SentenceJson {
            sentence: sentence.to_string(),
            tokens,
            status: if parses.is_empty() { Status::NoParse } else { Status::Parsed },
            error: None,
            truncated: report.truncated,
            steps: report.steps,
            parses,
            suspended,
            trace: if trace { report.trace.clone() } else { Vec::new() },
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {}", self.sentence);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error: {e}");
            return out;
        }
        if self.parses.is_empty() {
            let _ = writeln!(out, "no spanning parse");
        }
        for p in &self.parses {
            let _ = writeln!(out, "parse {}: activation {:.6} (edge {})", p.rank, p.activation, p.edge);
            let _ = writeln!(out, "  tree: {}", p.bracketing);
            let _ = writeln!(out, "  fs:   {}", p.fs);
        }
        let _ = writeln!(out, "suspended edges: {}", self.suspended.len());
        if self.truncated {
            let _ = writeln!(out, "truncated after {} steps", self.steps);
        }
        if !self.trace.is_empty() {
            let _ = writeln!(out, "trace:");
            for e in &self.trace {
                let _ = writeln!(out, "{}", trace_line(e));
            }
        }
        out
    }
}
