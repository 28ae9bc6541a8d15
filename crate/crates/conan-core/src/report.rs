//! Canonical report serialization: machine-readable JSON plus a derived,
//! self-contained HTML view grouped per rule.
//!
//! JSON is the source of truth — fixed key order, no timestamps, no
//! machine-specific fields — so two runs over the same tree are
//! byte-identical and golden files stay stable. The HTML embeds ±3 lines
//! of source around each finding with the finding line highlighted.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::ConanError;
use crate::project::ProjectModel;
use crate::rules::{Finding, RuleCategory, RuleId};

/// Current JSON schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Per-rule finding count (only rules with findings appear).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCount {
    pub rule: RuleId,
    pub category: RuleCategory,
    pub count: u64,
}

/// The full analysis result for one project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    /// Project display name (the analyzed root's base name — no absolute
    /// paths anywhere in the report).
    pub project: String,
    pub summary: Vec<RuleCount>,
    pub findings: Vec<Finding>,
    pub diagnostics: Vec<String>,
}

impl Report {
    /// Assemble a report; the summary is derived from the findings.
    pub fn new(project: &ProjectModel, findings: Vec<Finding>) -> Report {
        let mut summary: Vec<RuleCount> = Vec::new();
        for rule in RuleId::ALL {
            let count = findings.iter().filter(|f| f.rule == rule).count() as u64;
            if count > 0 {
                summary.push(RuleCount {
                    rule,
                    category: rule.category(),
                    count,
                });
            }
        }
        Report {
            schema_version: SCHEMA_VERSION,
            tool_version: crate::TOOL_VERSION.to_string(),
            project: project.name.clone(),
            summary,
            findings,
            diagnostics: project.diagnostics.clone(),
        }
    }

    /// Canonical JSON bytes (pretty-printed, trailing newline).
    pub fn to_json(&self) -> Vec<u8> {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text.into_bytes()
    }

    /// Parse bytes produced by [`Report::to_json`].
    pub fn from_json(bytes: &[u8]) -> Result<Report, ConanError> {
        serde_json::from_slice(bytes)
            .map_err(|e| ConanError::FatalParse(format!("report JSON: {e}")))
    }

    /// Render the HTML view, pulling snippets through `source`.
    pub fn to_html(&self, source: &dyn SnippetSource) -> Vec<u8> {
        render_html(self, source).into_bytes()
    }
}

/// Where the HTML renderer gets source text for snippets. Returning `None`
/// (file unreadable, deleted, whatever) degrades that finding to a
/// location-only rendering — never an error.
pub trait SnippetSource {
    fn lines(&self, path: &str) -> Option<Vec<String>>;
}

/// Reads snippet text from files under a root directory.
pub struct FsSnippetSource {
    root: PathBuf,
}

impl FsSnippetSource {
    pub fn new(root: impl Into<PathBuf>) -> FsSnippetSource {
        FsSnippetSource { root: root.into() }
    }
}

impl SnippetSource for FsSnippetSource {
    fn lines(&self, path: &str) -> Option<Vec<String>> {
        let text = fs::read_to_string(self.root.join(path)).ok()?;
        Some(text.lines().map(str::to_string).collect())
    }
}

/// A snippet source with no sources — every finding renders location-only.
pub struct NoSnippets;

impl SnippetSource for NoSnippets {
    fn lines(&self, _path: &str) -> Option<Vec<String>> {
        None
    }
}

fn rule_description(rule: RuleId) -> &'static str {
    match rule {
        RuleId::INP => "The app triggers network requests but does not declare the INTERNET permission, so every request will fail at runtime.",
        RuleId::ACP => "Connectivity state APIs are used without the ACCESS_NETWORK_STATE permission required to query them.",
        RuleId::NP => "The connection status (isConnected/onAvailable) is never checked anywhere in the project before network requests.",
        RuleId::NM => "A method triggers network requests without any connection status check reachable in its call scope.",
        RuleId::TP => "The active network type (getType/hasTransport) is never checked anywhere in the project.",
        RuleId::TM => "A method triggers network requests without any network type check reachable in its call scope.",
        RuleId::IP => "Internet availability (hasCapability with an Internet capability) is never checked anywhere in the project.",
        RuleId::IM => "A method triggers network requests without any Internet capability check reachable in its call scope.",
        RuleId::AMN => "No activity declares the MANAGE_NETWORK_USAGE intent filter, leaving users without an in-app network usage control screen.",
        RuleId::RI => "An asynchronous request is sent without implementing the response callback, so results are silently dropped.",
        RuleId::RB => "A response body is consumed without a null check and may crash on empty responses.",
        RuleId::RC => "The HTTP status code of a response is never verified, so error responses are processed as success.",
        RuleId::OF => "Request failures are unhandled: no failure callback, or no try/catch with a non-empty catch block around a blocking call.",
        RuleId::SYN => "A synchronous network request blocks the calling thread and freezes the UI when connectivity is slow or absent.",
        RuleId::WM => "A legacy job scheduling API is imported; WorkManager is the supported replacement.",
        RuleId::OK => "Multiple OkHttpClient instances are constructed; each duplicates connection and thread pools.",
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}

fn render_snippet(html: &mut String, lines: &[String], line: u32) {
    let line = line as usize;
    let first = line.saturating_sub(3).max(1);
    let last = (line + 3).min(lines.len());
    if first > lines.len() || last < first {
        return;
    }
    html.push_str("<pre class=\"snippet\">");
    for n in first..=last {
        let text = escape(&lines[n - 1]);
        if n == line {
            let _ = writeln!(html, "<span class=\"hl\">{n:>5} | {text}</span>");
        } else {
            let _ = writeln!(html, "{n:>5} | {text}");
        }
    }
    html.push_str("</pre>\n");
}

fn render_html(report: &Report, source: &dyn SnippetSource) -> String {
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(
        html,
        "<title>Connectivity report: {}</title>",
        escape(&report.project)
    );
    html.push_str(
        "<style>\n\
         body { font-family: sans-serif; margin: 2em auto; max-width: 60em; color: #222; }\n\
         h2 { border-bottom: 2px solid #ccc; padding-bottom: 0.2em; margin-top: 2em; }\n\
         .category { color: #666; font-size: 0.85em; margin-left: 0.6em; }\n\
         .finding { border: 1px solid #ddd; border-left: 4px solid #c90; border-radius: 4px;\n\
                    padding: 0.7em 1em; margin: 1em 0; }\n\
         .locations { color: #444; font-family: monospace; font-size: 0.9em; margin: 0.4em 0; }\n\
         .snippet { background: #f6f6f6; border-radius: 4px; padding: 0.6em; overflow-x: auto; }\n\
         .hl { background: #ffe9a8; display: inline-block; width: 100%; }\n\
         .meta { color: #666; font-size: 0.9em; }\n\
         .diag { color: #855; font-size: 0.9em; }\n\
         </style>\n</head>\n<body>\n",
    );
    let _ = write!(
        html,
        "<h1>Connectivity report: {}</h1>\n<p class=\"meta\">tool version {} &middot; {} finding(s)</p>\n",
        escape(&report.project),
        escape(&report.tool_version),
        report.findings.len()
    );

    if report.findings.is_empty() {
        html.push_str("<p>No connectivity issues found.</p>\n");
    }

    for entry in &report.summary {
        let rule = entry.rule;
        let _ = write!(
            html,
            "<h2>{} <span class=\"category\">{} &middot; {} finding(s)</span></h2>\n<p>{}</p>\n",
            rule,
            rule.category(),
            entry.count,
            escape(rule_description(rule))
        );
        for finding in report.findings.iter().filter(|f| f.rule == rule) {
            let _ = writeln!(html, "<div class=\"finding\" data-rule=\"{rule}\">");
            let _ = writeln!(html, "<p>{}</p>", escape(&finding.message));
            html.push_str("<div class=\"locations\">");
            for (i, loc) in finding.locations.iter().enumerate() {
                if i > 0 {
                    html.push_str("<br>");
                }
                let _ = write!(html, "{}", escape(&loc.to_string()));
            }
            html.push_str("</div>\n");
            if let Some(loc) = finding.locations.first() {
                if let Some(lines) = source.lines(&loc.path) {
                    render_snippet(&mut html, &lines, loc.line);
                }
            }
            html.push_str("</div>\n");
        }
    }

    if !report.diagnostics.is_empty() {
        html.push_str("<h2>Analysis diagnostics</h2>\n");
        for d in &report.diagnostics {
            let _ = writeln!(html, "<p class=\"diag\">{}</p>", escape(d));
        }
    }

    html.push_str("</body>\n</html>\n");
    html
}
