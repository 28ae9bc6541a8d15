//! Offline evaluation harness: score emitted findings against a labeled
//! ground-truth corpus and report per-rule precision.
//!
//! Ground truth is line-delimited JSON, one record per line:
//! `{"rule": "SYN", "path": "app/src/main/java/A.java", "line": 12, "verdict": "TP"}`.
//! A finding matches a label when rule, path and line agree for any of the
//! finding's locations (column drift in hand-written labels is noise, so
//! columns are ignored). Against a fully labeled corpus, an unmatched
//! finding counts as a false positive.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::ConanError;
use crate::rules::{Finding, RuleId};

/// Hand-assigned label for one expected (or known-spurious) finding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Verdict {
    TP,
    FP,
}

/// One ground-truth record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledFinding {
    pub rule: RuleId,
    pub path: String,
    pub line: u32,
    pub verdict: Verdict,
}

/// Precision cells for one rule.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleScore {
    pub rule: RuleId,
    pub emitted: u64,
    pub matched_tp: u64,
    /// `matched_tp / emitted`; `None` when nothing was emitted.
    pub precision: Option<f64>,
}

/// Per-rule precision plus totals. Every rule has a row, emitted or not.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionReport {
    pub rows: Vec<RuleScore>,
    pub total_emitted: u64,
    pub total_matched_tp: u64,
    pub total_precision: Option<f64>,
}

impl PrecisionReport {
    pub fn row(&self, rule: RuleId) -> &RuleScore {
        self.rows
            .iter()
            .find(|r| r.rule == rule)
            .expect("every rule has a row")
    }
}

#[derive(Deserialize)]
struct RawRecord {
    rule: String,
    path: String,
    line: u32,
    verdict: Verdict,
}

/// Parse a line-delimited JSON ground-truth file. Blank lines are allowed;
/// anything else malformed — bad JSON, unknown rule id — is rejected with
/// the offending line number.
pub fn load_ground_truth(path: &Path) -> Result<Vec<LabeledFinding>, ConanError> {
    let text = fs::read_to_string(path).map_err(|e| ConanError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord = serde_json::from_str(line).map_err(|e| ConanError::TruthFormat {
            line: lineno,
            message: e.to_string(),
        })?;
        let rule: RuleId = raw.rule.parse().map_err(|e| ConanError::TruthFormat {
            line: lineno,
            message: e,
        })?;
        labels.push(LabeledFinding {
            rule,
            path: raw.path,
            line: raw.line,
            verdict: raw.verdict,
        });
    }
    Ok(labels)
}

/// Score findings against ground truth. Pure counting, so the result is
/// invariant under permutation of either input.
pub fn score(findings: &[Finding], truth: &[LabeledFinding]) -> PrecisionReport {
    let tp_keys: BTreeSet<(RuleId, &str, u32)> = truth
        .iter()
        .filter(|l| l.verdict == Verdict::TP)
        .map(|l| (l.rule, l.path.as_str(), l.line))
        .collect();

    let mut rows: Vec<RuleScore> = RuleId::ALL
        .into_iter()
        .map(|rule| RuleScore {
            rule,
            emitted: 0,
            matched_tp: 0,
            precision: None,
        })
        .collect();

    for f in findings {
        let row = rows
            .iter_mut()
            .find(|r| r.rule == f.rule)
            .expect("all rules present");
        row.emitted += 1;
        let matched = f
            .locations
            .iter()
            .any(|loc| tp_keys.contains(&(f.rule, loc.path.as_str(), loc.line)));
        if matched {
            row.matched_tp += 1;
        }
    }

    for row in &mut rows {
        if row.emitted > 0 {
            row.precision = Some(row.matched_tp as f64 / row.emitted as f64);
        }
    }

    let total_emitted: u64 = rows.iter().map(|r| r.emitted).sum();
    let total_matched_tp: u64 = rows.iter().map(|r| r.matched_tp).sum();
    let total_precision = if total_emitted > 0 {
        Some(total_matched_tp as f64 / total_emitted as f64)
    } else {
        None
    };

    PrecisionReport {
        rows,
        total_emitted,
        total_matched_tp,
        total_precision,
    }
}
