//! Line-delimited JSON trace log. One record per line; field order is fixed
//! and optional fields are omitted when empty, so equal runs give equal bytes.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::IntentionId;
use crate::explain::{Explanation, ExplanationStyle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordKind {
    Adopt,
    Action,
    Subgoal,
    Explain,
    Fail,
    Done,
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordKind::Adopt => "adopt",
            RecordKind::Action => "action",
            RecordKind::Subgoal => "subgoal",
            RecordKind::Explain => "explain",
            RecordKind::Fail => "fail",
            RecordKind::Done => "done",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub kind: RecordKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intention: Option<IntentionId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<IntentionId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<String>,
    pub payload: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<Explanation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub style: Option<ExplanationStyle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl TraceRecord {
    pub fn new(step: u64, kind: RecordKind, payload: impl Into<String>) -> Self {
        TraceRecord {
            step,
            kind,
            intention: None,
            parent: None,
            plan: None,
            payload: payload.into(),
            explanation: None,
            style: None,
            text: None,
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("trace records always serialize")
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {source}")]
    Malformed {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn write_trace(mut out: impl Write, records: &[TraceRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}", r.to_line())?;
    }
    Ok(())
}

/// Blank lines are skipped.
pub fn read_trace(input: impl BufRead) -> Result<Vec<TraceRecord>, TraceError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|source| TraceError::Malformed { line: i + 1, source })?;
        out.push(rec);
    }
    Ok(out)
}
