//! Reports produced by the command-line tool.

use serde::Serialize;
use serde_json::Value as Json;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelDigest {
    pub path: String,
    pub sha256: String,
}

impl ModelDigest {
    pub fn of(path: &str, bytes: &[u8]) -> ModelDigest {
        let hash = Sha256::digest(bytes);
        ModelDigest {
            path: path.to_string(),
            sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

/// One command's outcome. The human-readable text is rendered from the
/// same structure that is written as JSON.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub command: Vec<String>,
    pub models: Vec<ModelDigest>,
    pub exit_code: i32,
    /// `None` for commands that check no property.
    pub verdict: Option<bool>,
    pub summary: Vec<String>,
    pub diagnostics: Vec<String>,
    pub result: Json,
    pub resources: Json,
}

impl AnalysisReport {
    pub fn new(command: Vec<String>) -> AnalysisReport {
        AnalysisReport {
            command,
            models: Vec::new(),
            exit_code: 0,
            verdict: None,
            summary: Vec::new(),
            diagnostics: Vec::new(),
            result: Json::Null,
            resources: Json::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for line in &self.summary {
            out.push_str(line);
            out.push('\n');
        }
        for d in &self.diagnostics {
            out.push_str("  ");
            out.push_str(d);
            out.push('\n');
        }
        out
    }
}
