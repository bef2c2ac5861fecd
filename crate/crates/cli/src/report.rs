//! Report structure shared by all commands: one entry per performed check,
//! rendered as aligned text, JSON, or LaTeX-valued JSON-like text.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultEntry {
    pub kind: String,
    pub subject: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<String>,
    pub results: Vec<ResultEntry>,
    pub verdict: Status,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: Vec<String>) -> Self {
        Report {
            command: command.into(),
            inputs,
            results: Vec::new(),
            verdict: Status::Pass,
        }
    }

    pub fn push(&mut self, entry: ResultEntry) {
        if entry.status == Status::Fail && self.verdict == Status::Pass {
            self.verdict = Status::Fail;
        }
        if entry.status == Status::Error {
            self.verdict = Status::Error;
        }
        self.results.push(entry);
    }

    pub fn pass(&self) -> bool {
        self.verdict == Status::Pass
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} ({})\n", self.command, self.inputs.join(", ")));
        for r in &self.results {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Info => "info",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("[{status}] {}: {}", r.kind, r.subject));
            if let Some(v) = &r.value {
                out.push_str(&format!("\n       {v}"));
            }
            if let Some(res) = &r.residual {
                out.push_str(&format!("\n       residual: {res}"));
            }
            out.push('\n');
        }
        let verdict = match self.verdict {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
            Status::Error => "error",
        };
        out.push_str(&format!("verdict: {verdict}\n"));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn entry(
    kind: impl Into<String>,
    subject: impl Into<String>,
    status: Status,
) -> ResultEntry {
    ResultEntry {
        kind: kind.into(),
        subject: subject.into(),
        status,
        residual: None,
        value: None,
    }
}
