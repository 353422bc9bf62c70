use serde_json::{json, Value};
use softsheaf::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    PropertyFailed,
    InvalidInput,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::PropertyFailed => "property_failed",
            Status::InvalidInput => "invalid_input",
        }
    }
}

/// Result of one command: status, a text report, a JSON report and the
/// files written.
#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub lines: Vec<String>,
    pub report: Value,
    pub artifacts: Vec<String>,
}

impl Outcome {
    pub fn new(status: Status, lines: Vec<String>, report: Value) -> Self {
        Outcome {
            status,
            lines,
            report,
            artifacts: Vec::new(),
        }
    }

    pub fn ok(lines: Vec<String>, report: Value) -> Self {
        Self::new(Status::Ok, lines, report)
    }

    /// `Ok` if `holds`, otherwise `PropertyFailed`.
    pub fn property(holds: bool, lines: Vec<String>, report: Value) -> Self {
        Self::new(if holds { Status::Ok } else { Status::PropertyFailed }, lines, report)
    }

    pub fn with_artifact(mut self, path: &std::path::Path) -> Self {
        self.artifacts.push(path.display().to_string());
        self
    }

    pub fn from_error(e: Error) -> Self {
        let status = match e {
            Error::Precondition(_)
            | Error::NotInterpolating(_)
            | Error::SoftnessRequired(_)
            | Error::NotHomomorphism(_)
            | Error::InternalInvariant(_) => Status::PropertyFailed,
            _ => Status::InvalidInput,
        };
        Outcome::new(status, vec![format!("error: {e}")], json!({ "error": e.to_string() }))
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        for a in &self.artifacts {
            s.push_str(&format!("wrote {a}\n"));
        }
        s
    }

    pub fn json(&self) -> String {
        let doc = json!({
            "status": self.status.as_str(),
            "report": self.report,
            "artifacts": self.artifacts,
        });
        serde_json::to_string_pretty(&doc).expect("reports serialize")
    }
}
