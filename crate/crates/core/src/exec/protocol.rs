//! Newline-delimited JSON messages exchanged with a runner process.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Request {
    pub job_id: String,
    pub code: String,
    pub tests: String,
    pub method: String,
    pub timeout_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub job_id: String,
    pub status: String,
    pub duration_s: f64,
    #[serde(default)]
    pub detail: String,
}

impl Request {
    /// One protocol line, newline included.
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("request serialises");
        s.push('\n');
        s
    }
}

impl Response {
    pub fn from_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line.trim_end())
    }
}
