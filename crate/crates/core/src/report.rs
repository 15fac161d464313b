//! Machine-readable reports shared by the command-line driver and the suite.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

/// One command's outcome. Object keys serialize in sorted order, so equal
/// reports render to identical bytes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub status: Status,
    pub details: Value,
}

impl Report {
    pub fn new(command: &str, inputs: BTreeMap<String, String>, status: Status, details: Value) -> Self {
        Self { command: command.to_string(), inputs, status, details }
    }

    pub fn error(command: &str, inputs: BTreeMap<String, String>, message: String) -> Self {
        Self::new(command, inputs, Status::Error, serde_json::json!({ "message": message }))
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}
