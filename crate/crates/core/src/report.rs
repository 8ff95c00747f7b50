//! JSON-lines check reports.

use crate::error::Error;
use serde::Serialize;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

/// One line of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl CheckRecord {
    pub fn pass(check: impl Into<String>, detail: impl Into<String>) -> CheckRecord {
        CheckRecord { check: check.into(), status: Status::Pass, detail: detail.into(), counterexample: None }
    }

    pub fn fail(check: impl Into<String>, detail: impl Into<String>, counterexample: Option<String>) -> CheckRecord {
        CheckRecord { check: check.into(), status: Status::Fail, detail: detail.into(), counterexample }
    }

    pub fn error(check: impl Into<String>, e: &Error) -> CheckRecord {
        CheckRecord { check: check.into(), status: Status::Error, detail: e.to_string(), counterexample: None }
    }

    /// Pass when `ok`, otherwise fail with the given counterexample.
    pub fn verdict(check: impl Into<String>, ok: bool, detail: impl Into<String>, counterexample: Option<String>) -> CheckRecord {
        if ok {
            CheckRecord::pass(check, detail)
        } else {
            CheckRecord::fail(check, detail, counterexample)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.status, self.check, self.detail)?;
        if let Some(c) = &self.counterexample {
            write!(f, " (counterexample: {c})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn json_lines(&self) -> String {
        self.records.iter().map(|r| r.to_json() + "\n").collect()
    }

    pub fn text(&self) -> String {
        self.records.iter().map(|r| r.to_string() + "\n").collect()
    }

    /// 0 when every check passed, 3 when any errored on a resource limit, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else if self.records.iter().any(|r| r.status == Status::Error && (r.detail.starts_with("resource") || r.detail.starts_with("budget"))) {
            3
        } else {
            1
        }
    }
}
