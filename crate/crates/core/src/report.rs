//! Verdicts for bounded checks, shared by the decomposition and conjecture
//! checkers, with a line-oriented text rendering.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Most witnesses kept per report; the failure count is always exact.
pub const MAX_WITNESSES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    SkippedOob,
    /// A recomputed identity differs from its stated form. Not a failure.
    Mismatch,
    Unknown,
}

impl Status {
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::SkippedOob => "SKIPPED_OOB",
            Status::Mismatch => "MISMATCH",
            Status::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub id: String,
    /// Region or cell label the check ran on.
    pub scope: String,
    pub weights: String,
    pub radius: usize,
    pub status: Status,
    /// Instances checked.
    pub count: usize,
    pub failures: usize,
    pub caveats: Vec<String>,
    pub witnesses: Vec<String>,
}

impl Report {
    pub fn new(
        id: impl Into<String>,
        scope: impl Into<String>,
        weights: impl fmt::Display,
        radius: usize,
    ) -> Self {
        Self {
            id: id.into(),
            scope: scope.into(),
            weights: weights.to_string(),
            radius,
            status: Status::Unknown,
            count: 0,
            failures: 0,
            caveats: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn pass_one(&mut self) {
        self.count += 1;
    }

    pub fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.fail(witness());
        }
    }

    /// Records a failed instance.
    pub fn fail(&mut self, witness: String) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    pub fn caveat(&mut self, text: impl Into<String>) {
        let text = text.into();
        if !self.caveats.contains(&text) {
            self.caveats.push(text);
        }
    }

    /// Sets the status from what was recorded. An empty scope is a failure.
    pub fn finish(mut self) -> Self {
        if self.status == Status::SkippedOob || self.status == Status::Mismatch {
            return self;
        }
        self.status = if self.failures > 0 {
            Status::Fail
        } else if self.count == 0 {
            self.fail("nothing was checked".to_string());
            Status::Fail
        } else {
            Status::Pass
        };
        self
    }

    pub fn skipped(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::SkippedOob;
        self.caveat(reason);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `ok <n> - <id> <summary>` or `not ok ...`, then indented details.
    pub fn render(&self, n: usize) -> String {
        let head = if self.status.is_failure() {
            "not ok"
        } else {
            "ok"
        };
        let mut out = format!(
            "{head} {n} - {} {} [{}] weights {} radius {}: {} checked, {} failed\n",
            self.id, self.status, self.scope, self.weights, self.radius, self.count, self.failures
        );
        for c in &self.caveats {
            out.push_str(&format!("  # caveat: {c}\n"));
        }
        for w in &self.witnesses {
            out.push_str(&format!("  # witness: {w}\n"));
        }
        out
    }
}

/// Renders a batch with a trailer of counts.
pub fn render_all(reports: &[Report]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        out.push_str(&r.render(i + 1));
    }
    let failed = reports.iter().filter(|r| r.status.is_failure()).count();
    out.push_str(&format!("1..{}\n# {} failed\n", reports.len(), failed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_follows_records() {
        let mut r = Report::new("x", "C2:e", "a=1,b=1,c=1", 4);
        r.pass_one();
        assert_eq!(r.clone().finish().status, Status::Pass);
        r.check(false, || "bad".into());
        let r = r.finish();
        assert_eq!(r.status, Status::Fail);
        assert!(r.render(1).starts_with("not ok 1 - x FAIL"));
        let empty = Report::new("y", "s", "w", 1).finish();
        assert_eq!(empty.status, Status::Fail);
        assert_eq!(empty.witnesses.len(), 1);
    }

    #[test]
    fn witnesses_are_capped() {
        let mut r = Report::new("x", "s", "w", 1);
        for i in 0..50 {
            r.check(false, || format!("{i}"));
        }
        assert_eq!(r.failures, 50);
        assert_eq!(r.witnesses.len(), MAX_WITNESSES);
    }
}
