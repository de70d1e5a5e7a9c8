//! JSON shape of reports and exit codes derived from statuses.

use hecke_cells::report::{Report, Status};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub checked: usize,
    pub failed: usize,
}

/// One report as written in JSON output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub id: String,
    pub scope: String,
    pub weights: String,
    pub radius: usize,
    pub status: Status,
    pub caveats: Vec<String>,
    pub witnesses: Vec<String>,
    pub counts: Counts,
}

impl From<&Report> for ResultEntry {
    fn from(r: &Report) -> Self {
        Self {
            id: r.id.clone(),
            scope: r.scope.clone(),
            weights: r.weights.clone(),
            radius: r.radius,
            status: r.status,
            caveats: r.caveats.clone(),
            witnesses: r.witnesses.clone(),
            counts: Counts {
                checked: r.count,
                failed: r.failures,
            },
        }
    }
}

impl From<ResultEntry> for Report {
    fn from(e: ResultEntry) -> Self {
        Report {
            id: e.id,
            scope: e.scope,
            weights: e.weights,
            radius: e.radius,
            status: e.status,
            count: e.counts.checked,
            failures: e.counts.failed,
            caveats: e.caveats,
            witnesses: e.witnesses,
        }
    }
}

/// Severity used to pick the status shown for a group of reports.
pub fn severity(s: Status) -> u8 {
    match s {
        Status::Pass => 0,
        Status::Mismatch => 1,
        Status::SkippedOob => 2,
        Status::Unknown => 3,
        Status::Fail => 4,
    }
}

pub fn worst(reports: &[Report]) -> Option<Status> {
    reports
        .iter()
        .map(|r| r.status)
        .max_by_key(|&s| severity(s))
}

/// 0 if everything passed (mismatches included), 3 if the only problem is
/// an out-of-ball skip, else 1.
pub fn exit_code(reports: &[Report]) -> u8 {
    match worst(reports) {
        None | Some(Status::Pass) | Some(Status::Mismatch) => 0,
        Some(Status::SkippedOob) => 3,
        Some(_) => 1,
    }
}
