//! Pass/fail records for the verification suites, with stable JSON and text
//! renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub identity: String,
    pub status: Status,
    /// Number of instances checked.
    pub cases: usize,
    /// The first failing instance, if any.
    pub witness: Option<String>,
}

/// Accumulates identity checks; each identity becomes one record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub field: String,
    pub seed: Option<u64>,
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn new(suite: &str, field: impl Into<String>, seed: Option<u64>) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            suite: suite.to_string(),
            field: field.into(),
            seed,
            records: Vec::new(),
        }
    }

    /// Records one instance of `identity` under this report's suite. The
    /// witness closure runs only on failure.
    pub fn check(&mut self, identity: &str, ok: bool, witness: impl FnOnce() -> String) {
        let suite = self.suite.clone();
        self.check_in(&suite, identity, ok, witness);
    }

    pub fn check_in(&mut self, suite: &str, identity: &str, ok: bool, witness: impl FnOnce() -> String) {
        let idx = match self.records.iter().position(|r| r.suite == suite && r.identity == identity) {
            Some(i) => i,
            None => {
                self.records.push(CheckRecord {
                    suite: suite.to_string(),
                    identity: identity.to_string(),
                    status: Status::Pass,
                    cases: 0,
                    witness: None,
                });
                self.records.len() - 1
            }
        };
        let rec = &mut self.records[idx];
        rec.cases += 1;
        if !ok && rec.status == Status::Pass {
            rec.status = Status::Fail;
            rec.witness = Some(witness());
        }
    }

    /// Records an error raised while evaluating an identity as a failure.
    pub fn check_result<T>(&mut self, identity: &str, res: crate::Result<T>, ok: impl FnOnce(&T) -> bool, witness: impl FnOnce(&T) -> String) {
        match res {
            Ok(v) => {
                let pass = ok(&v);
                self.check(identity, pass, || witness(&v));
            }
            Err(e) => self.check(identity, false, || format!("error: {e}")),
        }
    }

    pub fn extend(&mut self, other: Report) {
        for rec in other.records {
            match self
                .records
                .iter_mut()
                .find(|r| r.suite == rec.suite && r.identity == rec.identity)
            {
                Some(mine) => {
                    mine.cases += rec.cases;
                    if mine.status == Status::Pass && rec.status == Status::Fail {
                        mine.status = Status::Fail;
                        mine.witness = rec.witness;
                    }
                }
                None => self.records.push(rec),
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn get(&self, identity: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.identity == identity)
    }

    /// Records ordered by suite, then identity.
    pub fn sorted(mut self) -> Self {
        let mut by_key: BTreeMap<(String, String), CheckRecord> = BTreeMap::new();
        for r in self.records.drain(..) {
            by_key.insert((r.suite.clone(), r.identity.clone()), r);
        }
        self.records = by_key.into_values().collect();
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.clone().sorted()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let sorted = self.clone().sorted();
        let mut out = String::new();
        let _ = writeln!(out, "suite: {}", sorted.suite);
        let _ = writeln!(out, "field: {}", sorted.field);
        if let Some(seed) = sorted.seed {
            let _ = writeln!(out, "seed: {seed}");
        }
        for r in &sorted.records {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
            };
            let _ = writeln!(out, "{tag} [{}] {} ({} cases)", r.suite, r.identity, r.cases);
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "     witness: {w}");
            }
        }
        let failed = sorted.failures().count();
        let _ = writeln!(out, "{} identities, {} failed", sorted.records.len(), failed);
        out
    }
}
