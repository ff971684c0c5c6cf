//! Check results and their text/JSON renderings.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The identity being checked, in words.
    pub anchor: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub millis: u64,
}

impl Check {
    /// Runs `f` and records its outcome; `Err` carries the witness.
    pub fn run<F>(name: impl Into<String>, anchor: impl Into<String>, f: F) -> Check
    where
        F: FnOnce() -> Result<(), String>,
    {
        let start = Instant::now();
        let outcome = f();
        let millis = start.elapsed().as_millis() as u64;
        let (status, witness) = match outcome {
            Ok(()) => (Status::Pass, None),
            Err(w) => (Status::Fail, Some(w)),
        };
        Check {
            name: name.into(),
            anchor: anchor.into(),
            status,
            witness,
            millis,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Checks sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, check: Check) {
        let at = self.checks.partition_point(|c| c.name <= check.name);
        self.checks.insert(at, check);
    }

    pub fn merge(&mut self, other: Report) {
        for c in other.checks {
            self.push(c);
        }
        if self.seed.is_none() {
            self.seed = other.seed;
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Copy with every `millis` set to zero.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.millis = 0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl FromIterator<Check> for Report {
    fn from_iter<I: IntoIterator<Item = Check>>(iter: I) -> Self {
        let mut r = Report::new();
        for c in iter {
            r.push(c);
        }
        r
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(seed) = self.seed {
            writeln!(f, "seed {seed}")?;
        }
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {} [{}] {}ms", c.name, c.anchor, c.millis)?;
            if let Some(w) = &c.witness {
                for line in w.lines() {
                    writeln!(f, "     {line}")?;
                }
            }
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}
