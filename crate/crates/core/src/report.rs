//! Machine-readable verification reports shared by every check in the crate.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Short tag naming the mathematical claim being checked.
    pub anchor: String,
    pub verdict: bool,
    #[serde(default)]
    pub witness: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, verdict: bool, witness: Value) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            verdict,
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(default)]
    pub data: Value,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report {
            command: command.into(),
            checks: Vec::new(),
            pass: true,
            data: Value::Null,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.verdict;
        self.checks.push(check);
    }

    pub fn check(&mut self, name: impl Into<String>, anchor: impl Into<String>, verdict: bool, witness: Value) {
        self.push(Check::new(name, anchor, verdict, witness));
    }

    /// Appends all checks of `other`, prefixing their names.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}/{}", c.name);
            self.push(c);
        }
    }

    pub fn with_data(mut self, data: Value) -> Self {
        self.data = data;
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.verdict)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overall_is_conjunction() {
        let mut r = Report::new("demo");
        assert!(r.pass);
        r.check("a", "x", true, json!(null));
        assert!(r.pass);
        r.check("b", "x", false, json!({"k": 1}));
        assert!(!r.pass);
        r.check("c", "x", true, json!(null));
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn serialization_round_trips() {
        let mut r = Report::new("demo");
        r.check("a", "x", true, json!([1, 2]));
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
