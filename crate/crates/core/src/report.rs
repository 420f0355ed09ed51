use std::fmt;

use serde::{Deserialize, Serialize};

/// A single failed check: which rule, and a human-readable witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: String,
    pub witness: String,
}

/// Report-style result shared by the validators. Empty means all checks passed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, rule: impl Into<String>, witness: impl Into<String>) {
        self.violations.push(Violation { rule: rule.into(), witness: witness.into() });
    }

    pub fn check(&mut self, ok: bool, rule: &str, witness: impl FnOnce() -> String) {
        if !ok {
            self.push(rule, witness());
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_rule(&self, prefix: &str) -> bool {
        self.violations.iter().any(|v| v.rule.starts_with(prefix))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{}: {}", v.rule, v.witness)?;
        }
        Ok(())
    }
}
