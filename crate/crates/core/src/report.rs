use std::fmt;

use serde::{Deserialize, Serialize};

/// One failed check, naming the offending cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub check: String,
    pub cells: Vec<String>,
    pub detail: String,
}

/// Report-style validation result: violations are data, not errors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, check: &str, cells: Vec<String>, detail: impl Into<String>) {
        self.violations.push(Violation { check: check.to_string(), cells, detail: detail.into() });
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn has(&self, check: &str) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }

    pub fn count(&self, check: &str) -> usize {
        self.violations.iter().filter(|v| v.check == check).count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passes() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{} [{}]: {}", v.check, v.cells.join(","), v.detail)?;
        }
        Ok(())
    }
}
