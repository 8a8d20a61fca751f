//! Verification reports shared by the `verify_*` sweeps.

use std::fmt;

use serde::Serialize;

/// One failed check: the offending input plus both sides of the comparison.
#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

/// Outcome of a verification sweep.
///
/// `failures` empty means the suite passed; `notes` carry annotations that
/// are informational rather than pass/fail (known caveats, statistics).
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub params: String,
    pub checks: u64,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn new(suite: impl Into<String>, params: impl Into<String>) -> Self {
        VerifyReport {
            suite: suite.into(),
            params: params.into(),
            checks: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Records one check; on failure, stores the triple.
    pub fn check(
        &mut self,
        ok: bool,
        input: impl fmt::Display,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
    ) {
        self.checks += 1;
        if !ok {
            self.failures.push(Failure {
                input: input.to_string(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite: {}", self.suite)?;
        writeln!(f, "params: {}", self.params)?;
        writeln!(f, "checks: {}", self.checks)?;
        writeln!(f, "failures: {}", self.failures.len())?;
        for failure in &self.failures {
            writeln!(
                f,
                "  input: {} | expected: {} | actual: {}",
                failure.input, failure.expected, failure.actual
            )?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}
