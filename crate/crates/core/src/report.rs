//! Shared check-report structure for verification commands.
//!
//! Every verification emits a list of [`Check`] records; a run passes when all
//! records have status "pass". The JSON shape is shared across the CLI.

/// One verification record.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct Check {
    /// The name of the check.
    pub check: String,
    /// The parameters the check ran with (human-readable).
    pub params: String,
    /// "pass" or "fail".
    pub status: String,
    /// The measured constant (exact string or decimal), when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured_constant: Option<String>,
    /// The regression-locked constant compared against, when applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub locked_constant: Option<String>,
    /// A counterexample description for failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl Check {
    /// A passing record.
    pub fn pass(check: impl Into<String>, params: impl Into<String>) -> Check {
        Check {
            check: check.into(),
            params: params.into(),
            status: "pass".into(),
            measured_constant: None,
            locked_constant: None,
            counterexample: None,
        }
    }

    /// A failing record with a counterexample.
    pub fn fail(
        check: impl Into<String>,
        params: impl Into<String>,
        counterexample: impl Into<String>,
    ) -> Check {
        Check {
            check: check.into(),
            params: params.into(),
            status: "fail".into(),
            measured_constant: None,
            locked_constant: None,
            counterexample: Some(counterexample.into()),
        }
    }

    /// Sets the measured constant.
    pub fn with_measured(mut self, c: impl Into<String>) -> Check {
        self.measured_constant = Some(c.into());
        self
    }

    /// Sets the locked constant.
    pub fn with_locked(mut self, c: impl Into<String>) -> Check {
        self.locked_constant = Some(c.into());
        self
    }

    /// Whether this record passed.
    pub fn ok(&self) -> bool {
        self.status == "pass"
    }
}

/// Whether every record in a report passed.
pub fn all_ok(checks: &[Check]) -> bool {
    checks.iter().all(Check::ok)
}
