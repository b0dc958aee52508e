use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckStatus {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// The check's hypotheses (usually the lambda window) do not hold.
    #[serde(rename = "NA")]
    NotApplicable,
}

/// One named verification check. Field order is the JSON key order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub status: CheckStatus,
    pub measured: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, pass: bool, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Check {
            check: name.to_string(),
            status: if pass && measured.is_finite() { CheckStatus::Pass } else { CheckStatus::Fail },
            measured: measured.is_finite().then_some(measured),
            threshold: threshold.is_finite().then_some(threshold),
            detail: detail.into(),
        }
    }

    pub fn failed(name: &str, detail: impl Into<String>) -> Self {
        Check {
            check: name.to_string(),
            status: CheckStatus::Fail,
            measured: None,
            threshold: None,
            detail: detail.into(),
        }
    }

    pub fn not_applicable(name: &str, detail: impl Into<String>) -> Self {
        Check {
            check: name.to_string(),
            status: CheckStatus::NotApplicable,
            measured: None,
            threshold: None,
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    /// True iff no check failed; not-applicable checks do not count against it.
    pub fn overall(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }
}
