//! Outcome record shared by every verification surface (identities,
//! claims, binomial checks, proof-script asserts).

use serde::Serialize;
use std::fmt;
use std::time::Duration;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// The smallest failing argument together with the offending value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    /// Coefficient index or progression argument, depending on the check.
    pub argument: u64,
    /// Human-readable value at the failure point (kept as text so exact
    /// and modular rings serialize the same way).
    pub value: String,
}

impl Counterexample {
    pub fn new(argument: u64, value: String) -> Counterexample {
        Counterexample { argument, value }
    }
}

/// Result of checking one identity or claim.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub id: String,
    /// Largest order or argument that was scanned.
    #[serde(rename = "range")]
    pub range_checked: u64,
    pub status: Status,
    /// Present exactly when `status == Fail`.
    pub counterexample: Option<Counterexample>,
    #[serde(rename = "elapsed_ms", serialize_with = "ser_millis")]
    pub elapsed: Duration,
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl VerificationReport {
    pub fn pass(id: String, range_checked: u64, elapsed: Duration) -> VerificationReport {
        VerificationReport {
            id,
            range_checked,
            status: Status::Pass,
            counterexample: None,
            elapsed,
        }
    }

    pub fn fail(
        id: String,
        range_checked: u64,
        counterexample: Counterexample,
        elapsed: Duration,
    ) -> VerificationReport {
        VerificationReport {
            id,
            range_checked,
            status: Status::Fail,
            counterexample: Some(counterexample),
            elapsed,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.status, &self.counterexample) {
            (Status::Pass, _) => write!(
                f,
                "{:<24} pass  (range {}, {} ms)",
                self.id,
                self.range_checked,
                self.elapsed.as_millis()
            ),
            (Status::Fail, Some(ce)) => write!(
                f,
                "{:<24} FAIL  at {}: {} (range {}, {} ms)",
                self.id,
                ce.argument,
                ce.value,
                self.range_checked,
                self.elapsed.as_millis()
            ),
            (Status::Fail, None) => write!(f, "{:<24} FAIL", self.id),
        }
    }
}
