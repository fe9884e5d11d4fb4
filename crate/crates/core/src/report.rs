//! Check results and run reports.
//!
//! Every verification emits a `CheckResult`: a name, a human-readable
//! statement of the fact being checked, the parameters it ran with, the
//! worst margin observed (slack of the inequality; negative means
//! violated beyond tolerance), and the verdict. Reports serialize to
//! JSON deterministically: map keys are ordered, matrices never appear,
//! and wall-clock timing lives outside the serialized body so identical
//! runs produce identical bytes.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;

/// Outcome of a single verification or certificate evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Statement of the inequality or identity being checked.
    pub paper_ref: String,
    pub parameters: BTreeMap<String, String>,
    /// Worst slack observed; `None` when the check was skipped.
    pub margin: Option<f64>,
    pub pass: bool,
    /// Reason the check did not run; such results never fail a run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

impl CheckResult {
    pub fn new(name: &str, reference: &str) -> Self {
        Self {
            name: name.to_string(),
            paper_ref: reference.to_string(),
            parameters: BTreeMap::new(),
            margin: None,
            pass: false,
            skipped: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    /// Record the margin and derive the verdict: pass iff margin ≥ −tol.
    pub fn with_margin(mut self, margin: f64, tol: f64) -> Self {
        self.margin = Some(margin);
        self.pass = margin >= -tol;
        self
    }

    /// Mark as skipped with a reason; skipped checks do not fail runs.
    pub fn skip(mut self, reason: &str) -> Self {
        self.skipped = Some(reason.to_string());
        self.margin = None;
        self.pass = true;
        self
    }
}

/// Aggregate of one command invocation.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub all_pass: bool,
    /// Wall clock is reported on stderr, never serialized: identical
    /// config, seed, and version must yield byte-identical output.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed,
            config,
            checks: Vec::new(),
            all_pass: true,
            wall_clock: Duration::ZERO,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.all_pass &= check.pass;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = CheckResult>) {
        for c in checks {
            self.push(c);
        }
    }

    /// Process exit code: 0 all pass, 1 at least one failure.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass { 0 } else { 1 }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_below_tolerance_fails() {
        let c = CheckResult::new("demo", "x <= y").with_margin(-1e-6, 1e-9);
        assert!(!c.pass);
        let c = CheckResult::new("demo", "x <= y").with_margin(-1e-10, 1e-9);
        assert!(c.pass);
    }

    #[test]
    fn skipped_checks_do_not_fail_the_run() {
        let mut r = RunReport::new("verify", 0x5EED, serde_json::json!({}));
        r.push(CheckResult::new("a", "ref").with_margin(0.5, 1e-9));
        r.push(CheckResult::new("b", "ref").skip("denominator below threshold"));
        assert!(r.all_pass);
        assert_eq!(r.exit_code(), 0);
        r.push(CheckResult::new("c", "ref").with_margin(-1.0, 1e-9));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn serialization_is_stable_and_omits_wall_clock() {
        let mut r = RunReport::new("verify", 7, serde_json::json!({"ell": 4}));
        r.push(
            CheckResult::new("irb", "eta_hat(k) <= 1/(2 beta eps(k))")
                .param("ell", 4)
                .with_margin(0.125, 1e-9),
        );
        r.wall_clock = Duration::from_millis(1234);
        let a = r.to_json();
        r.wall_clock = Duration::from_millis(9999);
        let b = r.to_json();
        assert_eq!(a, b);
        assert!(!a.contains("wall_clock"));
        assert!(a.ends_with('\n'));
    }
}
