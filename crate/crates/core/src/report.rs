//! Pass/fail records shared by the verification suites.

use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub samples: usize,
    pub seed: Option<u64>,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, passed: bool, worst: f64, samples: usize, seed: Option<u64>, detail: String) -> Self {
        Self { name: name.into(), passed, worst, samples, seed, detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(suite: &str, checks: Vec<CheckResult>) -> Self {
        Self { suite: suite.into(), passed: checks.iter().all(|c| c.passed), checks }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "[{}] {}: {} (worst {:.3e}, samples {})\n",
                self.suite,
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.worst,
                c.samples
            ));
        }
        s
    }
}
