//! Pairs of independent evaluations and their agreement.

use serde::{Deserialize, Serialize};

/// Two independent evaluations of the same quantity and whether they agree.
///
/// `passed` holds exactly when `abs_diff <= tolerance` or
/// `rel_diff <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub context: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CrossCheckReport {
    pub fn new(context: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        let rel_diff = relative_difference(lhs, rhs);
        let passed = abs_diff <= tolerance || rel_diff <= tolerance;
        Self { context: context.into(), lhs, rhs, abs_diff, rel_diff, tolerance, passed }
    }

    /// A check that must hold in relative terms only.
    pub fn relative(context: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let mut r = Self::new(context, lhs, rhs, tolerance);
        r.passed = r.rel_diff <= tolerance;
        r
    }

    /// An exact comparison decided outside floating point. `lhs` and `rhs`
    /// are display approximations.
    pub fn exact(context: impl Into<String>, lhs: f64, rhs: f64, equal: bool) -> Self {
        let abs_diff = if equal { 0.0 } else { (lhs - rhs).abs().max(f64::MIN_POSITIVE) };
        let rel_diff = if equal { 0.0 } else { relative_difference(lhs, rhs).max(f64::MIN_POSITIVE) };
        Self { context: context.into(), lhs, rhs, abs_diff, rel_diff, tolerance: 0.0, passed: equal }
    }

    /// An inequality `lhs <= rhs`.
    pub fn upper_bound(context: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let abs_diff = (lhs - rhs).abs();
        let rel_diff = relative_difference(lhs, rhs);
        Self { context: context.into(), lhs, rhs, abs_diff, rel_diff, tolerance: 0.0, passed: lhs <= rhs }
    }

    /// One JSON line: `{context, lhs, rhs, rel_diff, tolerance, passed}`.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({
            "context": self.context,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "rel_diff": self.rel_diff,
            "tolerance": self.tolerance,
            "passed": self.passed,
        })
        .to_string()
    }
}

fn relative_difference(lhs: f64, rhs: f64) -> f64 {
    let d = (lhs - rhs).abs();
    if d == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        d / rhs.abs()
    }
}

/// An ordered collection of checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSuite {
    pub name: String,
    pub checks: Vec<CrossCheckReport>,
}

impl CheckSuite {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), checks: Vec::new() }
    }

    pub fn push(&mut self, check: CrossCheckReport) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: CheckSuite) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CrossCheckReport> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule() {
        assert!(CrossCheckReport::new("a", 1.0, 1.0 + 1e-9, 1e-8).passed);
        assert!(!CrossCheckReport::new("b", 1.0, 2.0, 1e-8).passed);
        // absolute agreement suffices when both sides are tiny
        assert!(CrossCheckReport::new("c", 1e-20, 3e-20, 1e-8).passed);
        assert!(!CrossCheckReport::relative("d", 1e-20, 3e-20, 1e-8).passed);
    }

    #[test]
    fn json_line_schema() {
        let line = CrossCheckReport::new("ctx", 1.0, 1.0, 1e-6).to_json_line();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        for key in ["context", "lhs", "rhs", "rel_diff", "tolerance", "passed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["passed"], serde_json::Value::Bool(true));
    }

    #[test]
    fn exact_and_bound() {
        assert!(CrossCheckReport::exact("e", 3.0, 3.0, true).passed);
        assert!(!CrossCheckReport::exact("e", 3.0, 4.0, false).passed);
        assert!(CrossCheckReport::upper_bound("u", 1.0, 2.0).passed);
        assert!(!CrossCheckReport::upper_bound("u", 2.0, 1.0).passed);
    }
}
